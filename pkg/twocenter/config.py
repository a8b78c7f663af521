from pydantic_settings import BaseSettings
from pathlib import Path


class Settings(BaseSettings):
    # App
    APP_NAME: str = "Two-center Coulomb + oscillator solver"
    LOG_LEVEL: str = "INFO"

    # Integrator / shooting
    REL_TOL: float = 1e-11
    MATCH_TOL: float = 1e-9
    MAX_OUTER_ITERS: int = 200
    BRACKET_EXPANSION: float = 2.0
    ENDPOINT_OFFSET: float = 1e-8
    OVERFLOW_GUARD: float = 1e100
    TAIL_DEPTH: float = 40.0
    XI_MAX_CAP: float = 1e4

    # Series kernels
    SERIES_MAX_TERMS: int = 5000
    SERIES_REL_TOL: float = 1e-14
    SERIES_OVERFLOW_GUARD: float = 1e250

    # Asymptotic formulas
    LITERAL_FORMULAS: bool = True
    BETA: float = 0.0
    DELTA: float = 0.0

    # Orchestration
    MAX_WORKERS: int = 4
    OUTPUT_DIR: Path = Path("./output")
    FIXTURE_PATH: Path = Path("./fixtures/oracle_fixtures.txt")

    class Config:
        env_file = ".env"
        env_prefix = "TWOCENTER_"


settings = Settings()
