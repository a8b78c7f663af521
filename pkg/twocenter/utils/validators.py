from pathlib import Path
from typing import Optional

from twocenter.errors import ConfigurationError
from twocenter.models import OutputFormat


def parse_on_off(value: str) -> bool:
    """Parse an on|off switch"""
    text = value.strip().lower()
    if text in ("on", "true", "1", "yes"):
        return True
    if text in ("off", "false", "0", "no"):
        return False
    raise ConfigurationError(f"expected on|off, got {value!r}")


def check_r_range(r_min: float, r_max: float, r_steps: int):
    """Validate the R sweep before any work starts"""
    if not r_min > 0.0:
        raise ConfigurationError(f"--r-min must be positive, got {r_min}")
    if r_max < r_min:
        raise ConfigurationError(f"--r-max ({r_max}) must not be below --r-min ({r_min})")
    if r_steps < 1:
        raise ConfigurationError(f"--r-steps must be at least 1, got {r_steps}")


def check_output_path(path: Optional[Path], fmt: OutputFormat) -> Optional[Path]:
    """Reject an explicit suffix that contradicts --format"""
    if path is None:
        return None
    suffix = path.suffix.lower()
    if suffix and suffix != f".{fmt.value}":
        raise ConfigurationError(f"output {path} does not match --format {fmt.value}")
    return path if suffix else path.with_suffix(f".{fmt.value}")


def check_report_inputs(paths) -> list:
    missing = [str(p) for p in paths if not Path(p).exists()]
    if missing:
        raise ConfigurationError(f"report inputs not found: {', '.join(missing)}")
    return [Path(p) for p in paths]
