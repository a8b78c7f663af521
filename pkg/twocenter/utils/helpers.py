import csv
import json
import logging
import math
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid

from twocenter.models import FixtureRecord, ResultRow, RunConfig

logger = logging.getLogger(__name__)

COLUMNS = [
    "R",
    "E_numeric",
    "lambda_numeric",
    "E_asym",
    "lambda_eta_asym",
    "lambda_xi_asym",
    "resid_E",
    "resid_lambda",
    "nodes_radial",
    "nodes_angular",
    "solver_iterations",
    "h_lambda_numeric",
    "h_lambda_harmonic",
    "corr_U",
    "corr_V",
    "nodes_U_asym",
    "nodes_V_asym",
    "status",
    "message",
]

FIXTURE_HEADER = "# Z omega R m index E gridError"


def format_number(value) -> str:
    """17 significant digits so doubles survive a text round trip"""
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(getattr(value, "value", value))


def _parse_cell(column: str, text: str):
    if text == "":
        return None
    if column in ("nodes_radial", "nodes_angular", "solver_iterations", "nodes_U_asym", "nodes_V_asym"):
        return int(text)
    if column in ("status", "message"):
        return text
    return float(text)


def output_stem(rc: RunConfig) -> str:
    """File stem naming the instance, e.g. Z1_omega0.25_n0q0m0"""
    stem = f"Z{rc.config.Z:g}_omega{rc.config.omega:g}_n{rc.qn.n}q{rc.qn.q}m{rc.qn.m}"
    return "".join(c if c.isalnum() or c in "._-" else "_" for c in stem)


def metadata_path(path: Path) -> Path:
    return path.with_name(path.name + ".meta.json")


def ensure_parent(path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)


def write_csv(rows: Sequence[ResultRow], path: Path):
    ensure_parent(path)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(COLUMNS)
        for row in rows:
            data = row.model_dump()
            writer.writerow([format_number(data[c]) for c in COLUMNS])
    logger.info(f"Wrote {len(rows)} rows to {path}")


def read_csv(path: Path) -> List[ResultRow]:
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        return [ResultRow(**{c: _parse_cell(c, r.get(c, "")) for c in COLUMNS if r.get(c, "") != ""}) for r in reader]


def write_json(rows: Sequence[ResultRow], path: Path, metadata: Optional[Dict] = None):
    ensure_parent(path)
    payload = {
        "metadata": metadata or {},
        "rows": [{c: row.model_dump(mode="json")[c] for c in COLUMNS} for row in rows],
    }
    with open(path, "w") as f:
        f.write(json.dumps(payload, indent=2, sort_keys=False, default=format_number))
        f.write("\n")
    logger.info(f"Wrote {len(rows)} rows to {path}")


def read_json(path: Path) -> Tuple[List[ResultRow], Dict]:
    with open(path) as f:
        payload = json.load(f)
    return [ResultRow(**r) for r in payload["rows"]], payload.get("metadata", {})


def write_metadata(path: Path, metadata: Dict):
    target = metadata_path(path)
    ensure_parent(target)
    with open(target, "w") as f:
        f.write(json.dumps(metadata, indent=2))
        f.write("\n")


def read_results(path: Path) -> Tuple[List[ResultRow], Dict]:
    """Rows plus run metadata from a CSV (with sidecar) or JSON output file"""
    path = Path(path)
    if path.suffix == ".json":
        return read_json(path)
    rows = read_csv(path)
    meta = {}
    if metadata_path(path).exists():
        with open(metadata_path(path)) as f:
            meta = json.load(f)
    return rows, meta


def write_fixtures(records: Sequence[FixtureRecord], path: Path):
    ensure_parent(path)
    with open(path, "w") as f:
        f.write(FIXTURE_HEADER + "\n")
        for r in records:
            fields = [r.Z, r.omega, r.R, r.m, r.index, r.E, r.grid_error]
            f.write(" ".join(format_number(v) for v in fields) + "\n")
    logger.info(f"Wrote {len(records)} oracle fixtures to {path}")


def read_fixtures(path: Path) -> List[FixtureRecord]:
    records = []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            Z, omega, R, m, index, E, err = line.split()
            records.append(FixtureRecord(
                Z=float(Z), omega=float(omega), R=float(R), m=int(m), index=int(index), E=float(E), grid_error=float(err),
            ))
    return records


def fit_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of log y against log x"""
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    slope, _ = np.polyfit(lx, ly, 1)
    return float(slope)


def shape_correlation(x: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    """|<a, b>| / (|a| |b|) under the trapezoid rule on x; blind to the overall sign"""
    norm = math.sqrt(trapezoid(a * a, x) * trapezoid(b * b, x))
    if norm == 0.0:
        return 0.0
    return abs(trapezoid(a * b, x)) / norm
