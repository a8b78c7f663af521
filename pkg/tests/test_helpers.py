import json

import numpy as np
import pytest

from twocenter.errors import ConfigurationError
from twocenter.models import FixtureRecord, OutputFormat, PhysicalConfig, PointStatus, QuantumNumbers, ResultRow, RunConfig
from twocenter.utils import helpers
from twocenter.utils.validators import check_output_path, check_r_range, check_report_inputs, parse_on_off


def _rows():
    return [
        ResultRow(R=1.0, E_numeric=2.5, lambda_numeric=-0.1234567890123456789, nodes_radial=0, nodes_angular=0),
        ResultRow(R=2.0, E_numeric=None, status=PointStatus.FAILED, message="solver failed: no root"),
    ]


def test_format_number():
    assert helpers.format_number(None) == ""
    assert helpers.format_number(3) == "3"
    assert helpers.format_number(True) == "true"
    assert helpers.format_number(0.1) == "0.10000000000000001"
    assert helpers.format_number(PointStatus.COMPLETED) == "completed"


def test_csv_keeps_doubles_and_failures(tmp_path):
    path = tmp_path / "out" / "run.csv"
    helpers.write_csv(_rows(), path)

    with open(path) as f:
        header = f.readline().strip().split(",")
    assert header == helpers.COLUMNS

    rows = helpers.read_csv(path)
    assert rows[0].lambda_numeric == -0.1234567890123456789
    assert rows[0].nodes_radial == 0
    assert rows[1].status == PointStatus.FAILED
    assert rows[1].E_numeric is None
    assert rows[1].message == "solver failed: no root"


def test_json_with_metadata(tmp_path):
    path = tmp_path / "run.json"
    helpers.write_json(_rows(), path, {"mode": "both", "literal_formulas": True})

    payload = json.loads(path.read_text())
    assert list(payload["rows"][0]) == helpers.COLUMNS

    rows, meta = helpers.read_results(path)
    assert meta["literal_formulas"] is True
    assert rows[0].E_numeric == 2.5


def test_csv_metadata_sidecar(tmp_path):
    path = tmp_path / "run.csv"
    helpers.write_csv(_rows(), path)
    helpers.write_metadata(path, {"Z": 1.0})

    assert helpers.metadata_path(path).name == "run.csv.meta.json"
    _, meta = helpers.read_results(path)
    assert meta == {"Z": 1.0}


def test_fixture_file(tmp_path):
    path = tmp_path / "fixtures.txt"
    records = [
        FixtureRecord(Z=1.0, omega=0.25, R=10.0, m=0, index=0, E=3.3761234567890123, grid_error=2e-9),
        FixtureRecord(Z=1.0, omega=0.25, R=10.0, m=0, index=1, E=3.9, grid_error=5e-9),
    ]
    helpers.write_fixtures(records, path)

    assert path.read_text().splitlines()[0] == helpers.FIXTURE_HEADER
    assert helpers.read_fixtures(path) == records


def test_output_stem():
    rc = RunConfig(
        config=PhysicalConfig(Z=1.0, omega=0.25, R=5.0),
        qn=QuantumNumbers(n=0, q=1, m=0),
        r_min=5.0, r_max=10.0, r_steps=2,
    )
    assert helpers.output_stem(rc) == "Z1_omega0.25_n0q1m0"


def test_fit_slope():
    R = [10.0, 20.0, 40.0, 80.0]
    assert helpers.fit_slope(R, [3.0 / r ** 2 for r in R]) == pytest.approx(-2.0, abs=1e-12)



def test_shape_correlation_ignores_sign_and_scale():
    x = np.linspace(0.0, 2.0 * np.pi, 2001)
    wave = np.sin(x) * np.exp(-x)
    assert helpers.shape_correlation(x, wave, wave) == pytest.approx(1.0, rel=1e-12)
    assert helpers.shape_correlation(x, wave, -3.0 * wave) == pytest.approx(1.0, rel=1e-12)
    assert helpers.shape_correlation(x, np.sin(x), np.cos(x)) == pytest.approx(0.0, abs=1e-6)
    assert helpers.shape_correlation(x, wave, np.zeros_like(x)) == 0.0

@pytest.mark.parametrize("text,value", [("on", True), ("OFF", False), (" true ", True), ("0", False)])
def test_parse_on_off(text, value):
    assert parse_on_off(text) is value


def test_parse_on_off_rejects_other_text():
    with pytest.raises(ConfigurationError):
        parse_on_off("maybe")


@pytest.mark.parametrize("r_min,r_max,steps", [(0.0, 1.0, 2), (2.0, 1.0, 2), (1.0, 2.0, 0)])
def test_check_r_range(r_min, r_max, steps):
    with pytest.raises(ConfigurationError):
        check_r_range(r_min, r_max, steps)


def test_check_output_path(tmp_path):
    assert check_output_path(None, OutputFormat.CSV) is None
    assert check_output_path(tmp_path / "run", OutputFormat.JSON).suffix == ".json"
    with pytest.raises(ConfigurationError):
        check_output_path(tmp_path / "run.csv", OutputFormat.JSON)


def test_check_report_inputs(tmp_path):
    existing = tmp_path / "a.csv"
    existing.write_text("R\n")
    assert check_report_inputs([str(existing)]) == [existing]
    with pytest.raises(ConfigurationError):
        check_report_inputs([existing, tmp_path / "missing.csv"])
