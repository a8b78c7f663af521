from concurrent.futures import ThreadPoolExecutor

from twocenter.models import PointStatus
from twocenter.services.task_manager import PointLedger


def test_create_point():
    ledger = PointLedger()
    assert ledger.create_point(2.5) == 2.5

    row = ledger.get_point(2.5)
    assert row.status == PointStatus.PENDING
    assert row.message == "Point created"
    assert row.E_numeric is None


def test_update_point_merges_fields():
    ledger = PointLedger()
    ledger.create_point(1.0)
    ledger.update_point(1.0, status=PointStatus.PROCESSING, message="Solving")
    ledger.update_point(1.0, status=PointStatus.COMPLETED, message="ok", E_numeric=2.5, nodes_radial=0)
    ledger.update_point(1.0, E_asym=2.4, lambda_numeric=None)

    row = ledger.get_point(1.0)
    assert row.status == PointStatus.COMPLETED
    assert row.message == "ok"
    assert row.E_numeric == 2.5
    assert row.E_asym == 2.4
    assert row.nodes_radial == 0
    assert row.lambda_numeric is None


def test_update_unknown_point_is_ignored():
    ledger = PointLedger()
    ledger.update_point(3.0, status=PointStatus.COMPLETED)
    assert 3.0 not in ledger.points
    assert ledger.get_point(3.0).status == PointStatus.FAILED


def test_rows_are_sorted_and_failures_listed():
    ledger = PointLedger()
    for R in (3.0, 1.0, 2.0):
        ledger.create_point(R)
    ledger.update_point(2.0, status=PointStatus.FAILED, message="solver failed")

    assert [row.R for row in ledger.rows()] == [1.0, 2.0, 3.0]
    assert ledger.failed() == [2.0]
    assert ledger.get_point(1.0).status == PointStatus.PENDING


def test_concurrent_updates():
    ledger = PointLedger()
    grid = [0.5 * i for i in range(1, 101)]
    for R in grid:
        ledger.create_point(R)

    def work(R):
        ledger.update_point(R, status=PointStatus.COMPLETED, message="ok", E_numeric=R * R)

    with ThreadPoolExecutor(max_workers=8) as pool:
        list(pool.map(work, grid))

    rows = ledger.rows()
    assert all(row.status == PointStatus.COMPLETED for row in rows)
    assert [row.E_numeric for row in rows] == [R * R for R in grid]
