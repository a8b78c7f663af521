import threading
from typing import Dict, List

from twocenter.models import PointStatus, ResultRow


class PointLedger:
    """Per-R work ledger for one run; safe to update from worker threads."""

    def __init__(self):
        self.points: Dict[float, dict] = {}
        self._lock = threading.Lock()

    def create_point(self, R: float) -> float:
        """Register an R-point as pending and return its key"""
        with self._lock:
            self.points[R] = {
                "status": PointStatus.PENDING,
                "message": "Point created",
                "fields": {},
            }
        return R

    def update_point(
        self,
        R: float,
        status: PointStatus = None,
        message: str = None,
        **fields,
    ):
        """Update point status and merge result columns"""
        with self._lock:
            if R not in self.points:
                return

            if status:
                self.points[R]["status"] = status
            if message:
                self.points[R]["message"] = message
            self.points[R]["fields"].update({k: v for k, v in fields.items() if v is not None})

    def get_point(self, R: float) -> ResultRow:
        """Get one output row"""
        with self._lock:
            if R not in self.points:
                return ResultRow(R=R, status=PointStatus.FAILED, message="Point not found")

            point = self.points[R]
            return ResultRow(R=R, status=point["status"], message=point["message"], **point["fields"])

    def rows(self) -> List[ResultRow]:
        """All rows in ascending R"""
        return [self.get_point(R) for R in sorted(self.points)]

    def failed(self) -> List[float]:
        with self._lock:
            return sorted(R for R, p in self.points.items() if p["status"] == PointStatus.FAILED)
