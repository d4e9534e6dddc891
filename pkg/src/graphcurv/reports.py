"""Check reports and verification configuration shared by the harness."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import DomainError
from .operators import _check_dimension

__all__ = ["CheckReport", "VerifyConfig", "dimension_token", "to_jsonable"]

DEFAULT_T_FACTORS = (0.01, 0.05, 0.1, 0.5, 1.0, 2.0, 3.0)


def dimension_token(n) -> Any:
    """JSON-safe rendering of a dimension parameter (infinity becomes "inf")."""
    return "inf" if math.isinf(n) else float(n)


def to_jsonable(obj) -> Any:
    """Recursively convert numpy containers/scalars into plain JSON values."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    return obj


@dataclass(frozen=True, eq=False)
class CheckReport:
    """Outcome of one verification check.

    ``min_slack`` is the worst margin over the evaluated inequalities,
    normalized by 1 + magnitude of the compared quantities; negative values
    mean the right-hand side was undercut.  It is None when no inequality was
    evaluated (e.g. a hypothesis gate failed).  ``passed`` holds exactly when
    the hypotheses are satisfied and ``min_slack >= -tol_report``.
    """

    check_name: str
    hypotheses_satisfied: bool
    hypothesis_failures: tuple[str, ...]
    min_slack: float | None
    samples: int
    t_grid: tuple[float, ...]
    seed: int | None
    passed: bool
    tol_report: float
    details: dict[str, Any] = field(default_factory=dict)

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "check": self.check_name,
            "hypotheses_satisfied": bool(self.hypotheses_satisfied),
            "min_slack": None if self.min_slack is None else float(self.min_slack),
            "samples": int(self.samples),
            "seed": None if self.seed is None else int(self.seed),
            "passed": bool(self.passed),
            "details": to_jsonable(
                {
                    **self.details,
                    "hypothesis_failures": list(self.hypothesis_failures),
                    "t_grid": list(self.t_grid),
                    "tol_report": self.tol_report,
                }
            ),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), separators=(",", ":"))


@dataclass(frozen=True)
class VerifyConfig:
    """Parameters of a verification run.

    t_grid defaults to ``DEFAULT_T_FACTORS`` times T, spanning t << T, t ~ T
    and t > T; all grid points must lie in (0, 3T].
    """

    K: float = 1.0
    T: float = 1.0
    n: float = math.inf
    samples: int = 20
    seed: int = 42
    t_grid: tuple[float, ...] | None = None
    tol_report: float = 1e-8

    def __post_init__(self):
        if not (self.K > 0) or not math.isfinite(self.K):
            raise DomainError(f"K must be a positive finite real, got {self.K!r}")
        if not (self.T > 0) or not math.isfinite(self.T):
            raise DomainError(f"T must be a positive finite real, got {self.T!r}")
        _check_dimension(self.n)
        if int(self.samples) < 1:
            raise DomainError(f"samples must be >= 1, got {self.samples!r}")
        if not (self.tol_report > 0):
            raise DomainError(f"tol_report must be positive, got {self.tol_report!r}")
        grid = self.t_grid
        if grid is None:
            grid = tuple(f * self.T for f in DEFAULT_T_FACTORS)
        grid = tuple(float(t) for t in grid)
        for t in grid:
            if not (0 < t <= 3 * self.T * (1 + 1e-12)):
                raise DomainError(f"t_grid values must lie in (0, 3T], got {t!r}")
        object.__setattr__(self, "t_grid", grid)
        object.__setattr__(self, "samples", int(self.samples))
        object.__setattr__(self, "seed", int(self.seed))
