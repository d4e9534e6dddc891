"""Heat and Schroedinger semigroups, sup norms, and Kato constants.

The semigroup e^{-t(L+W)} (W a diagonal potential) is computed from one
symmetric eigendecomposition of M^(1/2)(L+W)M^(-1/2), which is reused across
all times; that is what the quadrature for the Kato constant needs.  Because
the off-diagonal entries of L+W are non-positive, the semigroup matrix is
entrywise non-negative and its sup-operator norm equals max_x (P_t^W 1)(x).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, NumericalFailure
from .graph import MeasuredWeightedGraph
from .operators import _per_vertex, symmetrized_laplacian

__all__ = [
    "Propagator",
    "heat_apply",
    "schrodinger_apply",
    "semigroup_sup_norm",
    "adaptive_simpson",
    "KatoResult",
    "kato_constant",
    "kato_condition_check",
    "kato_window_search",
]


class Propagator:
    """e^{-t(L+W)} backed by a single symmetric eigendecomposition."""

    def __init__(self, g: MeasuredWeightedGraph, potential=None):
        self._n = g.n_vertices
        mat = symmetrized_laplacian(g)
        if potential is not None:
            potential = np.asarray(potential, dtype=float)
            if potential.shape != (self._n,):
                raise DomainError(
                    f"potential must have shape ({self._n},), got {potential.shape}"
                )
            mat = mat + np.diag(potential)
        try:
            self.eigenvalues, self._basis = np.linalg.eigh(mat)
        except np.linalg.LinAlgError as exc:
            raise NumericalFailure(f"eigendecomposition failed: {exc}") from None
        self._sqrt_m = np.sqrt(g.m)
        self._inv_sqrt_m = 1.0 / self._sqrt_m

    def apply(self, t: float, f) -> np.ndarray:
        """Apply e^{-t(L+W)} to a vertex function (or a batch of columns)."""
        if t < 0:
            raise DomainError(f"time must be non-negative, got {t!r}")
        f = np.asarray(f, dtype=float)
        if f.shape[0] != self._n:
            raise DomainError(f"function must have leading axis {self._n}, got {f.shape}")
        coeff = self._basis.T @ _per_vertex(self._sqrt_m, f)
        coeff = _per_vertex(np.exp(-t * self.eigenvalues), coeff)
        return _per_vertex(self._inv_sqrt_m, self._basis @ coeff)

    def sup_norm(self, t: float) -> float:
        """The infinity-operator norm, max_x (P_t^W 1)(x) by positivity."""
        return float(self.apply(t, np.ones(self._n)).max())


def heat_apply(g: MeasuredWeightedGraph, t: float, f) -> np.ndarray:
    """Heat semigroup e^{-tL} applied to f."""
    return Propagator(g).apply(t, f)


def schrodinger_apply(g: MeasuredWeightedGraph, W, t: float, f) -> np.ndarray:
    """Perturbed semigroup e^{-t(L+W)} applied to f; W may have any sign."""
    return Propagator(g, W).apply(t, f)


def semigroup_sup_norm(g: MeasuredWeightedGraph, W, t: float) -> float:
    return Propagator(g, W).sup_norm(t)


def adaptive_simpson(
    func: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-9,
    max_depth: int = 30,
) -> tuple[float, float]:
    """Adaptive Simpson quadrature with Richardson extrapolation.

    Returns (value, error_estimate); the estimate is the sum of the accepted
    per-interval Richardson terms, which stays at or below ``tol`` whenever the
    recursion terminates before ``max_depth``.
    """
    if not (tol > 0):
        raise DomainError(f"tolerance must be positive, got {tol!r}")
    if a == b:
        return 0.0, 0.0
    if a > b:
        value, err = adaptive_simpson(func, b, a, tol, max_depth)
        return -value, err

    def simpson(fa, fm, fb, h):
        return h / 3.0 * (fa + 4.0 * fm + fb)

    def recurse(lo, hi, flo, fmid, fhi, whole, depth, budget):
        mid = 0.5 * (lo + hi)
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        flm = func(lm)
        frm = func(rm)
        h = 0.5 * (hi - lo)
        left = simpson(flo, flm, fmid, 0.5 * h)
        right = simpson(fmid, frm, fhi, 0.5 * h)
        estimate = (left + right - whole) / 15.0
        if depth >= max_depth or abs(estimate) < budget:
            return left + right + estimate, abs(estimate)
        lv, le = recurse(lo, mid, flo, flm, fmid, left, depth + 1, 0.5 * budget)
        rv, re = recurse(mid, hi, fmid, frm, fhi, right, depth + 1, 0.5 * budget)
        return lv + rv, le + re

    fa, fm, fb = func(a), func(0.5 * (a + b)), func(b)
    whole = simpson(fa, fm, fb, 0.5 * (b - a))
    return recurse(a, b, fa, fm, fb, whole, 0, tol)


@dataclass(eq=False)
class KatoResult:
    """Kato constant of a potential over [0, T] plus threshold comparisons.

    ``threshold_a`` = (1/2)(1 - e^(-KT/4)) and ``threshold_b`` =
    (1/4)(1 - e^(-KT/2)) are filled in once a comparison level K is known.
    """

    w_label: str
    T: float
    value: float
    quad_error: float
    threshold_a: float | None = None
    threshold_b: float | None = None
    K: float | None = None

    def to_json_dict(self) -> dict:
        return {
            "W_label": self.w_label,
            "T": self.T,
            "value": self.value,
            "quad_error": self.quad_error,
            "threshold_a": self.threshold_a,
            "threshold_b": self.threshold_b,
            "K": self.K,
        }


def kato_constant(
    g: MeasuredWeightedGraph,
    W,
    T: float,
    tol: float = 1e-9,
    label: str = "W",
) -> KatoResult:
    """k_T(W) = integral_0^T max_x (P_s W)(x) ds for a non-negative potential W.

    The integrand is smooth between switches of the maximizing vertex and
    bounded by max W, so adaptive Simpson at absolute tolerance ``tol`` is
    reliable; one heat eigendecomposition serves every quadrature node.
    """
    W = np.asarray(W, dtype=float)
    if W.shape != (g.n_vertices,):
        raise DomainError(f"W must have shape ({g.n_vertices},), got {W.shape}")
    if np.any(W < 0):
        raise DomainError("the Kato constant is defined for non-negative potentials")
    if not (T > 0) or not math.isfinite(T):
        raise DomainError(f"T must be a positive finite real, got {T!r}")
    heat = Propagator(g)

    def integrand(s: float) -> float:
        return float(heat.apply(s, W).max())

    value, err = adaptive_simpson(integrand, 0.0, T, tol=tol, max_depth=30)
    return KatoResult(w_label=label, T=float(T), value=value, quad_error=err)


def _thresholds(K: float, T: float) -> tuple[float, float]:
    return 0.5 * (1.0 - math.exp(-K * T / 4.0)), 0.25 * (1.0 - math.exp(-K * T / 2.0))


def kato_condition_check(
    g: MeasuredWeightedGraph,
    rho,
    K: float,
    T: float,
    variant: str = "b",
    strict: bool = False,
    tol: float = 1e-9,
) -> tuple[bool, KatoResult]:
    """Compare k_T((rho - K)_-) against the variant threshold.

    Variant "a" uses (1/2)(1 - e^(-KT/4)), variant "b" the smaller
    (1/4)(1 - e^(-KT/2)).  ``strict`` selects "<" instead of "<=", matching the
    theorems that state the hypothesis strictly.
    """
    if variant not in ("a", "b"):
        raise DomainError(f"variant must be 'a' or 'b', got {variant!r}")
    if not (K > 0) or not math.isfinite(K):
        raise DomainError(f"K must be a positive finite real, got {K!r}")
    rho = np.asarray(rho, dtype=float)
    W = np.maximum(K - rho, 0.0)
    result = kato_constant(g, W, T, tol=tol, label=f"(rho - K)_- with K={K:g}")
    result.threshold_a, result.threshold_b = _thresholds(K, T)
    result.K = float(K)
    bound = result.threshold_a if variant == "a" else result.threshold_b
    ok = result.value < bound if strict else result.value <= bound
    return bool(ok), result


def kato_window_search(
    g: MeasuredWeightedGraph,
    rho,
    K_grid,
    T_grid,
    variant: str = "b",
    strict: bool = False,
    tol: float = 1e-9,
) -> list[tuple[float, float]]:
    """All (K, T) grid pairs passing the Kato check, sorted by K descending."""
    admissible = []
    for K in K_grid:
        for T in T_grid:
            ok, _ = kato_condition_check(g, rho, float(K), float(T), variant, strict, tol)
            if ok:
                admissible.append((float(K), float(T)))
    admissible.sort(key=lambda pair: (-pair[0], pair[1]))
    return admissible
