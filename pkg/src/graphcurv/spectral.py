"""Eigenvalues of L, ground states of L/2 + rho, and the exact Cheeger constant."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalFailure, PerronFailure, TooLarge
from .graph import MeasuredWeightedGraph
from .operators import symmetrized_laplacian

__all__ = [
    "GroundState",
    "lambda1",
    "ground_state",
    "spectral_positivity",
    "cheeger_constant",
    "CHEEGER_LIMIT",
]

CHEEGER_LIMIT = 24
_POSITIVITY_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class GroundState:
    """Smallest eigenvalue E of L/2 + rho and its eigenvector phi.

    phi is normalized to 1 in l2(m), sign-fixed so its m-weighted sum is
    positive; on a connected graph the Perron-Frobenius theorem makes it
    strictly positive.
    """

    E: float
    phi: np.ndarray
    positive: bool


def _eigh(mat: np.ndarray):
    try:
        return np.linalg.eigh(mat)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigendecomposition failed: {exc}") from None


def lambda1(g: MeasuredWeightedGraph) -> float:
    """Second-smallest eigenvalue of L in l2(m) (the smallest is 0, simple)."""
    if g.n_vertices < 2:
        raise DomainError("lambda1 needs at least two vertices")
    vals = np.linalg.eigvalsh(symmetrized_laplacian(g))
    return float(vals[1])


def _schrodinger_matrix(g: MeasuredWeightedGraph, rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=float)
    if rho.shape != (g.n_vertices,):
        raise DomainError(f"rho must have shape ({g.n_vertices},), got {rho.shape}")
    return 0.5 * symmetrized_laplacian(g) + np.diag(rho)


def ground_state(g: MeasuredWeightedGraph, rho) -> GroundState:
    """Perron-Frobenius ground state of L/2 + rho in l2(m).

    Raises PerronFailure when the sign-fixed eigenvector is not strictly
    positive, which signals numerical degeneracy: the operator has non-positive
    off-diagonal entries and the graph is connected, so in exact arithmetic the
    ground state is positive for any rho.
    """
    vals, vecs = _eigh(_schrodinger_matrix(g, rho))
    u = vecs[:, 0]
    phi = u / np.sqrt(g.m)
    weighted_sum = float(g.m @ phi)
    if weighted_sum < 0:
        phi = -phi
    elif weighted_sum == 0 and phi[np.argmax(np.abs(phi))] < 0:
        phi = -phi
    positive = bool(phi.min() > _POSITIVITY_RTOL * phi.max())
    if not positive:
        raise PerronFailure(
            "ground state of L/2 + rho is not strictly positive after sign fixing"
        )
    return GroundState(E=float(vals[0]), phi=phi, positive=positive)


def spectral_positivity(g: MeasuredWeightedGraph, rho) -> tuple[float, bool]:
    """Smallest eigenvalue E of L/2 + rho and whether E > 0."""
    vals = np.linalg.eigvalsh(_schrodinger_matrix(g, rho))
    E = float(vals[0])
    return E, E > 0


def cheeger_constant(g: MeasuredWeightedGraph) -> float:
    """Exact Cheeger constant by enumerating all 2^(n-1) anchored subsets.

    h = min |boundary U| / vol U over nonempty U with vol U <= vol V / 2, where
    |boundary U| sums w over edges leaving U and vol U sums m over U.  Subsets
    U containing vertex 0 are enumerated; U and its complement are both tested
    against the volume constraint (ties at vol V / 2 are admissible).
    """
    n = g.n_vertices
    if n > CHEEGER_LIMIT:
        raise TooLarge(f"exact Cheeger enumeration is limited to {CHEEGER_LIMIT} vertices, got {n}")
    if n == 1:
        return math.inf
    m = g.m
    vol_total = float(m.sum())
    half = 0.5 * vol_total
    total_masks = 1 << (n - 1)
    full_mask = total_masks - 1
    best = math.inf
    chunk = 1 << 16
    for start in range(0, total_masks, chunk):
        masks = np.arange(start, min(start + chunk, total_masks), dtype=np.int64)
        members = np.ones((len(masks), n))
        for bit in range(n - 1):
            members[:, bit + 1] = (masks >> bit) & 1
        vol_u = members @ m
        reach = members @ g.w
        cut = reach.sum(axis=1) - (reach * members).sum(axis=1)
        vol_c = vol_total - vol_u

        side_u = vol_u <= half
        if side_u.any():
            best = min(best, float((cut[side_u] / vol_u[side_u]).min()))
        side_c = (vol_c <= half) & (masks != full_mask)
        if side_c.any():
            best = min(best, float((cut[side_c] / vol_c[side_c]).min()))
    return best
