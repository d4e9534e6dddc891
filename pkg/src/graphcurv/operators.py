"""Laplacian, squared-gradient forms, and their local matrix representations.

Vertex functions are arrays in canonical order; an extra trailing axis is
treated as a batch of functions.  The operators follow

    lap f(x)        = sum_y q(x, y) (f(y) - f(x))
    gamma(f, h)     = (lap(f h) - f lap h - h lap f) / 2
    gamma2(f, h)    = (lap gamma(f, h) - gamma(f, lap h) - gamma(h, lap f)) / 2

All three are invariant under adding constants, so the quadratic forms at a
vertex x are assembled on ball(x, 2) with the x coordinate removed: that loses
nothing and makes the gamma form positive definite on the 1-sphere.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .graph import MeasuredWeightedGraph, ball_indices

__all__ = [
    "LocalForms",
    "laplacian_apply",
    "symmetrized_laplacian",
    "gamma",
    "gamma2",
    "local_forms",
]

_PAIR_CHUNK = 4096


def _check_dimension(n):
    """Validate a curvature-dimension parameter n in (0, inf]."""
    if isinstance(n, bool) or not isinstance(n, numbers.Real):
        raise DomainError(f"dimension must be a real in (0, inf], got {n!r}")
    if math.isnan(n) or n <= 0:
        raise DomainError(f"dimension must be positive, got {n!r}")


def _per_vertex(vec: np.ndarray, arr: np.ndarray) -> np.ndarray:
    """Multiply along the vertex axis, broadcasting over trailing batch axes."""
    return vec.reshape(vec.shape + (1,) * (arr.ndim - 1)) * arr


def _as_function(g: MeasuredWeightedGraph, f) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.ndim not in (1, 2) or f.shape[0] != g.n_vertices:
        raise DomainError(
            f"vertex function must have leading axis of length {g.n_vertices}, got shape {f.shape}"
        )
    return f


def laplacian_apply(g: MeasuredWeightedGraph, f) -> np.ndarray:
    """Pointwise lap f(x) = sum_y q(x, y)(f(y) - f(x)).  The generator L = -lap."""
    f = _as_function(g, f)
    return g.q_matrix @ f - _per_vertex(g.degrees, f)


def symmetrized_laplacian(g: MeasuredWeightedGraph) -> np.ndarray:
    """Matrix M^(1/2) L M^(-1/2), M = diag(m): symmetric with the spectrum of L.

    Entries are -w(x, y)/sqrt(m(x) m(y)) off the diagonal and Deg(x) on it,
    which is exactly symmetric by construction.
    """
    s = np.sqrt(g.m)
    mat = -(g.w / np.outer(s, s))
    np.fill_diagonal(mat, g.degrees)
    return mat


def gamma(g: MeasuredWeightedGraph, f, h=None) -> np.ndarray:
    """Squared-gradient form gamma(f, h) = (lap(fh) - f lap h - h lap f)/2.

    Equals (1/2) sum_y q(x, y)(f(y) - f(x))(h(y) - h(x)) pointwise.
    """
    f = _as_function(g, f)
    h = f if h is None else _as_function(g, h)
    return 0.5 * (laplacian_apply(g, f * h) - f * laplacian_apply(g, h) - h * laplacian_apply(g, f))


def gamma2(g: MeasuredWeightedGraph, f, h=None) -> np.ndarray:
    """Iterated form gamma2(f, h) = (lap gamma(f, h) - gamma(f, lap h) - gamma(h, lap f))/2."""
    f = _as_function(g, f)
    h = f if h is None else _as_function(g, h)
    lf = laplacian_apply(g, f)
    lh = lf if h is f else laplacian_apply(g, h)
    return 0.5 * (laplacian_apply(g, gamma(g, f, h)) - gamma(g, f, lh) - gamma(g, h, lf))


@dataclass(frozen=True, eq=False)
class LocalForms:
    """Quadratic-form data of gamma2, gamma and lap at a vertex.

    Coordinates are the values f(v) for v in ``basis`` = ball(center, 2) with
    the center removed (f(center) = 0).  For such f:

        f' A f  = gamma2(f)(center)
        f' B f  = gamma(f)(center)      (diagonal, (1/2) q(center, y) on the 1-sphere)
        c . f   = lap f(center)
    """

    center: str
    basis: tuple[str, ...]
    A: np.ndarray
    B: np.ndarray
    c: np.ndarray


def local_forms(g: MeasuredWeightedGraph, x: str, n=math.inf) -> LocalForms:
    """Assemble the local matrices at x by evaluating the forms on basis pairs.

    A is filled by polarization of gamma2 (one code path with the pointwise
    operator, so the matrices stay oracle-checkable); B and c have closed
    forms.  ``n`` is validated but does not enter the matrices; the (1/n)
    correction belongs to the curvature pencil.
    """
    _check_dimension(n)
    i = g.index(x)
    idx = ball_indices(g, i, 2)
    bidx = idx[1:]
    b = len(bidx)
    A = np.zeros((b, b))
    if b:
        E = np.zeros((g.n_vertices, b))
        E[bidx, np.arange(b)] = 1.0
        rows, cols = np.meshgrid(np.arange(b), np.arange(b), indexing="ij")
        rows = rows.ravel()
        cols = cols.ravel()
        for start in range(0, b * b, _PAIR_CHUNK):
            sl = slice(start, start + _PAIR_CHUNK)
            A.flat[sl] = gamma2(g, E[:, rows[sl]], E[:, cols[sl]])[i]
        A = 0.5 * (A + A.T)
    q_row = g.q_matrix[i, bidx]
    return LocalForms(
        center=x,
        basis=tuple(g.vertices[j] for j in bidx),
        A=A,
        B=np.diag(0.5 * q_row),
        c=np.array(q_row),
    )
