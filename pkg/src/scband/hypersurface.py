"""Gauss-equation bookkeeping for hypersurfaces and sphere-product curvature.

The second fundamental form of a product of round spheres is measured on
an explicit hyperspherical parametrisation with finite differences, so the
closed-form values are checked rather than assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from scband.errors import DomainError, NumericalFailure


@dataclass(frozen=True)
class PrincipalCurvatures:
    """Principal curvatures c_1..c_{n-1} of a hypersurface of S^n or R^n."""

    values: tuple[float, ...]
    n: int
    ambient: Literal["sphere", "euclidean"] = "sphere"

    def __post_init__(self):
        if self.ambient not in ("sphere", "euclidean"):
            raise DomainError(f"unknown ambient {self.ambient!r}")
        if self.n < 2:
            raise DomainError("ambient dimension must be at least 2")
        vals = tuple(float(c) for c in self.values)
        if len(vals) != self.n - 1:
            raise DomainError(f"need n-1={self.n - 1} principal curvatures, got {len(vals)}")
        object.__setattr__(self, "values", vals)


def gauss_scalar_curvature(pc: PrincipalCurvatures) -> float:
    """Intrinsic Sc from the Gauss equation: Sc(S^{n-1}) + (sum c)^2 - sum c^2."""
    c = np.asarray(pc.values)
    sc = float(c.sum() ** 2 - (c * c).sum())
    if pc.ambient == "sphere":
        sc += (pc.n - 1) * (pc.n - 2)
    return sc


def curvature_lower_bound(n: int, k: int) -> float:
    """``sqrt(n - k - 1) / k``: lower bound on sup |c_ij| in S^n, codimension k."""
    if not 1 <= k <= n - 2:
        raise DomainError(f"codimension k={k} outside 1..n-2 for n={n}")
    return math.sqrt(n - k - 1) / k


# -- explicit sphere products ------------------------------------------------


def _sphere_point(angles: np.ndarray) -> np.ndarray:
    """Hyperspherical coordinates on S^d, d = len(angles)."""
    d = angles.size
    x = np.empty(d + 1)
    s = 1.0
    for i in range(d):
        x[i] = s * math.cos(angles[i])
        s *= math.sin(angles[i])
    x[d] = s
    return x


def _product_point(dims: Sequence[int], angles: np.ndarray) -> np.ndarray:
    scale = 1.0 / math.sqrt(len(dims))
    parts, i = [], 0
    for d in dims:
        parts.append(scale * _sphere_point(angles[i:i + d]))
        i += d
    return np.concatenate(parts)


_FD1 = ((-2, 1 / 12), (-1, -8 / 12), (1, 8 / 12), (2, -1 / 12))


def _derivatives(f, u: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    """Jacobian (d, N) and Hessian (d, d, N) by fourth-order central differences."""
    d = u.size
    e = np.eye(d) * h
    jac = np.array([sum(w * f(u + s * e[a]) for s, w in _FD1) / h for a in range(d)])
    hess = np.empty((d, d, jac.shape[1]))
    for a in range(d):
        for b in range(a, d):
            if a == b:
                v = (-f(u + 2 * e[a]) + 16 * f(u + e[a]) - 30 * f(u) + 16 * f(u - e[a]) - f(u - 2 * e[a]))
                hess[a, a] = v / (12 * h * h)
            else:
                v = sum(w * sum(w2 * f(u + s * e[a] + s2 * e[b]) for s2, w2 in _FD1) for s, w in _FD1)
                hess[a, b] = hess[b, a] = v / (h * h)
    return jac, hess


def second_fundamental_form(f, u, h: float = 1e-3, extra_tangent: np.ndarray | None = None):
    """Vector-valued second fundamental form of ``f`` at ``u`` in an orthonormal tangent frame.

    Returns ``(normals, shapes)`` where ``normals`` is an orthonormal basis
    (k, N) of the normal space and ``shapes[j]`` the symmetric shape matrix
    for ``normals[j]``.  ``extra_tangent`` removes one more direction from
    the normal space (the position vector for submanifolds of the unit
    sphere).
    """
    u = np.asarray(u, dtype=float)
    jac, hess = _derivatives(f, u, h)
    span = jac if extra_tangent is None else np.vstack([jac, extra_tangent])
    q, _ = np.linalg.qr(span.T, mode="complete")
    normals = q[:, span.shape[0]:].T
    # orthonormalise the tangent frame: jac = L E with E orthonormal rows
    g = jac @ jac.T
    lower = np.linalg.cholesky(g)
    inv = np.linalg.inv(lower)
    shapes = np.einsum("ab,bcN,dc,jN->jad", inv, hess, inv, normals)
    return normals, 0.5 * (shapes + shapes.transpose(0, 2, 1))


def max_normal_curvature(shapes: np.ndarray, iters: int = 200) -> float:
    """``max_{|e|=1} |II(e, e)|`` for a stack of shape matrices.

    Equals the largest principal curvature over all unit normals.  Seeded
    at every eigenvector of every shape matrix and polished by the
    higher-order power iteration ``e <- sum_j (e S_j e) S_j e``.
    """
    def value(e):
        return float(np.linalg.norm(np.einsum("a,jab,b->j", e, shapes, e)))

    seeds = [v for s in shapes for v in np.linalg.eigh(s)[1].T]
    best = 0.0
    for e in seeds:
        for _ in range(iters):
            coef = np.einsum("a,jab,b->j", e, shapes, e)
            nxt = np.einsum("j,jab,b->a", coef, shapes, e)
            nrm = np.linalg.norm(nxt)
            if nrm == 0:
                break
            nxt /= nrm
            if np.linalg.norm(nxt - e) < 1e-14:
                e = nxt
                break
            e = nxt
        best = max(best, value(e))
    return best


def sphere_product_curvature(
    factor_dims: Sequence[int], ambient: Literal["euclidean", "sphere"] = "euclidean"
) -> float:
    """Max principal curvature of ``S^{n_1}(1/sqrt k) x ... x S^{n_k}(1/sqrt k)``.

    The product sits in the unit sphere.  ``ambient="euclidean"`` measures
    the second fundamental form in the surrounding Euclidean space (value
    ``sqrt(k)``); ``ambient="sphere"`` only uses normals tangent to the unit
    sphere (value ``sqrt(k - 1)``, e.g. 1 for the Clifford torus in S^3).
    """
    dims = [int(d) for d in factor_dims]
    if not dims:
        raise DomainError("need at least one sphere factor")
    if any(d < 1 for d in dims):
        raise DomainError("sphere factors must have dimension >= 1")
    if ambient not in ("euclidean", "sphere"):
        raise DomainError(f"unknown ambient {ambient!r}")
    # generic point away from coordinate singularities
    u = np.concatenate([0.6 + 0.37 * np.arange(d) for d in dims])
    f = lambda a: _product_point(dims, a)  # noqa: E731
    extra = f(u)[None, :] if ambient == "sphere" else None
    normals, shapes = second_fundamental_form(f, u, extra_tangent=extra)
    if normals.shape[0] == 0:
        return 0.0
    value = max_normal_curvature(shapes)
    if not math.isfinite(value):
        raise NumericalFailure("second fundamental form evaluation failed")
    return value
