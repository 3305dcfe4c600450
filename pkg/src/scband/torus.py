"""Recursive codimension-one tori in Euclidean unit balls.

Start from the unit circle Y(2).  A pair node scales two tori by c1, c2
with ``c1**2 + c2**2 = 1`` and ``c1 r1 = c2 r2`` and takes their product, a
codimension-two torus of normal focal radius ``r = c1 r1``.  An offset
node takes the boundary of its ``r/2``-neighbourhood and rescales it back
into the unit ball, giving focal radius ``r / (2 + r)``.  Y(3) is the
round torus around the unit circle lifted to R^3.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Literal

import numpy as np
from scipy.spatial import cKDTree

from scband.errors import DomainError

MAX_SAMPLED_DIM = 5


def combine_pair(r1: float, r2: float) -> tuple[float, float, float]:
    """Scales (c1, c2) and focal radius of ``c1 Y1 x c2 Y2``."""
    if not (r1 > 0 and r2 > 0):
        raise DomainError("focal radii must be positive")
    s = math.hypot(r1, r2)
    return r2 / s, r1 / s, r1 * r2 / s


def offset_radius(r_cross: float) -> float:
    """Focal radius of the rescaled ``r/2``-tube boundary around a torus of focal radius r."""
    if not r_cross > 0:
        raise DomainError("focal radius must be positive")
    return r_cross / (2.0 + r_cross)


# -- construction tree -----------------------------------------------------


@dataclass(frozen=True)
class TorusConstruction:
    kind: Literal["circle", "lift", "pair", "offset"]
    ambient_dim: int
    focal_radius: float
    left: "TorusConstruction | None" = None
    right: "TorusConstruction | None" = None
    c1: float = 1.0
    c2: float = 1.0
    delta: float = 0.0
    rescale: float = 1.0

    def __post_init__(self):
        r = self.focal_radius
        if not 0 < r <= 1:
            raise DomainError(f"focal radius {r} outside (0, 1]")
        if self.kind == "circle":
            if self.ambient_dim != 2 or r != 1.0:
                raise DomainError("circle node is the unit circle in R^2")
        elif self.kind == "pair":
            ok = (
                abs(self.c1**2 + self.c2**2 - 1) <= 1e-12
                and abs(self.c1 * self.left.focal_radius - self.c2 * self.right.focal_radius) <= 1e-12
            )
            if not ok:
                raise DomainError("pair scales violate c1^2 + c2^2 = 1, c1 r1 = c2 r2")
        elif self.kind == "offset":
            rx = self.left.focal_radius
            if abs(self.delta - rx / 2) > 1e-12 or abs(r - rx / (2 + rx)) > 1e-12:
                raise DomainError("offset node must use delta = r/2 and radius r/(2+r)")

    @property
    def codim(self) -> int:
        return 2 if self.kind in ("pair", "lift") else 1

    @property
    def n_angles(self) -> int:
        if self.kind == "circle":
            return 1
        if self.kind == "lift":
            return self.left.n_angles
        if self.kind == "pair":
            return self.left.n_angles + self.right.n_angles
        return self.left.n_angles + 1


def circle() -> TorusConstruction:
    return TorusConstruction("circle", 2, 1.0)


def lift(inner: TorusConstruction) -> TorusConstruction:
    """``inner`` viewed in R^{d+1}; its focal radius does not change."""
    return TorusConstruction("lift", inner.ambient_dim + 1, inner.focal_radius, left=inner)


def pair(left: TorusConstruction, right: TorusConstruction) -> TorusConstruction:
    c1, c2, r = combine_pair(left.focal_radius, right.focal_radius)
    return TorusConstruction("pair", left.ambient_dim + right.ambient_dim, r, left, right, c1=c1, c2=c2)


def offset(inner: TorusConstruction) -> TorusConstruction:
    if inner.codim != 2:
        raise DomainError("offsets are taken around codimension-two tori")
    rx = inner.focal_radius
    delta = rx / 2
    return TorusConstruction(
        "offset", inner.ambient_dim, offset_radius(rx), left=inner, delta=delta, rescale=1 / (1 + delta)
    )


@lru_cache(maxsize=None)
def build(n: int) -> TorusConstruction:
    """Y(n) in B^n; odd n pairs Y(floor(n/2)) with Y(ceil(n/2))."""
    if n < 2:
        raise DomainError("tori start in dimension 2")
    if n == 2:
        return circle()
    if n == 3:
        return offset(lift(circle()))
    half = n // 2
    return offset(pair(build(half), build(n - half)))


def focal_radius_table(n_max: int) -> dict[int, float]:
    """r(n) for 2 <= n <= n_max from the recurrences (no geometry)."""
    if n_max < 2:
        raise DomainError("n_max must be at least 2")
    r = {2: 1.0, 3: offset_radius(1.0)}
    for n in range(4, n_max + 1):
        half = n // 2
        if n % 2 == 0:
            r[n] = r[half] / (2 * math.sqrt(2) + r[half])
        else:
            r[n] = offset_radius(combine_pair(r[half], r[half + 1])[2])
    return {k: v for k, v in r.items() if k <= n_max}


def spherical_width_lower_bound(n: int) -> float:
    """Lower bound on the torical width of the unit n-sphere.

    Twice the focal radius of Y(n), except n = 3 where the Clifford torus
    gives pi/2.
    """
    if n < 2:
        raise DomainError("n must be at least 2")
    if n == 3:
        return math.pi / 2
    return 2.0 * focal_radius_table(n)[n]


def lipschitz_lower_bound(n: int, sigma: float, d: float) -> float:
    """``(d / 2 pi) sqrt(sigma n / (n - 1))``."""
    if n < 2 or not sigma > 0 or not d > 0:
        raise DomainError("need n >= 2, sigma > 0, d > 0")
    return d / (2 * math.pi) * math.sqrt(sigma * n / (n - 1))


def crossover_vs_classical(n_range: Iterable[int] = range(2, 21), c: float = 1 / 3) -> int:
    """Smallest n where ``c / (pi sqrt n)`` exceeds ``n / (2**n pi)``."""
    for n in n_range:
        if c / (math.pi * math.sqrt(n)) > n / (2.0**n * math.pi):
            return n
    raise DomainError("no crossover in the given range")


def subsphere_data(rho: float) -> tuple[float, float]:
    """Focal radius and curvature of a round subsphere of Euclidean radius rho in S^n."""
    if not 0 < rho <= 1:
        raise DomainError("rho must lie in (0, 1]")
    return math.asin(rho), math.sqrt(1 - rho * rho) / rho


# -- sampling and the brute-force oracle ----------------------------------


@dataclass(frozen=True)
class PointCloud:
    """Sampled submanifold with an orthonormal normal frame per point.

    ``frames`` has shape (N, codim, d); ``normals`` is the single normal of a
    hypersurface cloud.
    """

    points: np.ndarray
    frames: np.ndarray

    def __post_init__(self):
        p, f = self.points, self.frames
        if p.ndim != 2 or f.ndim != 3 or f.shape[0] != p.shape[0] or f.shape[2] != p.shape[1]:
            raise DomainError("inconsistent point cloud shapes")
        if np.max(np.abs(np.linalg.norm(f, axis=2) - 1.0)) > 1e-10:
            raise DomainError("normal frames must be unit length")

    @property
    def normals(self) -> np.ndarray | None:
        return self.frames[:, 0, :] if self.frames.shape[1] == 1 else None

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def to_csv(self, path) -> None:
        d = self.dim
        c = self.frames.shape[1]
        header = [f"x{i}" for i in range(d)]
        header += [f"n{i}" for i in range(d)] if c == 1 else [f"n{j}_{i}" for j in range(c) for i in range(d)]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            flat = self.frames.reshape(len(self.points), -1)
            for p, nv in zip(self.points, flat):
                w.writerow([f"{x:.12g}" for x in p] + [f"{x:.12g}" for x in nv])


def _sample(node: TorusConstruction, k: int) -> tuple[np.ndarray, np.ndarray]:
    if node.kind == "circle":
        a = 2 * np.pi * np.arange(k) / k
        pts = np.stack([np.cos(a), np.sin(a)], axis=1)
        return pts, pts[:, None, :].copy()
    if node.kind == "lift":
        pts, fr = _sample(node.left, k)
        m = len(pts)
        pts = np.hstack([pts, np.zeros((m, 1))])
        fr = np.concatenate([fr, np.zeros((m, fr.shape[1], 1))], axis=2)
        up = np.zeros((m, 1, pts.shape[1]))
        up[:, 0, -1] = 1.0
        return pts, np.concatenate([fr, up], axis=1)
    if node.kind == "pair":
        p1, f1 = _sample(node.left, k)
        p2, f2 = _sample(node.right, k)
        m1, m2 = len(p1), len(p2)
        d1, d2 = p1.shape[1], p2.shape[1]
        pts = np.empty((m1, m2, d1 + d2))
        pts[:, :, :d1] = node.c1 * p1[:, None, :]
        pts[:, :, d1:] = node.c2 * p2[None, :, :]
        c1, c2 = f1.shape[1], f2.shape[1]
        fr = np.zeros((m1, m2, c1 + c2, d1 + d2))
        fr[:, :, :c1, :d1] = f1[:, None, :, :]
        fr[:, :, c1:, d1:] = f2[None, :, :, :]
        return pts.reshape(-1, d1 + d2), fr.reshape(m1 * m2, c1 + c2, d1 + d2)
    # offset around a codimension-two core
    core, fr = _sample(node.left, k)
    a = 2 * np.pi * np.arange(k) / k
    nu = np.cos(a)[None, :, None] * fr[:, None, 0, :] + np.sin(a)[None, :, None] * fr[:, None, 1, :]
    pts = (core[:, None, :] + node.delta * nu) * node.rescale
    d = core.shape[1]
    return pts.reshape(-1, d), nu.reshape(-1, 1, d)


def embed_and_sample(construction: TorusConstruction, resolution: int) -> PointCloud:
    """Points and unit normal frames, ``resolution`` samples per angle."""
    if construction.ambient_dim > MAX_SAMPLED_DIM:
        raise DomainError(f"ambient dimension above {MAX_SAMPLED_DIM} is not sampled")
    if resolution < 16:
        raise DomainError("resolution must be at least 16 per angle")
    pts, fr = _sample(construction, int(resolution))
    return PointCloud(pts, fr)


def _normal_directions(cloud: PointCloud, n_dirs: int) -> np.ndarray:
    """Unit normal vectors to shoot along, shape (N, m, d)."""
    fr = cloud.frames
    if fr.shape[1] == 1:
        return np.concatenate([fr, -fr], axis=1)
    if fr.shape[1] == 2:
        a = 2 * np.pi * np.arange(n_dirs) / n_dirs
        return np.cos(a)[None, :, None] * fr[:, None, 0, :] + np.sin(a)[None, :, None] * fr[:, None, 1, :]
    raise DomainError("normal frames of codimension above 2 are not supported")


def brute_force_focal_radius(
    cloud: PointCloud,
    r_max: float = 2.0,
    rel_tol: float = 1e-3,
    penetration: float = 0.02,
    n_neighbors: int | None = None,
    global_queries: int = 4096,
    global_dirs: int = 8,
) -> float:
    """Normal injectivity radius estimated from the sample alone.

    A radius r is rejected when either

    * two neighbouring normal segments of length r have crossed, i.e. the
      image pair ``(q_i, q_j)`` has reversed orientation relative to the
      base pair ``(p_i, p_j)`` (local collisions at focal points), or
    * the end of some normal segment lies closer than ``(1 - penetration) r``
      to another sample (the segment re-approaches a distant sheet).

    With ``b = p_j - p_i`` the orientation ``<q_j - q_i, b>`` is affine in r,
    so the first crossing over all unit normal directions is found in closed
    form.  The second test is a large-scale event; it runs on an evenly
    strided subset of at most ``global_queries`` base points and
    ``global_dirs`` normal directions, and is refined by bisection only if
    it fires below the local radius.  Returns ``inf`` if nothing collides
    up to ``r_max``.
    """
    pts = cloud.points
    fr = cloud.frames
    n_pts, d = pts.shape
    codim = fr.shape[1]
    if n_pts < 4:
        raise DomainError("point cloud too small")
    if codim > 2:
        raise DomainError("normal frames of codimension above 2 are not supported")
    k = n_neighbors or 2 * (d - codim)
    tree = cKDTree(pts)
    dist, nbr = tree.query(pts, k=k + 1)
    if np.any(dist[:, 1] <= 1e-12):
        raise DomainError("duplicate points in cloud")
    nbr = nbr[:, 1:]

    # <b + r (v_j - v_i), b> = |b|^2 - r * speed; speed maximised over v
    r_loc = math.inf
    for c in range(k):
        j = nbr[:, c]
        b = pts[j] - pts
        proj = np.einsum("iak,ik->ia", fr[j] - fr, b)
        speed = np.linalg.norm(proj, axis=1)
        ok = speed > 0
        if np.any(ok):
            r_loc = min(r_loc, float(np.min(np.einsum("ik,ik->i", b[ok], b[ok]) / speed[ok])))
    if r_loc > r_max:
        r_loc = math.inf

    stride = max(1, n_pts // global_queries)
    sub = pts[::stride]
    gdirs = _normal_directions(PointCloud(sub, fr[::stride]), global_dirs)

    def global_(r: float) -> bool:
        for j in range(gdirs.shape[1]):
            hit, _ = tree.query(sub + r * gdirs[:, j, :], k=1, distance_upper_bound=r * (1.0 - penetration))
            if np.any(np.isfinite(hit)):
                return True
        return False

    top = min(r_loc, r_max)
    if not global_(top * (1.0 - rel_tol)):
        return r_loc
    ladder = np.geomspace(min(1e-3, top / 2), top, 40)
    if global_(ladder[0]):
        raise DomainError("sampling too coarse: collision at the smallest radius")
    lo, hi = ladder[0], top
    for r in ladder[1:]:
        if global_(r):
            hi = r
            break
        lo = r
    while hi - lo > rel_tol * lo * 0.5:
        mid = 0.5 * (lo + hi)
        if global_(mid):
            hi = mid
        else:
            lo = mid
    return float(0.5 * (lo + hi))
