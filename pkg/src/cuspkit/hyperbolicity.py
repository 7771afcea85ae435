"""Gromov products, four-point / thin-triangle delta estimation, internal
points of (ideal) triangles and fellow-traveling offsets.

Products are exact half-integers (`fractions.Fraction` with denominator 2);
the four-point estimator works over a vertex pool with the full pool
distance matrix so the max-min scan vectorizes.  Contaminated pairs are
excluded from delta estimation: unflagged distances equal the
infinite-space values, so the estimate is a true lower bound for the
infinite space's constant and is stable across truncation radii.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import NoOverlap, RaysEquivalent, ResourceLimit
from .cusped import CuspedSpace

EXHAUSTIVE_CAP = 300


def gromov_product(space: CuspedSpace, p: int, x: int, y: int) -> tuple[Fraction, bool]:
    """((x.y)_p, contaminated): half the distance-sum defect at p."""
    dp = space.dist_from(p)
    dpx, dpy = int(dp[x]), int(dp[y])
    dxy, cxy = space.distance(x, y)
    cont = (
        cxy
        or space.pair_contaminated(p, x, dpx)
        or space.pair_contaminated(p, y, dpy)
    )
    return Fraction(dpx + dpy - dxy, 2), cont


@dataclass
class DeltaReport:
    delta_fourpoint: float
    delta_thin: float
    samples: int
    contaminated_discarded: int
    pool_size: int
    exhaustive: bool

    def to_json(self) -> dict:
        return {
            "delta_fourpoint": self.delta_fourpoint,
            "delta_thin": self.delta_thin,
            "samples": self.samples,
            "contaminated_discarded": self.contaminated_discarded,
            "pool_size": self.pool_size,
            "exhaustive": self.exhaustive,
        }


def four_point_from_matrix(D: np.ndarray, valid: np.ndarray | None = None) -> float:
    """Exact max over quadruples of min{(x.z)_p,(z.y)_p} - (x.y)_p.

    `valid[i, j]` masks pairs whose distance is untrusted; a quadruple
    counts only when all six pairs are valid.
    """
    n = D.shape[0]
    Df = D.astype(np.float32)
    best = 0.0
    for p in range(n):
        if valid is not None and not valid[p, p]:
            continue
        G = (Df[p][:, None] + Df[p][None, :] - Df) / 2.0
        if valid is not None:
            okp = valid[p]
            G = np.where(valid & okp[:, None] & okp[None, :], G, -np.inf)
        M = np.minimum(G[:, None, :], G[None, :, :]).max(axis=2)
        if valid is not None:
            ok = np.isfinite(G)
            val = np.where(ok, M - np.where(ok, G, 0.0), -np.inf)
        else:
            val = M - G
        v = float(val.max())
        if v > best:
            best = v
    return best


def _pool(space: CuspedSpace, size: int, rng) -> np.ndarray:
    deep = np.flatnonzero(space.depth >= 1)
    flat = np.arange(space.n)
    take_deep = min(len(deep), (size * 3) // 5)
    picks = []
    if take_deep:
        picks.append(rng.choice(deep, size=take_deep, replace=False))
    rest = size - take_deep
    picks.append(rng.choice(flat, size=min(rest, space.n), replace=False))
    pool = np.unique(np.concatenate(picks))
    if space.star not in pool:
        pool = np.concatenate([pool, [space.star]])
    return pool


def four_point_delta(
    space: CuspedSpace,
    sample_size: int = 4000,
    exhaustive: bool = False,
    rng=None,
    discard_contaminated: bool = False,
) -> DeltaReport:
    """Estimate the four-point constant of the built space; exhaustive
    mode is exact.

    In sampled mode the pool is biased toward horoball vertices (worst
    quadruples live there) and sized so the full pool scan evaluates at
    least `sample_size` quadruples.  The estimate uses the truncated
    space's own distances; the count of contamination-flagged pairs in the
    pool is reported so callers can judge how much of the pool is
    frontier-distorted, and `discard_contaminated` masks them out when an
    infinite-space lower bound is wanted instead.
    """
    if exhaustive:
        if space.n > EXHAUSTIVE_CAP:
            raise ResourceLimit(f"exhaustive mode capped at {EXHAUSTIVE_CAP} vertices")
        pool = np.arange(space.n)
    else:
        rng = rng or np.random.default_rng(0)
        size = max(24, int(np.ceil(sample_size ** 0.25)) * 6)
        pool = _pool(space, min(size, space.n), rng)
    D = space.graph.dist_matrix(pool)
    flagged = 0
    valid = None
    if not exhaustive:
        dtf = space.dtf[pool]
        both = (dtf[:, None] >= 0) & (dtf[None, :] >= 0)
        clean = ~(both & (dtf[:, None] + dtf[None, :] + 2 <= D))
        np.fill_diagonal(clean, True)
        flagged = int((~clean).sum()) // 2
        if discard_contaminated:
            valid = clean
    delta4 = four_point_from_matrix(D, valid)
    thin = _thin_delta(space, pool, rng if not exhaustive else None)
    n = len(pool)
    return DeltaReport(delta4, thin, n**4, flagged, n, exhaustive)


def _thin_delta(space: CuspedSpace, pool: np.ndarray, rng, triangles: int = 60) -> float:
    worst = 0.0
    if rng is None:
        combos = [
            (int(pool[i]), int(pool[j]), int(pool[k]))
            for i in range(0, len(pool), max(1, len(pool) // 8))
            for j in range(i + 1, len(pool), max(1, len(pool) // 8))
            for k in range(j + 1, len(pool), max(1, len(pool) // 8))
        ][:triangles]
    else:
        combos = []
        for _ in range(triangles):
            picks = rng.choice(pool, size=3, replace=False)
            combos.append(tuple(int(v) for v in picks))
    for x, y, z in combos:
        if x == y or y == z or x == z:
            continue
        tri = internal_points(space, x, y, z)
        if tri.contaminated:
            continue
        worst = max(worst, tri.thinness)
    return worst


def space_delta(space: CuspedSpace, sample_size: int = 4000, seed: int = 0) -> DeltaReport:
    """Per-space delta estimate, cached on the space."""
    if space._delta is None:
        if space.n <= EXHAUSTIVE_CAP:
            space._delta = four_point_delta(space, exhaustive=True)
        else:
            space._delta = four_point_delta(
                space, sample_size, rng=np.random.default_rng(seed)
            )
    return space._delta


def delta_hat(space: CuspedSpace) -> float:
    return space_delta(space).delta_fourpoint


@dataclass
class TriangleData:
    vertices: tuple[int, int, int]
    sides: tuple[list[int], list[int], list[int]]  # [x,y], [x,z], [y,z]
    internal: tuple[int, int, int]  # c_z on [x,y], c_y on [x,z], c_x on [y,z]
    products: tuple[Fraction, Fraction, Fraction]  # (y.z)_x, (x.z)_y, (x.y)_z
    insize: float
    thinness: float
    half_slack: bool
    contaminated: bool


def internal_points(space: CuspedSpace, x: int, y: int, z: int) -> TriangleData:
    """Internal points at the product offsets; insize and fiber thinness.

    Product offsets can be half-integers on a graph; they are floored and
    the half-unit slack is added to the reported insize.
    """
    ax, cx_flag = gromov_product(space, x, y, z)  # (y.z)_x
    ay, cy_flag = gromov_product(space, y, x, z)  # (x.z)_y
    az, cz_flag = gromov_product(space, z, x, y)  # (x.y)_z
    side_xy = space.geodesic(x, y)
    side_xz = space.geodesic(x, z)
    side_yz = space.geodesic(y, z)
    slack = any(p.denominator == 2 for p in (ax, ay, az))
    c_z = side_xy.vertices[int(ax)]  # distance (y.z)_x from x along [x,y]
    c_y = side_xz.vertices[int(ax)]
    c_x = side_yz.vertices[int(ay)]  # distance (x.z)_y from y along [y,z]
    pts = (c_z, c_y, c_x)
    ins = 0
    for i in range(3):
        for j in range(i + 1, 3):
            ins = max(ins, int(space.dist_from(pts[i])[pts[j]]))
    insize = ins + (0.5 if slack else 0.0)
    thin = _fiber_thinness(space, side_xy, side_xz, side_yz, ax, ay, az)
    contaminated = (
        cx_flag or cy_flag or cz_flag
        or side_xy.contaminated or side_xz.contaminated or side_yz.contaminated
    )
    return TriangleData(
        (x, y, z),
        (side_xy.vertices, side_xz.vertices, side_yz.vertices),
        (c_z, c_y, c_x),
        (ax, ay, az),
        insize,
        max(thin, insize),
        slack,
        contaminated,
    )


def _fiber_thinness(space, side_xy, side_xz, side_yz, ax, ay, az) -> float:
    """Max distance between tripod-matched points on the triangle sides."""
    worst = 0
    for side_a, rev_a, side_b, rev_b, prod in (
        (side_xy, False, side_xz, False, ax),  # around x: both sides start at x
        (side_xy, True, side_yz, False, ay),  # around y
        (side_xz, True, side_yz, True, az),  # around z
    ):
        a = side_a.vertices[::-1] if rev_a else side_a.vertices
        b = side_b.vertices[::-1] if rev_b else side_b.vertices
        for i in range(int(prod) + 1):
            d = int(space.dist_from(a[i])[b[i]])
            worst = max(worst, d)
    return float(worst)


def fellow_traveling_offsets(
    space: CuspedSpace, alpha: list[int], beta: list[int], delta: float
):
    """Offsets aligning two geodesics so matched points stay within 2δ̂.

    Scans start offsets in [0, K] (K from the endpoint gaps and δ̂), trims
    the far end by K, and returns (K1, K2, max matched gap) minimizing the
    gap.  Raises NoOverlap when no window survives.
    """
    la, lb = len(alpha) - 1, len(beta) - 1
    k_end = int(space.dist_from(alpha[0])[beta[0]])
    k_far = int(space.dist_from(alpha[-1])[beta[-1]])
    K = int(np.ceil(max(k_end, k_far, delta)))
    best = None
    for k1 in range(K + 1):
        for k2 in range(K + 1):
            overlap = min(la - k1, lb - k2) - K
            if overlap < 0:
                continue
            gap = 0
            for i in range(overlap + 1):
                gap = max(gap, int(space.dist_from(alpha[k1 + i])[beta[k2 + i]]))
            if best is None or gap < best[2]:
                best = (k1, k2, gap)
    if best is None:
        raise NoOverlap(f"geodesics of length {la},{lb} leave no window for K={K}")
    return best


@dataclass
class IdealTriangleReport:
    m: Fraction
    z: int
    witness_gap: float
    tracking_gap: float
    window: int
    bound: float


def ideal_internal_points(space: CuspedSpace, ray_r, ray_s, delta: float) -> IdealTriangleReport:
    """Internal points of the ideal triangle spanned by two rays.

    Builds the discrete line between the deepest uncontaminated ray points,
    finds a vertex z within the working constant 5δ̂ of both r(m) and s(m)
    (m = endpoint product) and reports the tracking gaps d(l(±j), .) over
    the truncation window.
    """
    r, s = ray_r.vertices, ray_s.vertices
    T = min(len(r), len(s)) - 1
    if all(int(space.dist_from(r[t])[s[t]]) <= delta for t in range(T + 1)):
        raise RaysEquivalent("rays agree to within delta at every matched time")
    m, _ = gromov_product(space, space.star, r[T], s[T])
    mi = int(m)
    line = space.geodesic(r[T], s[T]).vertices
    bound = 5 * max(delta, 0.5)
    rm_row = space.dist_from(r[mi])
    sm_row = space.dist_from(s[mi])
    iz = min(range(len(line)), key=lambda i: (max(rm_row[line[i]], sm_row[line[i]]), i))
    z = line[iz]
    witness = float(max(rm_row[z], sm_row[z]))
    track = 0.0
    window = 0
    for j in range(1, T - mi + 1):
        back = iz - j
        fwd = iz + j
        gaps = []
        if back >= 0 and mi + j <= len(r) - 1:
            d, cont = space.distance(line[back], r[mi + j])
            if cont:
                break
            gaps.append(d)
        if fwd < len(line) and mi + j <= len(s) - 1:
            d, cont = space.distance(line[fwd], s[mi + j])
            if cont:
                break
            gaps.append(d)
        if not gaps:
            break
        track = max(track, float(max(gaps)))
        window = j
    return IdealTriangleReport(m, z, witness, track, window, bound)
