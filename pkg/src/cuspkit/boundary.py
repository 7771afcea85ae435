"""Finite-resolution boundary machinery: geodesic ray approximations, the
equivalence-class net, boundary Gromov products with stability reports,
the visual quasimetric and its chain metrization.

A boundary point at resolution T is a class of geodesic segments from the
basepoint to the T-sphere, two segments being equivalent when they stay
within δ̂ of each other at every matched time.  The net is the set of
classes, each represented by its lexicographically least member.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .cusped import CuspedSpace
from .errors import (
    EmptyNet,
    RaysEquivalent,
    ResolutionMismatch,
    TooFewPoints,
    UnknownVertex,
)


@dataclass
class RayApprox:
    """A geodesic segment from the basepoint; a boundary point surrogate."""

    vertices: list[int]
    canonical: bool = False
    name: str = ""

    @property
    def resolution(self) -> int:
        return len(self.vertices) - 1

    @property
    def endpoint(self) -> int:
        return self.vertices[-1]

    def at(self, t: int) -> int:
        return self.vertices[t]


@dataclass
class VisualMetricSpec:
    """Parameters of the visual (quasi)metric a^-(x.y) with a = e^epsilon."""

    epsilon: float = 1.0
    chain: bool = True
    k1: float | None = None  # fitted lower sandwich constant
    k2: float | None = None  # fitted upper sandwich constant


def ray_to(space: CuspedSpace, v: int, name: str = "") -> RayApprox:
    """The canonical geodesic from the basepoint to v, as a ray."""
    path = space.geodesic(space.star, v)
    return RayApprox(path.vertices, name=name or space.label(v))


def vertical_ray(space: CuspedSpace, spec_idx: int, coset_idx: int, resolution: int) -> RayApprox:
    """Geodesic to a coset's closest point, then vertically into its horoball.

    This is the standard realization of the coset's parabolic boundary
    point; the concatenation is geodesic because the junction is a closest
    point of the coset.
    """
    dist_star = space.dist_from(space.star)
    members = space.cosets[spec_idx][coset_idx].members
    q = min(members, key=lambda m: (int(dist_star[m]), int(space.lexrank[m])))
    head = space.geodesic(space.star, q).vertices
    levels = min(space.D, max(0, resolution - len(head) + 1))
    tail = [space.vertical_vertex(spec_idx, q, k) for k in range(1, levels + 1)]
    ray = RayApprox(head + tail, name=f"cusp({space.label(q)})")
    assert int(dist_star[ray.endpoint]) == ray.resolution, "vertical tail not geodesic"
    return ray


def ray_equivalent(space: CuspedSpace, r: RayApprox, s: RayApprox, delta: float) -> bool:
    """Whether the two segments track within δ̂ at every matched time."""
    if r.resolution != s.resolution:
        raise ResolutionMismatch(f"{r.resolution} != {s.resolution}")
    radius = int(math.floor(delta))
    for t in range(r.resolution, -1, -1):  # endpoints diverge first, test them early
        a, b = r.at(t), s.at(t)
        if a == b:
            continue
        ball = space.graph.ball(a, radius)
        if b not in ball:
            return False
    return True


def boundary_net(
    space: CuspedSpace,
    resolution: int,
    delta: float,
    max_points: int | None = None,
    seed: int = 0,
) -> list[RayApprox]:
    """All ray classes to the distance-`resolution` sphere, deduplicated.

    Classes are found by union-find over endpoint pairs within δ̂ that
    track at every time; the class representative is the lexicographically
    least ray.  With `max_points` the net is subsampled deterministically.
    """
    dist_star = space.dist_from(space.star)
    sphere = np.flatnonzero(dist_star == resolution)
    if len(sphere) == 0:
        raise EmptyNet(f"no vertices at distance {resolution}")
    rays = {int(v): ray_to(space, int(v)) for v in sphere}
    parent = {int(v): int(v) for v in sphere}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    radius = int(math.floor(delta))
    for v in map(int, sphere):
        for u in space.graph.ball(v, radius):
            if u <= v or int(dist_star[u]) != resolution:
                continue
            ru, rv = find(u), find(v)
            if ru != rv and ray_equivalent(space, rays[v], rays[u], delta):
                parent[max(ru, rv)] = min(ru, rv)
    classes: dict[int, list[int]] = {}
    for v in map(int, sphere):
        classes.setdefault(find(v), []).append(v)
    reps = []
    for group in classes.values():
        best = min(
            (rays[v] for v in group),
            key=lambda r: tuple(int(space.lexrank[w]) for w in r.vertices),
        )
        best.canonical = True
        reps.append(best)
    reps.sort(key=lambda r: tuple(int(space.lexrank[w]) for w in r.vertices))
    if max_points is not None and len(reps) > max_points:
        rng = np.random.default_rng(seed)
        keep = sorted(rng.choice(len(reps), size=max_points, replace=False))
        reps = [reps[i] for i in keep]
    return reps


@dataclass
class ProductReport:
    value: Fraction
    at_resolution: int
    series: list[tuple[int, Fraction]]
    stability: float
    discarded: int


def boundary_product(
    space: CuspedSpace, r: RayApprox, s: RayApprox, delta: float
) -> ProductReport:
    """(r.s) at the basepoint, evaluated at the largest uncontaminated
    common resolution, with the whole series and its top-quartile
    fluctuation."""
    if r.vertices[0] != space.star or s.vertices[0] != space.star:
        raise UnknownVertex("rays must be based at the basepoint")
    T = min(r.resolution, s.resolution)
    if T >= 1 and ray_equivalent(
        space,
        RayApprox(r.vertices[: T + 1]),
        RayApprox(s.vertices[: T + 1]),
        delta,
    ):
        raise RaysEquivalent("rays represent the same class at this resolution")
    series: list[tuple[int, Fraction]] = []
    discarded = 0
    for t in range(1, T + 1):
        a, b = r.at(t), s.at(t)
        d, cont = space.distance(a, b)
        cont = (
            cont
            or space.pair_contaminated(space.star, a, t)
            or space.pair_contaminated(space.star, b, t)
        )
        if cont:
            discarded += 1
            continue
        series.append((t, Fraction(2 * t - d, 2)))
    if not series:
        raise EmptyNet("every resolution was contamination-flagged")
    t_top, value = series[-1]
    quartile = [p for t, p in series if t >= t_top - max(1, (t_top + 3) // 4)]
    stability = float(max(abs(p - value) for p in quartile))
    return ProductReport(value, t_top, series, stability, discarded)


def visual_quasimetric(spec: VisualMetricSpec, product: Fraction | float) -> float:
    """a^-(x.y) with a = e^epsilon."""
    return math.exp(-spec.epsilon * float(product))


@dataclass
class ChainMetric:
    """Pairwise chain-metrized visual metric over a finite ray set."""

    rays: list[RayApprox]
    products: list[list[Fraction | None]]
    quasi: np.ndarray
    dist: np.ndarray
    k1: float
    k2: float
    spec: VisualMetricSpec
    quality_ok: bool
    stability: float

    def dv(self, i: int, j: int) -> float:
        return float(self.dist[i, j])


def chain_metric(
    space: CuspedSpace, rays: list[RayApprox], spec: VisualMetricSpec, delta: float
) -> ChainMetric:
    """min over chains of sums of quasimetric steps (a finite min-plus
    closure), which is a metric by construction; fits k1 = min d_V/quasi
    and k2 = 1."""
    n = len(rays)
    if n < 2:
        raise TooFewPoints("chain metric needs at least two boundary points")
    products: list[list[Fraction | None]] = [[None] * n for _ in range(n)]
    quasi = np.zeros((n, n), dtype=np.float64)
    worst_stability = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            rep = boundary_product(space, rays[i], rays[j], delta)
            products[i][j] = products[j][i] = rep.value
            q = visual_quasimetric(spec, rep.value)
            quasi[i, j] = quasi[j, i] = q
            worst_stability = max(worst_stability, rep.stability)
    dist = quasi.copy()
    for k in range(n):
        np.minimum(dist, dist[:, k][:, None] + dist[k, :][None, :], out=dist)
    off = ~np.eye(n, dtype=bool)
    k1 = float((dist[off] / quasi[off]).min())
    return ChainMetric(
        rays,
        products,
        quasi,
        dist,
        k1,
        1.0,
        spec,
        spec.epsilon * max(delta, 0.0) <= 0.2,
        worst_stability,
    )


def equivariant_diameter(space: CuspedSpace, points: list[int], g_word: str):
    """Product-diameters of a finite endpoint set and of its g-translate.

    The diameter under a quasimetric e^-(x.y) is determined by the minimal
    pairwise product, so that is what gets compared.  Returns
    (min_product, min_product_translated, ok) with ok False when a
    translate left the truncation or a query was contamination-flagged.
    """
    from .cusped import act  # local import to avoid a cycle at module load

    gp = act(space, g_word, space.star)
    if gp is None:
        return None, None, False
    min_prod = None
    min_prod_g = None
    for i, x in enumerate(points):
        for y in points[i + 1 :]:
            p, cont = _product_at(space, space.star, x, y)
            gx, gy = act(space, g_word, x), act(space, g_word, y)
            if gx is None or gy is None:
                return None, None, False
            q, cont_g = _product_at(space, gp, gx, gy)
            if cont or cont_g:
                return None, None, False
            min_prod = p if min_prod is None else min(min_prod, p)
            min_prod_g = q if min_prod_g is None else min(min_prod_g, q)
    return min_prod, min_prod_g, True


def _product_at(space: CuspedSpace, p: int, x: int, y: int):
    dp = space.dist_from(p)
    dxy, cont = space.distance(x, y)
    cont = (
        cont
        or space.pair_contaminated(p, x, int(dp[x]))
        or space.pair_contaminated(p, y, int(dp[y]))
    )
    return Fraction(int(dp[x]) + int(dp[y]) - dxy, 2), cont


def net_to_csv(space: CuspedSpace, rays: list[RayApprox], path: str) -> None:
    """Net export: one row per class with its ray word and class id."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["class_id", "resolution", "ray_word"])
        for i, r in enumerate(rays):
            w.writerow([i, r.resolution, " / ".join(space.label(v) for v in r.vertices)])


def matrix_to_csv(matrix: np.ndarray, path: str, header: list[str] | None = None) -> None:
    """Metric matrix export with class-id headers."""
    n = matrix.shape[0]
    names = header or [str(i) for i in range(n)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["class_id", *names])
        for i in range(n):
            w.writerow([names[i], *(repr(float(v)) for v in matrix[i])])
