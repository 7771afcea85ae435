"""Truncated combinatorial horoballs over finite base graphs.

A horoball over a base graph has vertices ``(v, k)`` for base vertices v
and levels ``0 <= k <= depth``.  Edges come in three kinds: base edges at
level 0, a horizontal edge between ``(v, k)`` and ``(w, k)`` for ``k >= 1``
whenever ``0 < d_base(v, w) <= 2^k``, and vertical edges ``(v, k)`` --
``(v, k+1)``.  Distances within such a graph are realized by paths with at
most two vertical runs and one horizontal run of length at most 3; the
closed form over apex levels is used both to emit that normal form and to
cross-check BFS.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DepthClipped, Disconnected, EmptyGraph, ResourceLimit
from .graphs import UnitGraph


@dataclass
class HoroballGraph:
    base_labels: list[str]
    depth: int
    base_dist: np.ndarray  # intrinsic base distances (m x m)
    graph: UnitGraph  # vertex (v, k) at index k*m + v

    @property
    def m(self) -> int:
        return len(self.base_labels)

    @property
    def n(self) -> int:
        return self.graph.n

    def vid(self, v: int, k: int) -> int:
        if not (0 <= v < self.m and 0 <= k <= self.depth):
            raise IndexError(f"no vertex ({v},{k})")
        return k * self.m + v

    def level_of(self, idx: int) -> int:
        return idx // self.m

    def base_of(self, idx: int) -> int:
        return idx % self.m

    def label(self, idx: int) -> str:
        return f"{self.base_labels[self.base_of(idx)]}:{self.level_of(idx)}"


def horoball_edge_pairs(base_dist: np.ndarray, depth: int):
    """Yield index pairs of the horoball over a base with given distances.

    Vertex (v, k) has index k*m + v.  Level-0 horizontal edges are exactly
    the base edges (distance 1); at level k >= 1 a single edge joins
    vertices at base distance in (0, 2^k].
    """
    m = base_dist.shape[0]
    iu, iv = np.triu_indices(m, k=1)
    d = base_dist[iu, iv]
    base_e = d == 1
    yield from zip(iu[base_e].tolist(), iv[base_e].tolist())
    for k in range(1, depth + 1):
        span = (d > 0) & (d <= 2**k)
        off = k * m
        yield from zip((iu[span] + off).tolist(), (iv[span] + off).tolist())
    for k in range(depth):
        off = k * m
        for v in range(m):
            yield (off + v, off + m + v)


def build_horoball(
    base_labels: list[str],
    base_edges: list[tuple[int, int]],
    depth: int,
    budget: int = 5_000_000,
) -> HoroballGraph:
    """Build the truncated horoball over an explicit connected base graph."""
    m = len(base_labels)
    if m == 0:
        raise EmptyGraph("horoball base has no vertices")
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if m * (depth + 1) > budget:
        raise ResourceLimit(f"horoball would have {m * (depth + 1)} vertices")
    base = UnitGraph(m, np.asarray(base_edges, dtype=np.int64).reshape(-1, 2))
    base_dist = base.dist_matrix(range(m))
    if (base_dist < 0).any():
        raise Disconnected("horoball base graph is not connected")
    edges = np.asarray(list(horoball_edge_pairs(base_dist, depth)), dtype=np.int64)
    return HoroballGraph(list(base_labels), depth, base_dist, UnitGraph(m * (depth + 1), edges))


def path_base(n: int) -> tuple[list[str], list[tuple[int, int]]]:
    """The path graph on {0..n-1}, the standard test base."""
    return [str(i) for i in range(n)], [(i, i + 1) for i in range(n - 1)]


def _vertical_cost(k: int, level: int) -> int:
    return abs(k - level)


def normal_form_cost(h: HoroballGraph, x: int, y: int):
    """Minimal cost over apex levels, in the truncated and infinite models.

    Returns (trunc_cost, trunc_apex, inf_cost, inf_apex); apex is the
    largest minimizing level, which forces the horizontal run <= 3.
    """
    kx, vx = h.level_of(x), h.base_of(x)
    ky, vy = h.level_of(y), h.base_of(y)
    s = int(h.base_dist[vx, vy])
    if s == 0:
        lvl = max(kx, ky)
        return abs(kx - ky), lvl, abs(kx - ky), lvl
    top = max(kx, ky, s.bit_length()) + 1
    best_inf = best_trunc = None
    for lvl in range(0, top + 1):
        c = _vertical_cost(kx, lvl) + _vertical_cost(ky, lvl) + -(-s // (1 << lvl))
        if best_inf is None or c <= best_inf[0]:
            best_inf = (c, lvl)
        if lvl <= h.depth and (best_trunc is None or c <= best_trunc[0]):
            best_trunc = (c, lvl)
    return best_trunc[0], best_trunc[1], best_inf[0], best_inf[1]


def normal_form_geodesic(h: HoroballGraph, x: int, y: int) -> list[int]:
    """A geodesic of shape vertical / horizontal(<=3) / vertical.

    Raises DepthClipped when every minimizing apex level exceeds the
    truncation depth, i.e. the truncated graph cannot realize the
    infinite-horoball distance.
    """
    tc, apex, ic, iapex = normal_form_cost(h, x, y)
    if ic < tc:
        raise DepthClipped(
            f"normal form needs apex level {iapex} > depth {h.depth}", needed_depth=iapex
        )
    kx, vx = h.level_of(x), h.base_of(x)
    ky, vy = h.level_of(y), h.base_of(y)
    # the largest minimizing apex is never below either endpoint level
    path = [x]
    for k in range(kx + 1, apex + 1):
        path.append(h.vid(vx, k))
    if vx != vy:
        # hop along a base geodesic in jumps of at most 2^apex
        base_path = _base_geodesic(h, vx, vy)
        pos = 0
        while pos < len(base_path) - 1:
            pos = min(len(base_path) - 1, pos + (1 << apex))
            path.append(h.vid(base_path[pos], apex))
    for k in range(apex - 1, ky - 1, -1):
        path.append(h.vid(vy, k))
    assert path[-1] == y
    assert len(path) - 1 == tc, (len(path) - 1, tc)
    return path


def _base_geodesic(h: HoroballGraph, vx: int, vy: int) -> list[int]:
    dist_row = h.base_dist[vy]
    path = [vx]
    v = vx
    m = h.m
    while v != vy:
        nxt = None
        for w in range(m):
            if h.base_dist[v, w] == 1 and dist_row[w] == dist_row[v] - 1:
                nxt = w
                break
        path.append(nxt)
        v = nxt
    return path


def horoball_distance(h: HoroballGraph, x: int, y: int):
    """Exact BFS distance plus the normal-form geodesic when not clipped.

    Returns (distance, normal_form_path_or_None).
    """
    d = h.graph.distance(x, y)
    try:
        nf = normal_form_geodesic(h, x, y)
    except DepthClipped:
        nf = None
    return d, nf


@dataclass
class HausdorffReport:
    value: int
    geodesic_count: int
    partial: bool


def hausdorff_check(h: HoroballGraph, x: int, y: int, cap: int = 10_000) -> HausdorffReport:
    """Max Hausdorff distance from enumerated geodesics to the normal form.

    A capped enumeration reports the max over the enumerated subset with
    ``partial=True`` instead of failing.
    """
    nf = normal_form_geodesic(h, x, y)
    paths, partial = h.graph.enumerate_geodesics(x, y, cap=cap)
    nf_dist = h.graph.dist_multi(sorted(set(nf)))  # d(., normal form)
    nf_rows = [h.graph.dist_from(q) for q in sorted(set(nf))]
    worst = 0
    for p in paths:
        to_nf = max(int(nf_dist[v]) for v in p)
        from_nf = max(min(int(row[v]) for v in p) for row in nf_rows)
        worst = max(worst, to_nf, from_nf)
    return HausdorffReport(worst, len(paths), partial)


def horoball_to_csv(h: HoroballGraph, path: str) -> None:
    """Edge list with labels 'v:k'; header row 'source,target'."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["source", "target"])
        coo = h.graph.csr.tocoo()
        for a, b in sorted(zip(coo.row.tolist(), coo.col.tolist())):
            if a < b:
                w.writerow([h.label(a), h.label(b)])


def horoball_from_csv(path: str):
    """Read back an edge list written by horoball_to_csv.

    Returns (labels, edges) with labels 'v:k' and index pairs.
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["source", "target"]:
        raise ValueError("missing 'source,target' header row")
    labels: list[str] = []
    index: dict[str, int] = {}
    edges = []
    for a, b in rows[1:]:
        for lab in (a, b):
            if lab not in index:
                index[lab] = len(labels)
                labels.append(lab)
        edges.append((index[a], index[b]))
    return labels, edges
