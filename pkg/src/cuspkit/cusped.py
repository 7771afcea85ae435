"""Truncated cusped spaces: a Cayley ball with a combinatorial horoball
glued over every peripheral coset that meets the ball.

Vertices are the ball elements (depth 0) plus ``(v, k)`` horoball vertices
for ``1 <= k <= D`` over each coset component.  Level-0 horoball vertices
are identified with the Cayley vertices, so the coset's internal edges do
double duty as the horoball's base edges.

Truncation honesty: ``frontier`` marks every vertex that would have an
extra neighbor in the untruncated space (Cayley sphere, depth-D row, and
horoball vertices close enough to a clipped base end that a horizontal
edge was lost).  A distance query is flagged contaminated when a path
escaping through the frontier could beat the in-graph distance, i.e. when
``dtf[x] + dtf[y] + 2 <= d(x, y)``; unflagged values therefore equal the
infinite-space distance.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EndpointRemoved,
    MalformedWord,
    ResourceLimit,
    SampleExhausted,
    StaleCache,
    TooShort,
    UnknownVertex,
)
from .graphs import UnitGraph
from .groups import CosetDescriptor, GroupModel, cayley_ball, peripheral_cosets_in_ball

CACHE_MAGIC = b"CUSPKIT-CACHE-1\n"
CACHE_VERSION = 1


@dataclass
class HoroballPart:
    """One glued horoball (a connected component of a coset base)."""

    spec_idx: int
    coset_idx: int
    base: np.ndarray  # Cayley vertex ids, fixed base order
    start: int  # first global id of the level-1 row
    depth: int

    @property
    def m(self) -> int:
        return len(self.base)

    def vid(self, j: int, k: int) -> int:
        if k == 0:
            return int(self.base[j])
        return self.start + (k - 1) * self.m + j


@dataclass
class GeodesicPath:
    """A canonical geodesic; length is certified by BFS layer numbers."""

    vertices: list[int]
    length: int
    contaminated: bool


class CuspedSpace:
    def __init__(self, model: GroupModel, radius: int, depth: int):
        self.model = model
        self.R = radius
        self.D = depth
        # filled by the builder / loader
        self.words: list[str] = []
        self.word_index: dict[str, int] = {}
        self.n_cayley = 0
        self.wlen: np.ndarray | None = None  # word length of Cayley base
        self.depth: np.ndarray | None = None
        self.base_of: np.ndarray | None = None
        self.pos_in_base: np.ndarray | None = None
        self.part_of: np.ndarray | None = None  # horoball part id, -1 for Cayley
        self.parts: list[HoroballPart] = []
        self.cosets: list[list[CosetDescriptor]] = []  # per peripheral spec
        self.coset_of: list[np.ndarray] = []  # per spec: Cayley idx -> coset idx
        self.part_at: list[dict[int, int]] = []  # per spec: Cayley idx -> part id
        self.graph: UnitGraph | None = None
        self.lexrank: np.ndarray | None = None
        self.frontier: np.ndarray | None = None
        self.dtf: np.ndarray | None = None
        self.star = 0
        self.edges: np.ndarray | None = None
        self._delta = None  # lazily estimated by hyperbolicity.space_delta

    # -- labels ----------------------------------------------------------

    @property
    def n(self) -> int:
        return self.graph.n

    def label(self, v: int) -> str:
        word = self.words[int(self.base_of[v])]
        shown = self.model.alphabet.show(word) if self.model.alphabet else word
        shown = shown if shown else "<e>"
        k = int(self.depth[v])
        if k == 0:
            return shown
        part = self.parts[int(self.part_of[v])]
        prefix = ""
        if len(self.model.peripherals) > 1:
            prefix = self.model.peripherals[part.spec_idx].id + "/"
        return f"{prefix}{shown}:{k}"

    def vertex(self, label: str) -> int:
        spec_idx = 0
        if "/" in label:
            spec_id, label = label.split("/", 1)
            spec_idx = [p.id for p in self.model.peripherals].index(spec_id)
        word_part, _, level = label.partition(":")
        if word_part == "<e>":
            word_part = ""
        word = (
            self.model.normal_form(self.model.alphabet.parse(word_part))
            if self.model.alphabet
            else word_part
        )
        idx = self.word_index.get(word)
        if idx is None:
            raise UnknownVertex(f"{label!r} is not in the truncated space")
        if not level:
            return idx
        k = int(level)
        part = self.parts[self.part_at[spec_idx][idx]]
        if k > part.depth:
            raise UnknownVertex(f"level {k} exceeds depth {part.depth}")
        j = int(self.pos_in_base[idx]) if part.m > 1 else 0
        return part.vid(j, k)

    # -- queries ----------------------------------------------------------

    def dist_from(self, v: int) -> np.ndarray:
        return self.graph.dist_from(int(v))

    def pair_contaminated(self, x: int, y: int, d: int) -> bool:
        fx, fy = int(self.dtf[x]), int(self.dtf[y])
        return fx >= 0 and fy >= 0 and fx + fy + 2 <= d

    def distance(self, x: int, y: int) -> tuple[int, bool]:
        d = int(self.dist_from(x)[y])
        return d, self.pair_contaminated(x, y, d)

    def geodesic(self, x: int, y: int) -> GeodesicPath:
        path = self.graph.canonical_geodesic(int(x), int(y), self.lexrank)
        d = len(path) - 1
        return GeodesicPath(path, d, self.pair_contaminated(x, y, d))

    def horoball_vertices(self, spec_idx: int, coset_idx: int) -> np.ndarray:
        """All vertices (every level, base included) of a coset's horoball."""
        out = [np.asarray(self.cosets[spec_idx][coset_idx].members, dtype=np.int64)]
        for pid, part in enumerate(self.parts):
            if part.spec_idx == spec_idx and part.coset_idx == coset_idx and part.depth:
                out.append(np.arange(part.start, part.start + part.m * part.depth))
        return np.concatenate(out)

    def vertical_vertex(self, spec_idx: int, cayley_idx: int, k: int) -> int:
        """The vertex k levels above a coset member."""
        if k == 0:
            return int(cayley_idx)
        part = self.parts[self.part_at[spec_idx][int(cayley_idx)]]
        j = int(self.pos_in_base[int(cayley_idx)])
        if k > part.depth:
            raise UnknownVertex(f"level {k} exceeds depth {part.depth}")
        return part.vid(j, k)

    def components_without(self, removed) -> np.ndarray:
        keep = np.ones(self.n, dtype=bool)
        keep[np.fromiter(removed, dtype=np.int64)] = False
        return self.graph.components(keep)

    def describe(self) -> dict:
        return {
            "model": self.model.describe(),
            "radius": self.R,
            "depth": self.D,
            "version": CACHE_VERSION,
        }

    def model_hash(self) -> str:
        blob = json.dumps(self.describe(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


def default_depth(model: GroupModel, radius: int) -> int:
    """Depth heuristic: enough levels that no in-ball span needs more."""
    return max(2, (2 * radius + 1).bit_length())


def build_cusped(
    model: GroupModel,
    radius: int,
    depth: int | None = None,
    budget: int = 5_000_000,
) -> CuspedSpace:
    ball = cayley_ball(model, radius, budget)
    if depth is None:
        depth = default_depth(model, radius)
    space = CuspedSpace(model, radius, depth)
    space.words = ball.words
    space.word_index = dict(ball.index)
    space.n_cayley = ball.n
    n_cay = ball.n
    wlen_cay = np.asarray(ball.wlen, dtype=np.int16)

    adj: list[list[int]] = [[] for _ in range(n_cay)]
    edge_pairs: list[tuple[int, int]] = []
    for u, v, _s in ball.edges:
        adj[u].append(v)
        adj[v].append(u)
        edge_pairs.append((u, v))

    sort_key = ball.sort_key if model.alphabet else (lambda i: ball.words[i])

    # -- peripheral cosets and their horoballs ---------------------------
    parts: list[HoroballPart] = []
    cosets_all: list[list[CosetDescriptor]] = []
    coset_of_all: list[np.ndarray] = []
    part_at_all: list[dict[int, int]] = []

    hb_meta = []  # (spec_idx, coset_idx, base vertex list per component)
    for spec_idx, spec in enumerate(model.peripherals):
        descs = peripheral_cosets_in_ball(ball, spec)
        cosets_all.append(descs)
        coset_of = np.full(n_cay, -1, dtype=np.int32)
        for ci, desc in enumerate(descs):
            members = list(desc.members)
            for v in members:
                coset_of[v] = ci
            mset = set(members)
            comp_of: dict[int, int] = {}
            for v in members:
                if v in comp_of:
                    continue
                comp = [v]
                comp_of[v] = v
                qi = 0
                while qi < len(comp):
                    u = comp[qi]
                    qi += 1
                    for w in adj[u]:
                        if w in mset and w not in comp_of:
                            comp_of[w] = v
                            comp.append(w)
                hb_meta.append((spec_idx, ci, sorted(comp, key=sort_key)))
        coset_of_all.append(coset_of)
        part_at_all.append({})

    # allocate horoball rows
    total = n_cay
    for spec_idx, ci, base in hb_meta:
        total += len(base) * depth
    if total > budget:
        raise ResourceLimit(f"cusped space would have {total} vertices (budget {budget})")

    depth_arr = np.zeros(total, dtype=np.int16)
    base_of = np.arange(total, dtype=np.int32)
    part_of = np.full(total, -1, dtype=np.int32)
    pos_in_base = np.zeros(total, dtype=np.int32)
    frontier = np.zeros(total, dtype=bool)
    frontier[:n_cay] = wlen_cay == radius

    cursor = n_cay
    for spec_idx, ci, base in hb_meta:
        m = len(base)
        part = HoroballPart(spec_idx, ci, np.asarray(base, dtype=np.int32), cursor, depth)
        pid = len(parts)
        parts.append(part)
        part_at_all[spec_idx].update({v: pid for v in base})
        for j, v in enumerate(base):
            pos_in_base[v] = j
        # intrinsic base distances (induced subgraph BFS)
        mset = {v: j for j, v in enumerate(base)}
        base_adj = [[] for _ in range(m)]
        for j, v in enumerate(base):
            for w in adj[v]:
                jw = mset.get(w)
                if jw is not None:
                    base_adj[j].append(jw)
        bdist = _small_all_pairs(base_adj)
        # horizontal + vertical edges
        for k in range(1, depth + 1):
            off = cursor + (k - 1) * m
            span = 1 << k
            for j in range(m):
                row = bdist[j]
                for jj in range(j + 1, m):
                    if 0 < row[jj] <= span:
                        edge_pairs.append((off + j, off + jj))
        for j, v in enumerate(base):
            edge_pairs.append((v, cursor + j))
            for k in range(1, depth):
                edge_pairs.append((cursor + (k - 1) * m + j, cursor + k * m + j))
        # metadata rows
        for k in range(1, depth + 1):
            off = cursor + (k - 1) * m
            for j, v in enumerate(base):
                depth_arr[off + j] = k
                base_of[off + j] = v
                part_of[off + j] = pid
                pos_in_base[off + j] = j
        # frontier: clipped base ends lose horizontal edges at low levels
        clipped = [j for j, v in enumerate(base) if wlen_cay[v] == radius]
        if clipped:
            dclip = [min(bdist[j][c] for c in clipped) for j in range(m)]
            for k in range(1, depth + 1):
                off = cursor + (k - 1) * m
                lim = (1 << k) - 1
                for j in range(m):
                    if dclip[j] <= lim:
                        frontier[off + j] = True
        frontier[cursor + (depth - 1) * m : cursor + depth * m] = True
        cursor += m * depth

    space.parts = parts
    space.cosets = cosets_all
    space.coset_of = coset_of_all
    space.part_at = part_at_all
    space.depth = depth_arr
    space.base_of = base_of
    space.part_of = part_of
    space.pos_in_base = pos_in_base
    space.wlen = wlen_cay
    space.frontier = frontier
    edges = np.asarray(sorted({(min(a, b), max(a, b)) for a, b in edge_pairs}), dtype=np.int64)
    space.edges = edges.astype(np.int32)
    space.graph = UnitGraph(total, edges)
    space.dtf = space.graph.dist_multi(np.flatnonzero(frontier))
    space.star = space.word_index[""] if "" in space.word_index else 0
    _fill_lexrank(space, sort_key)
    return space


def _small_all_pairs(adjlists) -> list[list[int]]:
    m = len(adjlists)
    out = []
    for s in range(m):
        dist = [-1] * m
        dist[s] = 0
        queue = [s]
        for v in queue:
            for w in adjlists[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
        out.append([d if d >= 0 else 10**9 for d in dist])
    return out


def _fill_lexrank(space: CuspedSpace, sort_key) -> None:
    order = sorted(
        range(space.n),
        key=lambda v: (int(space.depth[v]), sort_key(int(space.base_of[v]))),
    )
    rank = np.empty(space.n, dtype=np.int32)
    rank[np.asarray(order, dtype=np.int64)] = np.arange(space.n, dtype=np.int32)
    space.lexrank = rank


# -- paper-constant checks over a built space ------------------------------


@dataclass
class QuasiconvexityReport:
    samples: int
    discarded: int
    max_excess: float
    bound: float


def check_quasiconvexity(
    space: CuspedSpace,
    spec_idx: int,
    coset_idx: int,
    samples: int,
    n_max: int,
    delta: float,
    rng,
) -> QuasiconvexityReport:
    """Sampled pairs within N of a horoball: geodesics stay within N+2δ̂ of it.

    Returns the worst observed distance-to-horoball excess over N+2δ̂;
    contaminated pairs are discarded.
    """
    hb = space.horoball_vertices(spec_idx, coset_idx)
    dist_hb = space.graph.dist_multi(hb)
    near = np.flatnonzero((dist_hb >= 0) & (dist_hb <= n_max))
    if len(near) < 2:
        raise SampleExhausted("no vertex pairs near the horoball")
    max_excess = -float("inf")
    used = discarded = 0
    attempts = 0
    while used < samples and attempts < samples * 20:
        attempts += 1
        a, b = (int(v) for v in rng.choice(near, size=2, replace=True))
        if a == b:
            continue
        path = space.geodesic(a, b)
        if path.contaminated:
            discarded += 1
            continue
        n_pair = int(max(dist_hb[a], dist_hb[b]))
        bound = n_pair + 2 * delta
        worst = max(int(dist_hb[v]) for v in path.vertices)
        max_excess = max(max_excess, worst - bound)
        used += 1
    if used == 0:
        raise SampleExhausted("all sampled pairs were contaminated")
    return QuasiconvexityReport(used, discarded, float(max_excess), float(n_max + 2 * delta))


@dataclass
class DeepPenetrationReport:
    length: int
    n_pair: float
    window: tuple[float, float]
    window_ok: bool
    min_window_depth: int
    delta_raw: float
    delta_used: float
    reroute_applicable: bool
    reroute_exists: bool | None


def check_deep_penetration(
    space: CuspedSpace,
    spec_idx: int,
    coset_idx: int,
    x: int,
    y: int,
    delta: float,
    clamp_delta: bool = False,
) -> DeepPenetrationReport:
    """Middle of a geodesic near a horoball runs at depth >= δ̂ inside it.

    When the start lies on the coset and the geodesic is at least
    J(N, δ) long, also reports whether a rerouted geodesic with a vertical
    initial segment of length (k - (N+3δ))/2 exists.
    """
    d_used = max(delta, 4.0) if clamp_delta else delta
    hb = space.horoball_vertices(spec_idx, coset_idx)
    hb_set = set(map(int, hb))
    dist_hb = space.graph.dist_multi(hb)
    path = space.geodesic(x, y)
    k = path.length
    n_pair = float(max(dist_hb[x], dist_hb[y]))
    if k < 2 * (n_pair + 3 * d_used):
        raise TooShort(f"geodesic of length {k} < 2(N+3δ) = {2 * (n_pair + 3 * d_used)}")
    lo, hi = n_pair + 3 * d_used, k - (n_pair + 3 * d_used)
    window = [v for i, v in enumerate(path.vertices) if lo <= i <= hi]
    part_ids = {
        pid
        for pid, p in enumerate(space.parts)
        if p.spec_idx == spec_idx and p.coset_idx == coset_idx
    }
    depths = []
    for v in window:
        inside = int(space.part_of[v]) in part_ids or (
            int(space.depth[v]) == 0 and v in hb_set
        )
        depths.append(int(space.depth[v]) if inside else -1)
    window_ok = all(d >= d_used for d in depths) if depths else True
    # reroute branch: start on the coset, length at least J(N, δ)
    members = set(space.cosets[spec_idx][coset_idx].members)
    reroute_applicable = x in members and k >= _j_deep(space, spec_idx, coset_idx, n_pair, d_used)
    reroute_exists = None
    if reroute_applicable:
        v0 = int(np.ceil((k - (n_pair + 3 * d_used)) / 2))
        try:
            top = space.vertical_vertex(spec_idx, x, min(v0, space.D))
        except UnknownVertex:
            top = None
        if top is None or v0 > space.D:
            reroute_exists = False
        else:
            reroute_exists = v0 + int(space.dist_from(top)[y]) == k
    return DeepPenetrationReport(
        k,
        n_pair,
        (lo, hi),
        window_ok,
        min(depths) if depths else -1,
        delta,
        d_used,
        reroute_applicable,
        reroute_exists,
    )


def _j_deep(space: CuspedSpace, spec_idx: int, coset_idx: int, n_pair: float, delta: float) -> float:
    """Length threshold for the vertical-reroute clause, from the measured
    coset path-length bound L(N) and M(N) = first level with 2^M >= L(N)."""
    members = sorted(space.cosets[spec_idx][coset_idx].members)
    mset = set(members)
    intra = {
        u: [w for w in map(int, space.graph.neighbors(u)) if w in mset] for u in members
    }
    limit = n_pair + 4 * delta
    l_n = 1
    for u in members:
        du = space.dist_from(u)
        # intrinsic distances inside the coset's induced subgraph
        bd = {u: 0}
        queue = [u]
        for v in queue:
            for w in intra[v]:
                if w not in bd:
                    bd[w] = bd[v] + 1
                    queue.append(w)
        for v, dv in bd.items():
            if v > u and du[v] <= limit:
                l_n = max(l_n, dv)
    m_n = max(int(np.floor(delta)) + 1, int(np.ceil(np.log2(max(2, l_n)))))
    return (2 * (n_pair + 3 * delta) + 3) + 2 * (m_n - delta)


@dataclass
class CloseReport:
    samples: int
    discarded: int
    bound: float
    max_gap: int
    violations: int


def check_close(
    space: CuspedSpace, spec_idx: int, delta: float, samples: int, rng
) -> CloseReport:
    """Geodesics from the basepoint meeting a coset only at their terminal
    point end within 6δ̂+4 of the coset's closest point to the basepoint."""
    dist_star = space.dist_from(space.star)
    bound = 6 * delta + 4
    descs = space.cosets[spec_idx]
    order = list(range(len(descs)))
    rng.shuffle(order)
    used = discarded = violations = 0
    max_gap = 0
    for ci in order:
        if used >= samples:
            break
        members = list(descs[ci].members)
        if space.star in members:
            continue
        closest = min(members, key=lambda v: (int(dist_star[v]), int(space.lexrank[v])))
        far = [v for v in members if dist_star[v] > dist_star[closest]]
        if not far:
            continue
        target = far[int(rng.integers(len(far)))]
        if space.pair_contaminated(space.star, target, int(dist_star[target])):
            discarded += 1
            continue
        path = space.geodesic(space.star, target)
        mset = set(members)
        entry = next(v for v in path.vertices if v in mset)
        gap, cont = space.distance(entry, closest)
        if cont:
            discarded += 1
            continue
        max_gap = max(max_gap, gap)
        if gap > bound:
            violations += 1
        used += 1
    if used == 0:
        raise SampleExhausted("no admissible coset samples")
    return CloseReport(used, discarded, bound, max_gap, violations)


def act(space: CuspedSpace, g_word: str, v: int) -> int | None:
    """Left-translate a vertex by a group element (an isometry of the
    infinite space); None when the image leaves the truncation."""
    if space.model.alphabet is None:
        return None
    base = int(space.base_of[v])
    img = space.model.normal_form(g_word + space.words[base])
    idx = space.word_index.get(img)
    if idx is None:
        return None
    k = int(space.depth[v])
    if k == 0:
        return idx
    spec_idx = space.parts[int(space.part_of[v])].spec_idx
    try:
        return space.vertical_vertex(spec_idx, idx, k)
    except (UnknownVertex, KeyError):
        return None


def separation_check(space: CuspedSpace, spec_idx: int, coset_idx: int, x_end: int, y_end: int) -> bool:
    """Brute-force separation oracle: remove the coset and its horoball and
    test whether the two endpoints fall into different components."""
    removed = set(map(int, space.horoball_vertices(spec_idx, coset_idx)))
    if x_end in removed or y_end in removed:
        raise EndpointRemoved("an endpoint lies in the removed coset/horoball")
    labels = space.components_without(removed)
    return labels[x_end] != labels[y_end]


# -- cache io --------------------------------------------------------------


def _pack_section(name: str, payload: bytes) -> bytes:
    tag = name.encode()
    return struct.pack(">I", len(tag)) + tag + struct.pack(">Q", len(payload)) + payload


def save_cache(space: CuspedSpace, path: str) -> None:
    header = {
        "magic": "cuspkit",
        "version": CACHE_VERSION,
        "model_hash": space.model_hash(),
        "describe": space.describe(),
        "n": space.n,
        "n_cayley": space.n_cayley,
        "star": space.star,
        "parts": [
            [p.spec_idx, p.coset_idx, p.start, p.depth, int(p.m)] for p in space.parts
        ],
        "coset_offsets": [
            [len(d.members) for d in descs] for descs in space.cosets
        ],
    }
    blob = json.dumps(header, sort_keys=True).encode()
    sections = [
        ("words", "\n".join(space.words).encode()),
        ("edges", space.edges.astype(np.int32).tobytes()),
        ("wlen", space.wlen.astype(np.int16).tobytes()),
        ("depth", space.depth.astype(np.int16).tobytes()),
        ("base_of", space.base_of.astype(np.int32).tobytes()),
        ("part_of", space.part_of.astype(np.int32).tobytes()),
        ("pos_in_base", space.pos_in_base.astype(np.int32).tobytes()),
        ("frontier", space.frontier.astype(np.uint8).tobytes()),
        ("dtf", space.dtf.astype(np.int32).tobytes()),
        ("lexrank", space.lexrank.astype(np.int32).tobytes()),
        (
            "part_bases",
            np.concatenate([p.base for p in space.parts]).astype(np.int32).tobytes()
            if space.parts
            else b"",
        ),
        (
            "coset_members",
            np.asarray(
                [v for descs in space.cosets for d in descs for v in d.members],
                dtype=np.int32,
            ).tobytes(),
        ),
    ]
    with open(path, "wb") as fh:
        fh.write(CACHE_MAGIC)
        fh.write(struct.pack(">Q", len(blob)))
        fh.write(blob)
        for name, payload in sections:
            fh.write(_pack_section(name, payload))


def load_cache(model: GroupModel, path: str) -> CuspedSpace:
    with open(path, "rb") as fh:
        if fh.read(len(CACHE_MAGIC)) != CACHE_MAGIC:
            raise StaleCache("not a cuspkit cache file")
        (hlen,) = struct.unpack(">Q", fh.read(8))
        header = json.loads(fh.read(hlen))
        sections = {}
        while True:
            raw = fh.read(4)
            if not raw:
                break
            (nlen,) = struct.unpack(">I", raw)
            name = fh.read(nlen).decode()
            (plen,) = struct.unpack(">Q", fh.read(8))
            sections[name] = fh.read(plen)
    desc = header["describe"]
    space = CuspedSpace(model, desc["radius"], desc["depth"])
    if space.model_hash() != header["model_hash"]:
        raise StaleCache("cache does not match the requesting model/parameters")
    n = header["n"]
    space.n_cayley = header["n_cayley"]
    space.star = header["star"]
    space.words = sections["words"].decode().split("\n") if space.n_cayley else []
    space.word_index = {w: i for i, w in enumerate(space.words)}
    space.edges = np.frombuffer(sections["edges"], dtype=np.int32).reshape(-1, 2).copy()
    space.wlen = np.frombuffer(sections["wlen"], dtype=np.int16).copy()
    space.depth = np.frombuffer(sections["depth"], dtype=np.int16).copy()
    space.base_of = np.frombuffer(sections["base_of"], dtype=np.int32).copy()
    space.part_of = np.frombuffer(sections["part_of"], dtype=np.int32).copy()
    space.pos_in_base = np.frombuffer(sections["pos_in_base"], dtype=np.int32).copy()
    space.frontier = np.frombuffer(sections["frontier"], dtype=np.uint8).astype(bool)
    space.dtf = np.frombuffer(sections["dtf"], dtype=np.int32).copy()
    space.lexrank = np.frombuffer(sections["lexrank"], dtype=np.int32).copy()
    part_bases = np.frombuffer(sections["part_bases"], dtype=np.int32)
    cursor = 0
    for spec_idx, coset_idx, start, pdepth, m in header["parts"]:
        base = part_bases[cursor : cursor + m].copy()
        cursor += m
        space.parts.append(HoroballPart(spec_idx, coset_idx, base, start, pdepth))
    members = np.frombuffer(sections["coset_members"], dtype=np.int32)
    cursor = 0
    for spec_idx, sizes in enumerate(header["coset_offsets"]):
        descs = []
        coset_of = np.full(space.n_cayley, -1, dtype=np.int32)
        spec = model.peripherals[spec_idx]
        for ci, size in enumerate(sizes):
            mem = tuple(int(v) for v in members[cursor : cursor + size])
            cursor += size
            descs.append(CosetDescriptor(spec.id, space.words[mem[0]], mem))
            for v in mem:
                coset_of[v] = ci
        space.cosets.append(descs)
        space.coset_of.append(coset_of)
    space.part_at = [dict() for _ in model.peripherals]
    for pid, part in enumerate(space.parts):
        space.part_at[part.spec_idx].update({int(v): pid for v in part.base})
    space.graph = UnitGraph(n, space.edges.astype(np.int64))
    return space
