"""CSR-backed unit-weight graphs: BFS distances, canonical geodesics,
geodesic enumeration, Hausdorff distances and component labelling.

scipy.sparse.csgraph does the traversal heavy lifting; everything layered
on top (lexicographic tie-breaks, shortest-path DAG walks) is explicit so
results are deterministic and certifiable by BFS layer numbers.
"""

from __future__ import annotations

from collections import OrderedDict

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra

from .errors import Disconnected, EnumerationCap


class UnitGraph:
    """Undirected simple graph with unit edge weights."""

    def __init__(self, n: int, edges: np.ndarray, cache_bytes: int = 256_000_000):
        self.n = int(n)
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        u = np.concatenate([edges[:, 0], edges[:, 1]])
        v = np.concatenate([edges[:, 1], edges[:, 0]])
        data = np.ones(len(u), dtype=np.int8)
        self.csr = csr_matrix((data, (u, v)), shape=(self.n, self.n))
        self.csr.sum_duplicates()
        self._cache: OrderedDict[int, np.ndarray] = OrderedDict()
        self._cache_cap = max(4, cache_bytes // max(1, 4 * self.n))

    @property
    def m(self) -> int:
        return self.csr.nnz // 2

    def neighbors(self, v: int) -> np.ndarray:
        return self.csr.indices[self.csr.indptr[v] : self.csr.indptr[v + 1]]

    def degree(self, v: int) -> int:
        return int(self.csr.indptr[v + 1] - self.csr.indptr[v])

    def _bfs(self, sources, min_only: bool = False) -> np.ndarray:
        d = dijkstra(
            self.csr, directed=False, indices=sources, unweighted=True, min_only=min_only
        )
        if d.ndim == 2:
            d = d.min(axis=0)
        out = np.full(self.n, -1, dtype=np.int32)
        hit = np.isfinite(d)
        out[hit] = d[hit].astype(np.int32)
        return out

    def dist_from(self, src: int) -> np.ndarray:
        """Distances from one source; cached (LRU)."""
        src = int(src)
        hit = self._cache.get(src)
        if hit is not None:
            self._cache.move_to_end(src)
            return hit
        out = self._bfs(src)
        self._cache[src] = out
        if len(self._cache) > self._cache_cap:
            self._cache.popitem(last=False)
        return out

    def dist_multi(self, sources) -> np.ndarray:
        """Min distance to any of `sources` (multi-source BFS), uncached."""
        sources = np.asarray(list(sources), dtype=np.int64)
        if len(sources) == 0:
            return np.full(self.n, -1, dtype=np.int32)
        if len(sources) == 1:
            return self._bfs(sources[0])
        return self._bfs(sources, min_only=True)

    def distance(self, x: int, y: int) -> int:
        d = int(self.dist_from(x)[y])
        if d < 0:
            raise Disconnected(f"no path between {x} and {y}")
        return d

    def ball(self, v: int, radius: int) -> dict[int, int]:
        """Vertices within `radius` of v with their distances (python BFS;
        cheap for the small radii used by ray-equivalence tests)."""
        out = {int(v): 0}
        frontier = [int(v)]
        indptr, indices = self.csr.indptr, self.csr.indices
        for d in range(1, radius + 1):
            nxt = []
            for u in frontier:
                for w in indices[indptr[u] : indptr[u + 1]]:
                    w = int(w)
                    if w not in out:
                        out[w] = d
                        nxt.append(w)
            frontier = nxt
            if not frontier:
                break
        return out

    def dist_matrix(self, nodes) -> np.ndarray:
        """Pairwise distances between the given nodes (int32, -1 unreachable)."""
        nodes = np.asarray(list(nodes), dtype=np.int64)
        d = dijkstra(self.csr, directed=False, indices=nodes, unweighted=True)
        d = d[:, nodes]
        out = np.full(d.shape, -1, dtype=np.int32)
        hit = np.isfinite(d)
        out[hit] = d[hit].astype(np.int32)
        return out

    def canonical_geodesic(self, x: int, y: int, lexrank: np.ndarray) -> list[int]:
        """One geodesic from x to y; ties broken by least `lexrank`.

        Certified by BFS layer numbers: vertex i of the result is at
        distance i from x and len-1-i from y.
        """
        dist = self.dist_from(x)
        if dist[y] < 0:
            raise Disconnected(f"no path between {x} and {y}")
        path = [int(y)]
        v = int(y)
        while v != x:
            nbrs = self.neighbors(v)
            level = nbrs[dist[nbrs] == dist[v] - 1]
            v = int(level[np.argmin(lexrank[level])])
            path.append(v)
        path.reverse()
        return path

    def enumerate_geodesics(self, x: int, y: int, cap: int = 10_000):
        """All geodesics x->y as vertex tuples, capped.

        Returns (paths, partial) where partial is True when the cap was hit.
        """
        dx = self.dist_from(x)
        dy = self.dist_from(y)
        total = dx[y]
        if total < 0:
            raise Disconnected(f"no path between {x} and {y}")
        paths: list[tuple[int, ...]] = []
        partial = False
        stack: list[list[int]] = [[int(x)]]
        while stack:
            cur = stack.pop()
            v = cur[-1]
            if v == y:
                paths.append(tuple(cur))
                if len(paths) >= cap:
                    partial = True
                    break
                continue
            nbrs = self.neighbors(v)
            good = nbrs[(dx[nbrs] == dx[v] + 1) & (dy[nbrs] == total - dx[v] - 1)]
            for u in sorted(map(int, good), reverse=True):
                stack.append(cur + [u])
        return paths, partial

    def hausdorff(self, aset, bset) -> int:
        """Graph Hausdorff distance between two vertex sets."""
        da = self.dist_multi(aset)
        db = self.dist_multi(bset)
        a = np.fromiter(aset, dtype=np.int64)
        b = np.fromiter(bset, dtype=np.int64)
        return int(max(db[a].max(), da[b].max()))

    def components(self, keep: np.ndarray | None = None) -> np.ndarray:
        """Component label per vertex; vertices with keep=False get -1."""
        if keep is None:
            _, labels = connected_components(self.csr, directed=False)
            return labels.astype(np.int32)
        keep = np.asarray(keep, dtype=bool)
        idx = np.flatnonzero(keep)
        sub = self.csr[idx][:, idx]
        _, sublab = connected_components(sub, directed=False)
        out = np.full(self.n, -1, dtype=np.int32)
        out[idx] = sublab.astype(np.int32)
        return out


def build_edges_array(pairs) -> np.ndarray:
    arr = np.asarray(sorted(set((min(a, b), max(a, b)) for a, b in pairs)), dtype=np.int64)
    return arr.reshape(-1, 2)
