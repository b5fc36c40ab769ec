"""
Graph Model
Immutable simple undirected graph on dense ids 0..n-1, stored as a symmetric
scipy CSR matrix with sorted column indices.

A power graph remembers the graph it was derived from, so its distances are
obtained from the base distances (dist_k = ceil(dist / k)) without ever
running a search on the power graph itself. Its CSR is only materialized
when something asks for the adjacency.
"""
import hashlib
import logging

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from config import Config

logger = logging.getLogger(__name__)

# Distance value for unreachable pairs
UNREACHABLE = -1

_APSP_CHUNK = 512


def _to_int_distances(dist: np.ndarray) -> np.ndarray:
    out = np.full(dist.shape, UNREACHABLE, dtype=np.int32)
    finite = np.isfinite(dist)
    out[finite] = dist[finite].astype(np.int32)
    return out


def _power_distances(dist: np.ndarray, k: int) -> np.ndarray:
    if k == 1:
        return dist
    out = np.where(dist < 0, UNREACHABLE, (dist + k - 1) // k)
    return out.astype(np.int32)


class Graph:
    """Immutable simple undirected graph"""

    def __init__(self, n: int, adjacency=None, labels=None, power_of=None, meta=None):
        self._n = int(n)
        self._adjacency = adjacency
        self._labels = tuple(labels) if labels is not None else None
        self._power_of = power_of
        self._distances = None
        self._edges = None
        self.meta = dict(meta or {})

    # ------------------------------------------------------------------
    # Structure
    # ------------------------------------------------------------------

    @property
    def n(self) -> int:
        return self._n

    @property
    def labels(self):
        return self._labels

    @property
    def power_of(self):
        """(base graph, k) when this graph is base^k, else None"""
        return self._power_of

    @property
    def adjacency(self) -> sparse.csr_matrix:
        if self._adjacency is None:
            self._adjacency = self._materialize_power()
        return self._adjacency

    @property
    def m(self) -> int:
        return int(self.adjacency.nnz // 2)

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.adjacency.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        adj = self.adjacency
        return adj.indices[adj.indptr[v]:adj.indptr[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        nbrs = self.neighbors(u)
        pos = np.searchsorted(nbrs, v)
        return bool(pos < nbrs.size and nbrs[pos] == v)

    def edges(self) -> np.ndarray:
        """All edges as an (m, 2) array with u < v, lexicographically sorted"""
        if self._edges is None:
            upper = sparse.triu(self.adjacency, k=1, format='coo')
            order = np.lexsort((upper.col, upper.row))
            self._edges = np.column_stack([upper.row[order], upper.col[order]]).astype(np.int64)
        return self._edges

    def _materialize_power(self) -> sparse.csr_matrix:
        base, k = self._power_of
        logger.debug(f"Materializing power graph k={k} on {base.n} nodes")
        if base.n <= Config.APSP_CACHE_LIMIT:
            dist = base.distance_matrix()
            rows, cols = np.nonzero((dist >= 1) & (dist <= k))
            data = np.ones(rows.size, dtype=np.int8)
            adj = sparse.csr_matrix((data, (rows, cols)), shape=(base.n, base.n))
        else:
            step = base.adjacency.astype(bool)
            reach = sparse.identity(base.n, dtype=bool, format='csr')
            for _ in range(k):
                reach = (reach + reach @ step).astype(bool)
            reach.setdiag(False)
            reach.eliminate_zeros()
            adj = reach.astype(np.int8).tocsr()
        adj.sort_indices()
        return adj

    # ------------------------------------------------------------------
    # Distances
    # ------------------------------------------------------------------

    def distance_matrix(self) -> np.ndarray:
        """All-pairs hop distances (int32, UNREACHABLE for disconnected pairs)"""
        if self._distances is None:
            if self._power_of is not None:
                base, k = self._power_of
                self._distances = _power_distances(base.distance_matrix(), k)
            else:
                self._distances = self._all_pairs()
        return self._distances

    def _all_pairs(self) -> np.ndarray:
        n = self._n
        if n > Config.APSP_CACHE_LIMIT:
            logger.warning(f"Building all-pairs distances for n={n} above the cache limit")
        out = np.empty((n, n), dtype=np.int32)
        for start in range(0, n, _APSP_CHUNK):
            rows = np.arange(start, min(n, start + _APSP_CHUNK))
            dist = csgraph.dijkstra(self.adjacency, directed=False, indices=rows, unweighted=True)
            out[rows] = _to_int_distances(dist)
        return out

    def distances_from(self, sources, limit: int = None) -> np.ndarray:
        """
        Hop distance from the nearest node of `sources` to every node

        Args:
            sources: iterable of node ids
            limit: nodes farther than this are reported as UNREACHABLE

        Returns:
            np.ndarray: int32 distances of length n
        """
        sources = np.unique(np.asarray(list(sources) if not isinstance(sources, np.ndarray) else sources,
                                       dtype=np.int64))
        if sources.size == 0:
            return np.full(self._n, UNREACHABLE, dtype=np.int32)

        if self._power_of is not None:
            base, k = self._power_of
            base_limit = None if limit is None else limit * k
            dist = _power_distances(base.distances_from(sources, base_limit), k)
        elif self._distances is not None or self._n <= Config.APSP_CACHE_LIMIT:
            rows = self.distance_matrix()[sources]
            rows = np.where(rows < 0, np.iinfo(np.int32).max, rows)
            dist = rows.min(axis=0)
            dist = np.where(dist == np.iinfo(np.int32).max, UNREACHABLE, dist).astype(np.int32)
        else:
            raw = csgraph.dijkstra(self.adjacency, directed=False, indices=sources,
                                   unweighted=True, min_only=True,
                                   limit=np.inf if limit is None else limit)
            dist = _to_int_distances(raw)

        if limit is not None:
            dist = np.where(dist > limit, UNREACHABLE, dist).astype(np.int32)
        return dist

    def distance(self, u: int, v: int) -> int:
        return int(self.distances_from([u])[v])

    def adjacent_mask(self, nodes) -> np.ndarray:
        """Boolean mask of every node adjacent to at least one of `nodes`"""
        nodes = np.asarray(nodes, dtype=np.int64)
        mask = np.zeros(self._n, dtype=bool)
        if nodes.size == 0:
            return mask
        if self._adjacency is None and self._power_of is not None:
            mask |= (self.distance_matrix()[nodes] == 1).any(axis=0)
        else:
            adj = self.adjacency
            picked = [adj.indices[adj.indptr[v]:adj.indptr[v + 1]] for v in nodes]
            mask[np.concatenate(picked)] = True
        return mask

    # ------------------------------------------------------------------
    # Serialization
    # ------------------------------------------------------------------

    def canonical_text(self) -> str:
        """Graph text format without comments: 'n m' then one 'u v' line per edge"""
        lines = [f"{self._n} {self.m}"]
        lines.extend(f"{u} {v}" for u, v in self.edges())
        return '\n'.join(lines) + '\n'

    def sha256(self) -> str:
        return hashlib.sha256(self.canonical_text().encode('ascii')).hexdigest()

    def to_dict(self) -> dict:
        return {
            'n': self._n,
            'm': self.m,
            'edges': self.edges().tolist(),
            'meta': self.meta,
        }

    def __repr__(self):
        if self._power_of is not None:
            return f"<Graph n={self._n} power k={self._power_of[1]}>"
        return f"<Graph n={self._n} m={self.m}>"
