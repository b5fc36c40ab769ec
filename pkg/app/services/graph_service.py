"""
Graph Service
Construction and query primitives shared by every other service: building,
powers, neighborhoods, induced subgraphs, products, joins, unions, diameters
and isomorphism.
"""
import logging

import networkx as nx
import numpy as np
from networkx.algorithms.isomorphism.isomorphvf2 import GraphMatcher
from scipy import sparse
from scipy.sparse import csgraph

from config import Config
from app.exceptions import (
    BadParams, Disconnected, EmptyGraph, OutOfRange, SelfLoop, TooLarge,
)
from app.models.graph import Graph, UNREACHABLE
from app.utils.seeding import make_rng

logger = logging.getLogger(__name__)


class _BudgetedMatcher(GraphMatcher):
    """VF2 matcher restricted to equal refinement colors, with a step budget"""

    def __init__(self, g1, g2, colors1, colors2, budget):
        super().__init__(g1, g2)
        self.colors1 = colors1
        self.colors2 = colors2
        self.budget = budget
        self.steps = 0

    def semantic_feasibility(self, g1_node, g2_node):
        self.steps += 1
        if self.steps > self.budget:
            raise TooLarge(f"Isomorphism search exceeded {self.budget} steps", steps=self.steps)
        return self.colors1[g1_node] == self.colors2[g2_node]


class GraphService:
    """Static helpers operating on immutable Graph objects"""

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    @staticmethod
    def build_graph(n: int, edges, labels=None, meta=None) -> Graph:
        """
        Build a normalized simple graph

        Args:
            n: node count, ids are 0..n-1
            edges: iterable of (u, v) pairs; duplicates and reversed pairs collapse
            labels: optional per-node provenance strings
            meta: optional free-form metadata (family, parameters)

        Returns:
            Graph
        """
        n = int(n)
        if n < 0:
            raise BadParams(f"Node count must be non-negative, got {n}")
        pairs = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        pairs = pairs.reshape(-1, 2)

        if pairs.size:
            bad = (pairs < 0) | (pairs >= n)
            if bad.any():
                row = pairs[np.argmax(bad.any(axis=1))]
                raise OutOfRange(f"Edge ({row[0]}, {row[1]}) has an endpoint outside 0..{n - 1}")
            loops = pairs[:, 0] == pairs[:, 1]
            if loops.any():
                v = int(pairs[np.argmax(loops), 0])
                raise SelfLoop(f"Self-loop at node {v}")

        if labels is not None and len(labels) != n:
            raise BadParams(f"Expected {n} labels, got {len(labels)}")

        rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
        cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
        adj = sparse.csr_matrix((np.ones(rows.size, dtype=np.int8), (rows, cols)), shape=(n, n))
        return GraphService.from_adjacency(adj, labels=labels, meta=meta)

    @staticmethod
    def from_adjacency(adj, labels=None, meta=None) -> Graph:
        """Normalize any square sparse matrix into a Graph (diagonal dropped)"""
        adj = sparse.csr_matrix(adj)
        adj = ((adj + adj.T) != 0).astype(np.int8).tocsr()
        adj.setdiag(0)
        adj.eliminate_zeros()
        adj.sort_indices()
        return Graph(adj.shape[0], adj, labels=labels, meta=meta)

    @staticmethod
    def complete_graph(q: int) -> Graph:
        edges = [(u, v) for u in range(q) for v in range(u + 1, q)]
        return GraphService.build_graph(q, edges)

    @staticmethod
    def path_graph(n: int) -> Graph:
        return GraphService.build_graph(n, [(i, i + 1) for i in range(n - 1)])

    @staticmethod
    def cycle_graph(n: int) -> Graph:
        if n < 3:
            raise BadParams(f"A cycle needs at least 3 nodes, got {n}")
        return GraphService.build_graph(n, [(i, (i + 1) % n) for i in range(n)])

    @staticmethod
    def grid_graph(width: int, height: int) -> Graph:
        """Canonical width x height lattice; node (x, y) has id y*width + x"""
        if width < 1 or height < 1:
            raise BadParams(f"Grid dimensions must be positive, got {width}x{height}")
        ids = np.arange(width * height).reshape(height, width)
        horizontal = np.column_stack([ids[:, :-1].ravel(), ids[:, 1:].ravel()])
        vertical = np.column_stack([ids[:-1, :].ravel(), ids[1:, :].ravel()])
        labels = [f"{x},{y}" for y in range(height) for x in range(width)]
        return GraphService.build_graph(
            width * height, np.vstack([horizontal, vertical]), labels=labels,
            meta={'family': 'grid', 'w': width, 'hh': height},
        )

    @staticmethod
    def random_bipartite(n: int, p: float, seed: int) -> Graph:
        """
        Connected random bipartite graph

        Sides are drawn at random, a random spanning tree across the sides
        guarantees connectivity, then every cross pair is added with
        probability p.
        """
        if n < 1:
            raise BadParams(f"Need at least one node, got {n}")
        if not 0.0 <= p <= 1.0:
            raise BadParams(f"Edge probability must lie in [0, 1], got {p}")
        rng = make_rng(seed)
        side = rng.integers(0, 2, size=n)
        if n >= 2 and side.min() == side.max():
            side[rng.integers(n)] ^= 1

        edges = []
        if n >= 2:
            order = rng.permutation(n)
            first_left = next(int(v) for v in order if side[v] == 0)
            first_right = next(int(v) for v in order if side[v] == 1)
            edges.append((first_left, first_right))
            joined = {0: [first_left], 1: [first_right]}
            for v in order:
                v = int(v)
                if v in (first_left, first_right):
                    continue
                other = joined[1 - side[v]]
                edges.append((v, other[int(rng.integers(len(other)))]))
                joined[side[v]].append(v)

            left = np.flatnonzero(side == 0)
            right = np.flatnonzero(side == 1)
            mask = rng.random((left.size, right.size)) < p
            li, ri = np.nonzero(mask)
            edges.extend(zip(left[li].tolist(), right[ri].tolist()))

        return GraphService.build_graph(
            n, edges, meta={'family': 'random-bipartite', 'n': n, 'p': p, 'seed': seed},
        )

    # ------------------------------------------------------------------
    # Derived graphs
    # ------------------------------------------------------------------

    @staticmethod
    def power_graph(g: Graph, k: int) -> Graph:
        """g^k: u ~ v iff 1 <= dist_g(u, v) <= k. Distances derive from g."""
        k = int(k)
        if k < 1:
            raise BadParams(f"Power must be at least 1, got {k}")
        if k == 1:
            return g
        base, scale = g.power_of if g.power_of is not None else (g, 1)
        return Graph(g.n, None, labels=g.labels, power_of=(base, scale * k), meta=g.meta)

    @staticmethod
    def neighborhood_of_set(g: Graph, nodes, radius: int) -> np.ndarray:
        """Sorted ids at distance <= radius from some node of `nodes`"""
        nodes = np.unique(np.asarray(nodes, dtype=np.int64))
        if radius < 0:
            raise BadParams(f"Radius must be non-negative, got {radius}")
        if nodes.size and (nodes.min() < 0 or nodes.max() >= g.n):
            raise OutOfRange(f"Node set has ids outside 0..{g.n - 1}")
        if radius == 0:
            return nodes
        return np.flatnonzero(g.distances_from(nodes, limit=radius) >= 0)

    @staticmethod
    def ball(g: Graph, v: int, radius: int) -> np.ndarray:
        return GraphService.neighborhood_of_set(g, [v], radius)

    @staticmethod
    def induced_subgraph(g: Graph, nodes) -> tuple:
        """
        Subgraph induced by `nodes`, re-indexed 0..|S|-1 in ascending id order

        Returns:
            tuple: (Graph, old_to_new dict)
        """
        nodes = np.unique(np.asarray(nodes, dtype=np.int64))
        old_to_new = {int(old): new for new, old in enumerate(nodes)}
        if nodes.size == g.n:
            return g, old_to_new
        adj = g.adjacency[nodes][:, nodes]
        labels = [g.labels[i] for i in nodes] if g.labels is not None else None
        sub = Graph(nodes.size, sparse.csr_matrix(adj), labels=labels)
        sub.adjacency.sort_indices()
        return sub, old_to_new

    @staticmethod
    def t_view(g: Graph, nodes, radius: int) -> tuple:
        """
        What a radius-T algorithm sees around `nodes`: the subgraph induced by
        N_T(nodes) without the edges joining two nodes at distance exactly T.

        Returns:
            tuple: (Graph, sorted host ids of the view)
        """
        region = GraphService.neighborhood_of_set(g, nodes, radius)
        sub, _ = GraphService.induced_subgraph(g, region)
        if radius < 1:
            return sub, region
        dist = g.distances_from(nodes)[region]
        adj = sparse.triu(sub.adjacency, k=1, format='coo')
        keep = ~((dist[adj.row] == radius) & (dist[adj.col] == radius))
        view = GraphService.build_graph(region.size, np.column_stack([adj.row[keep], adj.col[keep]]))
        return view, region

    @staticmethod
    def tensor_product(g: Graph, h: Graph) -> Graph:
        """Node (a, b) has id a*|h| + b; (a,b) ~ (a',b') iff aa' in E(g) and bb' in E(h)"""
        adj = sparse.kron(g.adjacency, h.adjacency, format='csr')
        labels = [f"({a},{b})" for a in range(g.n) for b in range(h.n)]
        return GraphService.from_adjacency(adj, labels=labels)

    @staticmethod
    def r_join(g: Graph, h: Graph, r: int, g_labels=None, h_labels=None) -> Graph:
        """
        Layered r-join of g and h

        Id layout: g's ids first, then (x, y, i) at |g| + (i-1)|g||h| + x|h| + y
        for layers i = 1..r, then h's ids. Edges: E(g) plus x ~ (x', y', 1) for
        xx' in E(g); tensor edges between layers i, j with |i - j| <= 1; E(h)
        plus (x, y, r) ~ y' for yy' in E(h).
        """
        if g.n == 0 or h.n == 0:
            raise EmptyGraph("Both sides of a join must be nonempty")
        r = int(r)
        if r < 1:
            raise BadParams(f"Join needs at least one layer, got {r}")
        ag, ah = g.adjacency, h.adjacency
        tensor = sparse.kron(ag, ah, format='csr')
        to_first = sparse.kron(ag, np.ones((1, h.n), dtype=np.int8), format='csr')
        from_last = sparse.kron(np.ones((g.n, 1), dtype=np.int8), ah, format='csr')

        size = r + 2
        blocks = [[None] * size for _ in range(size)]
        blocks[0][0] = ag
        blocks[0][1] = to_first
        for i in range(1, r + 1):
            blocks[i][i] = tensor
            if i < r:
                blocks[i][i + 1] = tensor
        blocks[r][r + 1] = from_last
        blocks[r + 1][r + 1] = ah
        upper = sparse.bmat(blocks, format='csr')

        g_labels = g_labels or (g.labels or [str(x) for x in range(g.n)])
        h_labels = h_labels or (h.labels or [str(y) for y in range(h.n)])
        labels = list(g_labels)
        for i in range(1, r + 1):
            labels.extend(f"({gl}|{hl}|{i})" for gl in g_labels for hl in h_labels)
        labels.extend(h_labels)
        return GraphService.from_adjacency(upper, labels=labels)

    @staticmethod
    def projection(n_g: int, n_h: int, r: int, side: str) -> np.ndarray:
        """
        Projection operator of an r-join as an id map (-1 where undefined)

        side='g' maps g-nodes to themselves and (x, y, i) to x; side='h' maps
        (x, y, i) to y and h-nodes to themselves. Both are homomorphisms on
        the nodes where they are defined.
        """
        total = n_g + r * n_g * n_h + n_h
        out = np.full(total, -1, dtype=np.int64)
        layered = np.arange(r * n_g * n_h) % (n_g * n_h)
        if side == 'g':
            out[:n_g] = np.arange(n_g)
            out[n_g:n_g + layered.size] = layered // n_h
        elif side == 'h':
            out[n_g:n_g + layered.size] = layered % n_h
            out[n_g + layered.size:] = np.arange(n_h)
        else:
            raise BadParams(f"Unknown projection side '{side}'")
        return out

    @staticmethod
    def disjoint_union(graphs) -> tuple:
        """
        Returns:
            tuple: (Graph, offsets) where part i occupies offsets[i]..offsets[i]+|part i|-1
        """
        graphs = list(graphs)
        offsets = []
        total = 0
        for part in graphs:
            offsets.append(total)
            total += part.n
        if not graphs:
            return GraphService.build_graph(0, []), offsets
        adj = sparse.block_diag([part.adjacency for part in graphs], format='csr')
        labels = None
        if all(part.labels is not None for part in graphs):
            labels = [lab for part in graphs for lab in part.labels]
        return GraphService.from_adjacency(adj, labels=labels), offsets

    # ------------------------------------------------------------------
    # Queries
    # ------------------------------------------------------------------

    @staticmethod
    def connected_components(g: Graph) -> list:
        """Components as sorted id arrays, ordered by their minimum id"""
        if g.n == 0:
            return []
        if g.power_of is not None:
            g = g.power_of[0]
        count, labels = csgraph.connected_components(g.adjacency, directed=False)
        comps = [np.flatnonzero(labels == c) for c in range(count)]
        return sorted(comps, key=lambda c: int(c[0]))

    @staticmethod
    def is_connected(g: Graph) -> bool:
        return g.n > 0 and len(GraphService.connected_components(g)) == 1

    @staticmethod
    def weak_diameter(g: Graph, nodes) -> int:
        """Max host distance between two nodes of the set"""
        nodes = np.unique(np.asarray(nodes, dtype=np.int64))
        if nodes.size <= 1:
            return 0
        if g.n <= Config.APSP_CACHE_LIMIT or g.power_of is not None:
            block = g.distance_matrix()[np.ix_(nodes, nodes)]
        else:
            block = np.vstack([g.distances_from([v])[nodes] for v in nodes])
        if (block == UNREACHABLE).any():
            raise Disconnected("Node set spans more than one component")
        return int(block.max())

    @staticmethod
    def eccentricity(g: Graph, v: int) -> int:
        dist = g.distances_from([v])
        if (dist == UNREACHABLE).any():
            raise Disconnected(f"Node {v} does not reach every node")
        return int(dist.max())

    @staticmethod
    def to_networkx(g: Graph) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(g.n))
        graph.add_edges_from(g.edges().tolist())
        return graph

    # ------------------------------------------------------------------
    # Isomorphism
    # ------------------------------------------------------------------

    @staticmethod
    def is_isomorphic(g: Graph, h: Graph, budget: int = None) -> tuple:
        """
        Decide isomorphism with refinement colors plus budgeted backtracking

        Returns:
            tuple: (bool, witness dict g-id -> h-id or None)
        """
        budget = budget or Config.ISO_BUDGET
        if max(g.n, h.n) > Config.ISO_MAX_NODES:
            raise TooLarge(f"Isomorphism check limited to {Config.ISO_MAX_NODES} nodes",
                           n=max(g.n, h.n))
        if g.n != h.n or g.m != h.m:
            return False, None
        if not np.array_equal(np.sort(g.degrees), np.sort(h.degrees)):
            return False, None
        if g.n == 0:
            return True, {}

        g1, g2 = GraphService.to_networkx(g), GraphService.to_networkx(h)
        colors1 = {v: hs[-1] if hs else '' for v, hs in
                   nx.weisfeiler_lehman_subgraph_hashes(g1, iterations=3).items()}
        colors2 = {v: hs[-1] if hs else '' for v, hs in
                   nx.weisfeiler_lehman_subgraph_hashes(g2, iterations=3).items()}
        if sorted(colors1.values()) != sorted(colors2.values()):
            return False, None

        matcher = _BudgetedMatcher(g1, g2, colors1, colors2, budget)
        if matcher.is_isomorphic():
            witness = {int(a): int(b) for a, b in matcher.mapping.items()}
            logger.debug(f"Isomorphism found after {matcher.steps} steps")
            return True, witness
        return False, None
