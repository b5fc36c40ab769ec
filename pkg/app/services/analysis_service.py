"""
Analysis Service
Exact oracles (chromatic number, local chromatic number, girth) and the
validity checkers for colorings, clusterings and decompositions.
"""
import heapq
import logging
import math

import networkx as nx
import numpy as np
from ortools.sat.python import cp_model
from scipy import stats

from config import Config
from app.exceptions import BadParams, BudgetExceeded, Disconnected, EmptyGraph
from app.models.coloring import ChromaticCertificate
from app.models.reports import ValidationReport
from app.services.graph_service import GraphService

logger = logging.getLogger(__name__)


class _Budget:
    """Node-expansion counter shared by every search of one solver call"""

    def __init__(self, limit: int):
        self.limit = int(limit)
        self.used = 0

    def tick(self) -> bool:
        self.used += 1
        return self.used <= self.limit

    @property
    def remaining(self) -> int:
        return max(0, self.limit - self.used)


def _neighbor_lists(g) -> list:
    adj = g.adjacency
    return [adj.indices[adj.indptr[v]:adj.indptr[v + 1]].tolist() for v in range(g.n)]


def _greedy_clique(nbrs: list) -> list:
    """Largest clique found by growing greedily from every node"""
    best = []
    sets = [set(ns) for ns in nbrs]
    for start in range(len(nbrs)):
        if len(sets[start]) + 1 <= len(best):
            continue
        clique = [start]
        cands = set(sets[start])
        while cands:
            u = min(cands, key=lambda w: (-len(sets[w] & cands), w))
            clique.append(u)
            cands &= sets[u]
        if len(clique) > len(best):
            best = clique
    return sorted(best)


def _dsatur(nbrs: list) -> list:
    """Greedy DSATUR; 0-based colors. Ties: higher degree, then lower id."""
    n = len(nbrs)
    colors = [-1] * n
    seen = [set() for _ in range(n)]
    heap = [(0, -len(nbrs[v]), v) for v in range(n)]
    heapq.heapify(heap)
    while heap:
        neg_sat, _, v = heapq.heappop(heap)
        if colors[v] != -1 or -neg_sat != len(seen[v]):
            continue
        c = 0
        while c in seen[v]:
            c += 1
        colors[v] = c
        for u in nbrs[v]:
            if colors[u] == -1 and c not in seen[u]:
                seen[u].add(c)
                heapq.heappush(heap, (-len(seen[u]), -len(nbrs[u]), u))
    return colors


def _k_colorable(nbrs: list, k: int, clique: list, budget: _Budget):
    """
    Saturation-ordered backtracking for a proper k-coloring

    Clique nodes are precolored 0..|clique|-1. A node may only open one new
    color beyond those already in use, which removes color permutations.

    Returns:
        list of 0-based colors, or None when no k-coloring exists
    """
    n = len(nbrs)
    if len(clique) > k:
        return None
    colors = [-1] * n
    counts = [[0] * k for _ in range(n)]
    sat = [0] * n
    degree = [len(ns) for ns in nbrs]

    def assign(v, c):
        colors[v] = c
        for u in nbrs[v]:
            counts[u][c] += 1
            if counts[u][c] == 1:
                sat[u] += 1

    def unassign(v, c):
        colors[v] = -1
        for u in nbrs[v]:
            counts[u][c] -= 1
            if counts[u][c] == 0:
                sat[u] -= 1

    def select():
        best = None
        best_key = None
        for v in range(n):
            if colors[v] != -1:
                continue
            key = (sat[v], degree[v])
            if best is None or key > best_key:
                best, best_key = v, key
        return best

    for c, v in enumerate(clique):
        assign(v, c)
    used = len(clique)

    v = select()
    if v is None:
        return colors
    stack = [[v, [c for c in range(min(used + 1, k)) if counts[v][c] == 0], 0, used]]
    while stack:
        frame = stack[-1]
        v, cands, idx, prev_used = frame
        if colors[v] != -1:
            unassign(v, colors[v])
            used = prev_used
        if idx >= len(cands):
            stack.pop()
            continue
        frame[2] += 1
        if not budget.tick():
            raise BudgetExceeded(f"Solver exceeded {budget.limit} node expansions")
        c = cands[idx]
        assign(v, c)
        used = max(prev_used, c + 1)
        nxt = select()
        if nxt is None:
            return colors
        nxt_cands = [c for c in range(min(used + 1, k)) if counts[nxt][c] == 0]
        if nxt_cands:
            stack.append([nxt, nxt_cands, 0, used])
    return None


def _cp_sat_k_colorable(nbrs: list, k: int, clique: list, budget: _Budget):
    """
    k-colorability as a CP-SAT feasibility model

    One boolean per (node, color), exactly one color per node, at most one
    endpoint of each edge per color, clique precolored 0..|clique|-1. Conflicts
    are charged to the shared budget. A single worker with a fixed seed keeps
    the witness reproducible.

    Returns:
        list of 0-based colors, or None when no k-coloring exists

    Raises:
        BudgetExceeded: the conflict or time limit stopped the search
    """
    model = cp_model.CpModel()
    x = [[model.NewBoolVar(f"x_{v}_{c}") for c in range(k)] for v in range(len(nbrs))]
    for row in x:
        model.AddExactlyOne(row)
    for u, ns in enumerate(nbrs):
        for v in ns:
            if u < v:
                for c in range(k):
                    model.AddAtMostOne([x[u][c], x[v][c]])
    for c, v in enumerate(clique):
        model.Add(x[v][c] == 1)

    solver = cp_model.CpSolver()
    solver.parameters.num_workers = 1
    solver.parameters.random_seed = 0
    solver.parameters.max_number_of_conflicts = budget.remaining
    solver.parameters.max_time_in_seconds = Config.SOLVER_TIME_LIMIT
    status = solver.Solve(model)
    budget.used += int(solver.NumConflicts())

    if status == cp_model.INFEASIBLE:
        return None
    if status in (cp_model.OPTIMAL, cp_model.FEASIBLE):
        return [next(c for c in range(k) if solver.Value(row[c])) for row in x]
    raise BudgetExceeded(f"CP-SAT stopped after {solver.NumConflicts()} conflicts "
                         f"({solver.StatusName(status)})")


def _decide_k_colorable(nbrs: list, k: int, clique: list, budget: _Budget):
    """
    Backtracking for a bounded slice, then CP-SAT on what is left of the budget
    """
    if len(clique) > k:
        return None
    piece = _Budget(min(budget.remaining, Config.SOLVER_BACKTRACK_SLICE))
    try:
        return _k_colorable(nbrs, k, clique, piece)
    except BudgetExceeded:
        pass
    finally:
        budget.used += min(piece.used, piece.limit)
    if budget.remaining == 0:
        raise BudgetExceeded(f"Solver exceeded {budget.limit} node expansions")
    logger.debug(f"{k}-coloring of n={len(nbrs)} handed to CP-SAT after {piece.used} expansions")
    return _cp_sat_k_colorable(nbrs, k, clique, budget)


class AnalysisService:
    """Exact oracles and verifiers"""

    @staticmethod
    def is_proper_coloring(g, coloring) -> tuple:
        """
        Check that every edge is bichromatic

        Args:
            g: Graph
            coloring: per-node color values (any hashable-by-equality ints,
                the hidden marker included)

        Returns:
            tuple: (bool, first violating edge (u, v) or None)
        """
        col = np.asarray(coloring)
        if col.shape[0] != g.n:
            raise BadParams(f"Coloring has {col.shape[0]} entries for {g.n} nodes")
        edges = g.edges()
        if edges.size == 0:
            return True, None
        bad = col[edges[:, 0]] == col[edges[:, 1]]
        if not bad.any():
            return True, None
        u, v = edges[int(np.argmax(bad))]
        return False, (int(u), int(v))

    @staticmethod
    def exact_chromatic_number(g, budget: int = None, hint=None) -> ChromaticCertificate:
        """
        Exact chromatic number with clique and coloring witnesses

        Args:
            g: nonempty Graph
            budget: node-expansion limit (defaults to Config.SOLVER_BUDGET)
            hint: optional proper coloring used as the starting upper bound

        Returns:
            ChromaticCertificate with a 1-based coloring

        Raises:
            BudgetExceeded: carries the best bracket [lo, hi]
        """
        if g.n == 0:
            raise EmptyGraph("Chromatic number of the empty graph is undefined")
        limit = _Budget(budget or Config.SOLVER_BUDGET)
        nbrs = _neighbor_lists(g)

        clique = _greedy_clique(nbrs)
        best = _dsatur(nbrs)
        if hint is not None:
            hint = [int(c) for c in hint]
            proper, _ = AnalysisService.is_proper_coloring(g, hint)
            if proper and len(set(hint)) < len(set(best)):
                _, best = np.unique(hint, return_inverse=True)
                best = best.tolist()
        lo, hi = len(clique), len(set(best))

        # upward from the clique bound: every refuted k raises lo
        while lo < hi:
            try:
                found = _decide_k_colorable(nbrs, lo, clique, limit)
            except BudgetExceeded:
                logger.warning(f"Solver budget exhausted on n={g.n} with bracket [{lo}, {hi}]")
                raise BudgetExceeded(
                    f"Solver exceeded {limit.limit} node expansions", lo=lo, hi=hi,
                    expansions=limit.used,
                )
            if found is not None:
                best, hi = found, lo
                break
            lo += 1

        logger.debug(f"chi={hi} on n={g.n} (clique {lo}, {limit.used} expansions)")
        return ChromaticCertificate(
            graph_sha256=g.sha256(),
            chi=hi,
            clique=tuple(int(v) for v in clique),
            coloring=tuple(int(c) + 1 for c in best),
            expansions=limit.used,
        )

    @staticmethod
    def k_coloring(g, k: int, budget: int = None):
        """Some proper coloring in 1..k, or None when g is not k-colorable"""
        if g.n == 0:
            return []
        nbrs = _neighbor_lists(g)
        greedy = _dsatur(nbrs)
        if max(greedy) < k:
            return [c + 1 for c in greedy]
        found = _decide_k_colorable(nbrs, k, _greedy_clique(nbrs), _Budget(budget or Config.SOLVER_BUDGET))
        return None if found is None else [c + 1 for c in found]

    @staticmethod
    def verify_certificate(g, cert: ChromaticCertificate) -> ValidationReport:
        """Re-check a certificate without trusting any of its fields"""
        report = ValidationReport(subject='chromatic_certificate')
        report.check('hash', cert.graph_sha256 == g.sha256(), 'graph hash mismatch')
        clique = list(cert.clique)
        pairs_ok = all(g.has_edge(u, v) for i, u in enumerate(clique) for v in clique[i + 1:])
        report.check('clique', pairs_ok and len(set(clique)) == len(clique), 'witness is not a clique')
        if len(cert.coloring) == g.n:
            proper, edge = AnalysisService.is_proper_coloring(g, list(cert.coloring))
            report.check('coloring', proper, f"monochromatic edge {edge}")
            report.check('colors_used', len(set(cert.coloring)) <= cert.chi,
                         f"witness uses {len(set(cert.coloring))} colors")
        else:
            report.check('coloring', False, 'coloring length differs from node count')
        report.check('bracket', len(clique) <= cert.chi, 'clique larger than chi')
        return report

    @staticmethod
    def local_chromatic_number(g, radius: int, budget: int = None) -> tuple:
        """
        Max over nodes of the chromatic number of the radius-ball

        Returns:
            tuple: (value, argmax node)
        """
        if g.n == 0:
            raise EmptyGraph("Local chromatic number of the empty graph is undefined")
        best, argmax = 0, 0
        seen = set()
        for v in range(g.n):
            ball = GraphService.ball(g, v, radius)
            key = ball.tobytes()
            if key in seen:
                continue
            seen.add(key)
            sub, _ = GraphService.induced_subgraph(g, ball)
            chi = AnalysisService.exact_chromatic_number(sub, budget).chi
            if chi > best:
                best, argmax = chi, v
        return best, argmax

    @staticmethod
    def girth(g) -> float:
        """Shortest cycle length; math.inf for forests"""
        value = nx.girth(GraphService.to_networkx(g))
        return math.inf if value == math.inf else int(value)

    @staticmethod
    def graph_stats(g) -> dict:
        connected = GraphService.is_connected(g)
        stats_out = {
            'n': g.n,
            'm': g.m,
            'connected': connected,
            'max_degree': int(g.degrees.max()) if g.n else 0,
        }
        if connected:
            stats_out['diameter'] = GraphService.weak_diameter(g, np.arange(g.n))
        return stats_out

    # ------------------------------------------------------------------
    # Verifiers
    # ------------------------------------------------------------------

    @staticmethod
    def _partition_clauses(report, n, clusters, rest=()):
        cover = np.zeros(n, dtype=np.int64)
        for c in list(clusters) + [rest]:
            np.add.at(cover, np.asarray(c, dtype=np.int64), 1)
        report.check('disjoint', bool((cover <= 1).all()),
                     f"node {int(np.argmax(cover > 1))} appears twice")
        report.check('covers_all', bool((cover >= 1).all()),
                     f"node {int(np.argmax(cover < 1))} is missing")

    @staticmethod
    def _diameter_clause(report, g, clusters, d):
        worst = 0
        for c in clusters:
            try:
                diam = GraphService.weak_diameter(g, c)
            except Disconnected:
                report.check('diameter', False, f"cluster with min id {int(np.min(c))} is disconnected in g")
                continue
            worst = max(worst, diam)
            if d is not None:
                report.check('diameter', diam <= d, f"cluster with min id {int(np.min(c))} has weak diameter {diam} > {d}")
        report.clauses.setdefault('diameter', True)
        report.metrics['max_diameter'] = worst

    @staticmethod
    def verify_clustering(g, clustering, lam: float, d: int = None) -> ValidationReport:
        """
        Check a (lambda, d)-clustering

        Clauses: disjoint, covers_all, non_adjacent, diameter, unclustered_fraction
        """
        report = ValidationReport(subject='clustering')
        # 1. PARTITION
        AnalysisService._partition_clauses(report, g.n, clustering.clusters, clustering.unclustered)

        # 2. NON-ADJACENCY
        index = clustering.cluster_index()
        edges = g.edges()
        if edges.size:
            a, b = index[edges[:, 0]], index[edges[:, 1]]
            clash = (a >= 0) & (b >= 0) & (a != b)
            report.check('non_adjacent', not clash.any(),
                         f"edge {tuple(edges[int(np.argmax(clash))].tolist())} joins two clusters")
        report.clauses.setdefault('non_adjacent', True)

        # 3. DIAMETER
        AnalysisService._diameter_clause(report, g, clustering.clusters, d)

        # 4. UNCLUSTERED FRACTION
        frac = clustering.unclustered.size / g.n if g.n else 0.0
        report.check('unclustered_fraction', clustering.unclustered.size <= lam * g.n + 1e-9,
                     f"{clustering.unclustered.size} unclustered > {lam} * {g.n}")
        report.metrics['lambda'] = frac
        return report

    @staticmethod
    def verify_decomposition(g, decomposition, alpha: int, d: int = None) -> ValidationReport:
        """
        Check an (alpha, d)-network decomposition on g

        Clauses: disjoint, covers_all, colors_in_range, diameter, same_color_non_adjacent
        """
        report = ValidationReport(subject='network_decomposition')
        clusters = decomposition.clusters
        AnalysisService._partition_clauses(report, g.n, clusters)

        colors = np.asarray(decomposition.colors, dtype=np.int64)
        report.check('colors_in_range', bool(((colors >= 1) & (colors <= alpha)).all()),
                     f"cluster colors must lie in 1..{alpha}")

        AnalysisService._diameter_clause(report, g, clusters, d)

        index = np.full(g.n, -1, dtype=np.int64)
        for i, c in enumerate(clusters):
            index[c] = i
        edges = g.edges()
        if edges.size and (index >= 0).all():
            a, b = index[edges[:, 0]], index[edges[:, 1]]
            clash = (a != b) & (colors[a] == colors[b])
            report.check('same_color_non_adjacent', not clash.any(),
                         f"edge {tuple(edges[int(np.argmax(clash))].tolist())} joins two clusters of one color")
        report.clauses.setdefault('same_color_non_adjacent', True)
        report.metrics['clusters'] = len(clusters)
        return report

    # ------------------------------------------------------------------
    # Statistics
    # ------------------------------------------------------------------

    @staticmethod
    def binomial_interval(successes: int, trials: int, level: float = 0.95) -> tuple:
        """Clopper-Pearson interval for a binomial proportion"""
        if trials <= 0:
            return 0.0, 1.0
        ci = stats.binomtest(int(successes), int(trials)).proportion_ci(
            confidence_level=level, method='exact')
        return float(ci.low), float(ci.high)
