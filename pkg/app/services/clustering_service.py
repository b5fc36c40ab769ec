"""
Clustering Service
Base (1/2, O(log n))-clusterings and the epsilon-clustering bootstrap that
runs a base clustering on G^(2R+1) and carves the sparsest sphere around each
cluster.
"""
import logging
import math

import numpy as np

from config import Config
from app.exceptions import BadParams, GuaranteeViolated
from app.models.clustering import Clustering
from app.models.ledger import RoundLedger
from app.services.analysis_service import AnalysisService
from app.services.graph_service import GraphService
from app.utils.seeding import derive_seed, make_rng

logger = logging.getLogger(__name__)

_ASSIGN_CHUNK = 256


def _cluster_diameters(g, clusters) -> int:
    return max((GraphService.weak_diameter(g, c) for c in clusters), default=0)


class ClusteringService:
    """Base clusterers and the bootstrap"""

    BASES = ('rand', 'det')

    @staticmethod
    def base_cluster_rand(g, beta: float = None, seed: int = 0) -> Clustering:
        """
        Exponential-shift Voronoi clustering

        Every node draws a shift from Exponential(beta) truncated at
        ceil((2/beta) ln n) and each node joins the center minimizing
        distance - shift (ties: lowest center id). Nodes with a neighbor in
        another cell become unclustered.

        Args:
            g: Graph (a lazy power graph is fine, only distances are read)
            beta: rate in (0, 1), defaults to Config.DEFAULT_BETA
            seed: shift randomness

        Returns:
            Clustering
        """
        beta = Config.DEFAULT_BETA if beta is None else float(beta)
        if not 0.0 < beta < 1.0:
            raise BadParams(f"beta must lie in (0, 1), got {beta}")
        n = g.n
        ledger = RoundLedger()
        if n == 0:
            return Clustering(0, [], [], ledger, meta={'base': 'rand', 'beta': beta})

        cap = math.ceil((2.0 / beta) * math.log(n))
        shifts = np.minimum(make_rng(seed).exponential(1.0 / beta, size=n), cap)

        # 1. ASSIGN each node to the center minimizing distance - shift
        dist = g.distance_matrix()
        cell = np.empty(n, dtype=np.int64)
        for start in range(0, n, _ASSIGN_CHUNK):
            block = dist[:, start:start + _ASSIGN_CHUNK].astype(np.float64)
            block[block < 0] = np.inf
            cell[start:start + _ASSIGN_CHUNK] = np.argmin(block - shifts[:, None], axis=0)

        # 2. CUT nodes touching another cell
        cut = np.zeros(n, dtype=bool)
        for start in range(0, n, _ASSIGN_CHUNK):
            rows = slice(start, start + _ASSIGN_CHUNK)
            touching = (dist[rows] == 1) & (cell[None, :] != cell[rows, None])
            cut[rows] = touching.any(axis=1)

        kept = np.flatnonzero(~cut)
        clusters = [kept[cell[kept] == c] for c in np.unique(cell[kept])]
        ledger.charge('base_cluster_rand', math.ceil(float(shifts.max())) + 1)

        result = Clustering(
            n, clusters, np.flatnonzero(cut), ledger,
            max_diameter=_cluster_diameters(g, clusters),
            meta={'base': 'rand', 'beta': beta, 'seed': int(seed)},
        )
        logger.debug(f"rand base: {len(result.clusters)} clusters, {result.unclustered.size}/{n} cut")
        return result

    @staticmethod
    def base_cluster_det(g) -> Clustering:
        """
        Sequential ball carving

        From the lowest remaining id, grow a ball while the next layer at
        least doubles it; the ball is a cluster, the next layer is deleted.
        Sequential, so its rounds are flagged structural.
        """
        n = g.n
        adj = g.adjacency
        alive = np.ones(n, dtype=bool)
        clusters, unclustered = [], []
        ledger = RoundLedger()

        while alive.any():
            v = int(np.argmax(alive))
            in_ball = np.zeros(n, dtype=bool)
            in_ball[v] = True
            ball, layer, radius = [v], np.array([v]), 0
            while True:
                reach = np.unique(adj[layer].indices)
                nxt = reach[alive[reach] & ~in_ball[reach]]
                if len(ball) + nxt.size < 2 * len(ball):
                    break
                in_ball[nxt] = True
                ball.extend(nxt.tolist())
                layer = nxt
                radius += 1
            clusters.append(np.array(ball))
            unclustered.extend(nxt.tolist())
            alive[ball] = False
            alive[nxt] = False
            ledger.charge('base_cluster_det', radius + 1, structural=True)

        return Clustering(
            n, clusters, unclustered, ledger,
            max_diameter=_cluster_diameters(g, clusters),
            meta={'base': 'det'},
        )

    @staticmethod
    def run_base(g, base: str, seed: int, beta: float = None) -> Clustering:
        if base == 'rand':
            return ClusteringService.base_cluster_rand(g, beta, seed)
        if base == 'det':
            return ClusteringService.base_cluster_det(g)
        raise BadParams(f"Unknown base clusterer '{base}'", allowed=list(ClusteringService.BASES))

    @staticmethod
    def eps_cluster(g, eps: float, base: str = 'rand', seed: int = 0,
                    retry_limit: int = None, beta: float = None) -> Clustering:
        """
        Bootstrapped epsilon-clustering

        Args:
            g: Graph
            eps: target unclustered fraction in (0, 1]
            base: 'rand' or 'det'
            seed: master seed; retry i runs with seed + i
            retry_limit: extra attempts for the randomized base

        Returns:
            Clustering whose guarantees were checked post hoc

        Raises:
            GuaranteeViolated: every attempt missed a guarantee
        """
        eps = float(eps)
        if not 0.0 < eps <= 1.0:
            raise BadParams(f"eps must lie in (0, 1], got {eps}")
        if base not in ClusteringService.BASES:
            raise BadParams(f"Unknown base clusterer '{base}'", allowed=list(ClusteringService.BASES))
        retry_limit = Config.RETRY_LIMIT if retry_limit is None else int(retry_limit)

        attempts = retry_limit + 1 if base == 'rand' else 1
        report = None
        for attempt in range(attempts):
            clustering, report = ClusteringService._eps_cluster_once(g, eps, base, seed + attempt, beta)
            if report.passed:
                clustering.meta['attempts'] = attempt + 1
                return clustering
            logger.warning(f"eps_cluster attempt {attempt + 1} failed: {report.violations[:3]}")

        logger.error(f"eps_cluster gave up after {attempts} attempts")
        raise GuaranteeViolated(f"eps_cluster missed its guarantees after {attempts} attempts", report=report)

    @staticmethod
    def _eps_cluster_once(g, eps, base, seed, beta):
        n = g.n
        radius = math.ceil(4.0 / eps)
        scale = 2 * radius + 1
        iterations = math.ceil(2.0 * math.log2(1.0 / eps)) if eps < 1.0 else 0

        alive = np.ones(n, dtype=bool)
        clusters = []
        separation = []
        ledger = RoundLedger()
        d_base = 0

        for it in range(iterations):
            nodes = np.flatnonzero(alive)
            if nodes.size == 0:
                break
            work, _ = GraphService.induced_subgraph(g, nodes)
            base_cl = ClusteringService.run_base(
                GraphService.power_graph(work, scale), base, derive_seed(seed, it), beta)
            ledger.absorb(base_cl.ledger, prefix=f"iter{it}.", scale=scale)
            d_base = max(d_base, base_cl.max_diameter)

            carved = []
            cost = 0
            for c in base_cl.clusters:
                dist = work.distances_from(c, limit=radius)
                # 1. SPARSEST SPHERE j* in 1..R (ties: smallest)
                shells = np.bincount(dist[dist >= 0], minlength=radius + 1)
                j_star = 1 + int(np.argmin(shells[1:radius + 1]))
                inner = np.flatnonzero((dist >= 0) & (dist < j_star))
                sphere = np.flatnonzero(dist == j_star)
                logger.debug(f"iter {it}: cluster of {c.size} -> j*={j_star}, sphere {sphere.size}")

                carved.append(inner)
                alive[nodes[inner]] = False
                # the sphere keeps clusters of one iteration >= 4 apart; a later iteration may
                # carve right behind it, so across iterations clusters are only non-adjacent (>= 2)
                alive[nodes[sphere]] = False
                clusters.append(nodes[inner])
                cost = max(cost, RoundLedger.gather_cost(work, c, radius=radius)
                           + RoundLedger.broadcast_cost(work, c, radius=j_star))
            ledger.charge(f"iter{it}.carve", cost)
            separation.extend(ClusteringService._separation_violations(work, carved, it))

        clustered = np.zeros(n, dtype=bool)
        for c in clusters:
            clustered[c] = True
        d_bound = scale * d_base + 2 * radius - 2
        clustering = Clustering(
            n, clusters, np.flatnonzero(~clustered), ledger,
            max_diameter=_cluster_diameters(g, clusters),
            meta={'base': base, 'eps': eps, 'R': radius, 'iterations': iterations,
                  'seed': int(seed), 'd_base': int(d_base), 'd_bound': int(d_bound)},
        )

        report = AnalysisService.verify_clustering(g, clustering, eps, d_bound)
        report.check('separation', not separation, '; '.join(separation[:3]))
        return clustering, report

    @staticmethod
    def _separation_violations(work, carved, iteration) -> list:
        """Clusters of one iteration must be at distance >= 4 in that iteration's graph"""
        owner = np.full(work.n, -1, dtype=np.int64)
        for i, c in enumerate(carved):
            owner[c] = i
        out = []
        for i, c in enumerate(carved):
            near = np.flatnonzero(work.distances_from(c, limit=3) >= 0)
            others = owner[near]
            if ((others >= 0) & (others != i)).any():
                out.append(f"iteration {iteration}: cluster {i} within distance 3 of another")
        return out
