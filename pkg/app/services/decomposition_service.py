"""
Decomposition Service
Network decomposition from repeated epsilon-clustering: alpha-1 clustering
passes, each pass one cluster color, then every connected component of the
survivors becomes a cluster of color alpha.
"""
import logging
import math

import numpy as np

from app.exceptions import BadParams, EmptyGraph
from app.models.clustering import NetworkDecomposition
from app.models.ledger import RoundLedger
from app.services.clustering_service import ClusteringService
from app.services.graph_service import GraphService
from app.utils.seeding import derive_seed

logger = logging.getLogger(__name__)


class DecompositionService:

    @staticmethod
    def epsilon_for(n: int, alpha: int) -> float:
        """eps = (g_hat / n)^(1/alpha) with g_hat = ceil(log2 n), capped at 1"""
        g_hat = max(1, math.ceil(math.log2(n))) if n > 1 else 1
        return min(1.0, (g_hat / n) ** (1.0 / alpha))

    @staticmethod
    def network_decomposition(g, alpha: int, base: str = 'rand', seed: int = 0,
                              beta: float = None, retry_limit: int = None) -> NetworkDecomposition:
        """
        Compute an (alpha, d)-network decomposition of g

        Args:
            g: Graph the decomposition must be valid on
            alpha: number of cluster colors (>= 1)
            base: base clusterer, 'rand' or 'det'
            seed: master seed; pass i uses derive_seed(seed, i)

        Returns:
            NetworkDecomposition with the measured max weak diameter
        """
        alpha = int(alpha)
        if alpha < 1:
            raise BadParams(f"alpha must be at least 1, got {alpha}")
        if g.n == 0:
            raise EmptyGraph("Cannot decompose the empty graph")

        n = g.n
        eps = DecompositionService.epsilon_for(n, alpha)
        alive = np.ones(n, dtype=bool)
        clusters, colors = [], []
        ledger = RoundLedger()

        # 1. CLUSTERING PASSES, one per color 1..alpha-1
        for color in range(1, alpha):
            nodes = np.flatnonzero(alive)
            if nodes.size == 0:
                break
            sub, _ = GraphService.induced_subgraph(g, nodes)
            clustering = ClusteringService.eps_cluster(
                sub, eps, base, derive_seed(seed, color), retry_limit=retry_limit, beta=beta)
            ledger.absorb(clustering.ledger, prefix=f"color{color}.")
            for c in clustering.clusters:
                clusters.append(nodes[c])
                colors.append(color)
                alive[nodes[c]] = False
            logger.info(f"Pass {color}: {len(clustering.clusters)} clusters, "
                        f"{int(alive.sum())}/{n} nodes left")

        # 2. LEFTOVER COMPONENTS get color alpha
        nodes = np.flatnonzero(alive)
        if nodes.size:
            sub, _ = GraphService.induced_subgraph(g, nodes)
            spread = 0
            for comp in GraphService.connected_components(sub):
                clusters.append(nodes[comp])
                colors.append(alpha)
                spread = max(spread, GraphService.weak_diameter(sub, comp))
            ledger.charge('components', spread)

        d = max(GraphService.weak_diameter(g, c) for c in clusters)
        return NetworkDecomposition(
            n, clusters, colors, alpha, max_diameter=d, ledger=ledger,
            meta={'eps': eps, 'base': base, 'seed': int(seed)},
        )
