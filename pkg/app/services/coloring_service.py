"""
Coloring Service
The hiding construction, coloring a network decomposition of G^3 with
layered palettes, and the end-to-end pipeline.

Cluster colors a < alpha color A plus a fringe of N(A) with palette p_a and
hide one class; color-alpha clusters are colored directly with p_alpha. A
node that received several colors keeps the largest non-hidden one.
"""
import logging

import numpy as np

from app.exceptions import BadParams, EmptyGraph, GuaranteeViolated, InvalidDecomposition
from app.models.coloring import HIDDEN, HIDDEN_INDEX, HidingRecord, PaletteColor, PipelineResult
from app.models.ledger import RoundLedger
from app.services.analysis_service import AnalysisService
from app.services.decomposition_service import DecompositionService
from app.services.graph_service import GraphService

logger = logging.getLogger(__name__)


class ColoringService:

    MODES = ('det', 'rand')

    @staticmethod
    def hide_coloring(g, nodes, budget: int = None) -> HidingRecord:
        """
        Color A so that one color class never touches the outside

        Args:
            g: Graph
            nodes: the cluster A (nonempty)
            budget: solver budget for the exact coloring of g[A u N(A)]

        Returns:
            HidingRecord with A' and phi over A' (HIDDEN_INDEX marks Hidden)
        """
        cluster = np.unique(np.asarray(nodes, dtype=np.int64))
        if cluster.size == 0:
            raise BadParams("Cannot hide-color an empty cluster")

        region = GraphService.neighborhood_of_set(g, cluster, 1)
        sub, _ = GraphService.induced_subgraph(g, region)
        cert = AnalysisService.exact_chromatic_number(sub, budget)
        psi = np.asarray(cert.coloring, dtype=np.int64)

        hidden = psi == cert.chi
        keep = np.isin(region, cluster) | ~hidden
        phi = {int(u): (HIDDEN_INDEX if hidden[i] else int(psi[i]))
               for i, u in enumerate(region) if keep[i]}
        return HidingRecord(
            cluster=tuple(cluster.tolist()),
            extended=tuple(region[keep].tolist()),
            phi=phi,
            chi_local=cert.chi,
        )

    @staticmethod
    def color_with_decomposition(g, decomposition, alpha: int, budget: int = None) -> PipelineResult:
        """
        Color g from a network decomposition of g^3

        Raises:
            InvalidDecomposition: the decomposition is not valid on g^3
            GuaranteeViolated: the final coloring is not proper
        """
        alpha = int(alpha)
        if g.n == 0:
            raise EmptyGraph("Cannot color the empty graph")

        # 1. VALIDATE the decomposition on g^3
        report = AnalysisService.verify_decomposition(GraphService.power_graph(g, 3), decomposition, alpha)
        if not report.passed:
            logger.error(f"Decomposition rejected: {report.violations[:3]}")
            raise InvalidDecomposition("Decomposition is not valid on the cube of the graph", report=report)

        # 2. COLOR cluster classes in order
        assigned = [[] for _ in range(g.n)]
        records = []
        chi_max = 1
        ledger = RoundLedger()
        for a in range(1, alpha + 1):
            cost = 0
            for cluster in decomposition.clusters_of_color(a):
                if a < alpha:
                    record = ColoringService.hide_coloring(g, cluster, budget)
                    records.append(record)
                    chi_max = max(chi_max, record.chi_local)
                    for u, c in record.phi.items():
                        assigned[u].append(HIDDEN if c == HIDDEN_INDEX else PaletteColor(a, c))
                else:
                    sub, _ = GraphService.induced_subgraph(g, cluster)
                    cert = AnalysisService.exact_chromatic_number(sub, budget)
                    chi_max = max(chi_max, cert.chi)
                    for u, c in zip(cluster.tolist(), cert.coloring):
                        assigned[u].append(HIDDEN if c == cert.chi else PaletteColor(a, c))
                cost = max(cost, GraphService.weak_diameter(g, cluster)
                           + RoundLedger.gather_cost(g, cluster)
                           + RoundLedger.broadcast_cost(g, cluster))
            ledger.charge(f"color_class_{a}", cost)

        # 3. RESOLVE conflicts: largest non-hidden color wins
        final = []
        for u, options in enumerate(assigned):
            visible = [c for c in options if not c.is_hidden]
            final.append(max(visible) if visible else HIDDEN)
        coloring = [c.remap(alpha) for c in final]

        proper, edge = AnalysisService.is_proper_coloring(g, coloring)
        if not proper:
            logger.error(f"Pipeline produced a monochromatic edge {edge}")
            raise GuaranteeViolated(f"Coloring is not proper at edge {edge}", edge=list(edge))

        return PipelineResult(
            n=g.n, m=g.m, alpha=alpha,
            coloring=coloring,
            colors_used=len(set(coloring)),
            proper=proper,
            chi_local_max=chi_max,
            ledger=ledger,
            decomposition=decomposition,
            hiding_records=records,
        )

    @staticmethod
    def full_pipeline(g, alpha: int, mode: str = 'det', seed: int = 0,
                      budget: int = None, beta: float = None, retry_limit: int = None) -> PipelineResult:
        """
        Network decomposition of g^3 followed by the decomposition coloring

        Args:
            g: Graph
            alpha: cluster colors; the result uses at most alpha*(chi-1)+1 colors
            mode: 'det' or 'rand' base clustering
            seed: master seed

        Returns:
            PipelineResult with rounds of the g^3 decomposition charged x3
        """
        if mode not in ColoringService.MODES:
            raise BadParams(f"Unknown mode '{mode}'", allowed=list(ColoringService.MODES))
        if g.n == 0:
            raise EmptyGraph("Cannot color the empty graph")

        cube = GraphService.power_graph(g, 3)
        decomposition = DecompositionService.network_decomposition(
            cube, alpha, base=mode, seed=seed, beta=beta, retry_limit=retry_limit)
        result = ColoringService.color_with_decomposition(g, decomposition, alpha, budget)

        ledger = RoundLedger()
        ledger.absorb(decomposition.ledger, prefix='netdec.', scale=3)
        ledger.absorb(result.ledger)
        result.ledger = ledger
        result.mode = mode
        result.seed = int(seed)
        logger.info(f"Pipeline alpha={alpha} mode={mode}: {result.colors_used} colors, "
                    f"{ledger.total} rounds on n={g.n}")
        return result
