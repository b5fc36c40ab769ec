"""
Adversary Service
Measures how often a candidate coloring algorithm (the victim) fails on each
cover element of a gadget, assembles a cheating instance from copies of the
worst element, and compares the instance failure rate with 1 - (1 - 1/k)^N.

Victims are sealed procedures (Graph, seed) -> coloring with a declared
locality and color count; the harness never looks inside them.
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from app.exceptions import BadParams, GuaranteeViolated, LocalityMismatch
from app.models.reports import AttackReport
from app.services.analysis_service import AnalysisService
from app.services.coloring_service import ColoringService
from app.services.gadget_service import GadgetService
from app.utils.seeding import derive_seed

logger = logging.getLogger(__name__)

# Classical independence is what makes copies fail independently
INDEPENDENCE_NOTE = ('classical randomness: copies use independent seeds, so failures '
                     'are independent across copies; non-signaling correlations are not modeled')

TRANSPORT = 'transport'
DIRECT = 'direct'
GLOBAL = 'global'


@dataclass(frozen=True)
class Victim:
    """
    locality: 0.. for a declared radius, None when the victim only claims
        to be at most the cover radius, GLOBAL when it reads the whole graph
    """

    name: str
    locality: object
    colors: int
    mode: str


def _run_victim(name: str, graph, seed: int, colors: int) -> list:
    """Module-level so worker processes can pickle it"""
    if name == 'const1':
        return [1] * graph.n
    if name in ('pipeline3', 'honest'):
        return list(ColoringService.full_pipeline(graph, 2, mode='rand', seed=seed).coloring)
    if name == 'exact':
        found = AnalysisService.k_coloring(graph, colors)
        return found if found is not None else [1] * graph.n
    raise BadParams(f"Unknown victim '{name}'")


def _patch_failures(graph, patches, coloring, colors) -> np.ndarray:
    """Per node set: a monochromatic edge inside it, or a color outside 1..c"""
    col = np.asarray(coloring, dtype=np.int64)
    edges = graph.edges()
    mono = col[edges[:, 0]] == col[edges[:, 1]] if edges.size else np.zeros(0, dtype=bool)
    out_of_range = (col < 1) | (col > colors)
    failed = np.zeros(len(patches), dtype=bool)
    for i, nodes in enumerate(patches):
        mask = np.zeros(graph.n, dtype=bool)
        mask[nodes] = True
        bad_edge = (mono & mask[edges[:, 0]] & mask[edges[:, 1]]).any() if edges.size else False
        failed[i] = bad_edge or out_of_range[nodes].any()
    return failed


class AdversaryService:

    VICTIMS = ('const1', 'pipeline3', 'honest', 'exact')

    @staticmethod
    def family_bound(family: str, params: dict) -> int:
        """Proven lower bound on the gadget's chromatic number"""
        if family == 'kb':
            return 4 if int(params['w']) % 2 else 2
        return int(params['k']) * (int(params['chi']) - 1) + 1

    @staticmethod
    def target_chi(family: str, params: dict) -> int:
        """Chromatic number of the family the cheating instances belong to"""
        return 2 if family == 'kb' else int(params['chi'])

    @staticmethod
    def make_victim(name: str, family: str, params: dict) -> Victim:
        chi = AdversaryService.target_chi(family, params)
        if name == 'const1':
            return Victim(name, 0, 3, TRANSPORT)
        if name == 'pipeline3':
            return Victim(name, None, 3, TRANSPORT)
        if name == 'honest':
            return Victim(name, GLOBAL, 2 * (chi - 1) + 1, DIRECT)
        if name == 'exact':
            return Victim(name, GLOBAL, chi, DIRECT)
        raise BadParams(f"Unknown victim '{name}'", allowed=list(AdversaryService.VICTIMS))

    @staticmethod
    def _colorings(victim: Victim, graph, seeds, jobs: int) -> list:
        if jobs > 1 and len(seeds) > 1:
            with ProcessPoolExecutor(max_workers=jobs) as executor:
                return list(executor.map(_run_victim, [victim.name] * len(seeds), [graph] * len(seeds),
                                         seeds, [victim.colors] * len(seeds)))
        return [_run_victim(victim.name, graph, s, victim.colors) for s in seeds]

    @staticmethod
    def estimate_failure(gadget, cover, victim: Victim, trials: int, seed: int,
                         jobs: int = 1, locality: Optional[int] = None) -> dict:
        """
        Per-element failure rates of a victim on the gadget

        Args:
            gadget: host Graph of the cover
            cover: SubgraphCover of the gadget
            victim: Victim (locality may be overridden by `locality`)
            trials: independent runs, trial t uses derive_seed(seed, t)

        Returns:
            dict: {'element_rates', 'whole_rate', 'element_failures', 'whole_failures'}

        Raises:
            LocalityMismatch: the victim's declared locality exceeds the cover radius
        """
        if trials < 1:
            raise BadParams(f"Need at least one trial, got {trials}")
        declared = victim.locality if locality is None else locality
        if isinstance(declared, int) and declared > cover.radius:
            raise LocalityMismatch(
                f"Victim locality {declared} exceeds the cover radius {cover.radius}",
                locality=declared, T=cover.radius)

        seeds = [derive_seed(seed, t) for t in range(trials)]
        per_element = np.zeros((trials, cover.size), dtype=bool)
        whole = np.zeros(trials, dtype=bool)
        everything = [np.arange(gadget.n)]
        for t, coloring in enumerate(AdversaryService._colorings(victim, gadget, seeds, jobs)):
            per_element[t] = _patch_failures(gadget, cover.elements, coloring, victim.colors)
            whole[t] = _patch_failures(gadget, everything, coloring, victim.colors)[0]

        rates = per_element.mean(axis=0)
        whole_rate = float(whole.mean())
        bound = AdversaryService.family_bound(cover.family, cover.params)
        if victim.colors < bound and whole_rate < 1.0:
            logger.error(f"{victim.name} succeeded on a gadget needing {bound} > {victim.colors} colors")
            raise GuaranteeViolated(
                f"Victim {victim.name} colored a gadget with chromatic number >= {bound} "
                f"using {victim.colors} colors", whole_rate=whole_rate)
        logger.info(f"{victim.name} on {cover.family}: element rates {rates.round(3).tolist()}, "
                    f"whole {whole_rate:.3f}")
        return {
            'element_rates': [float(x) for x in rates],
            'whole_rate': whole_rate,
            'element_failures': per_element,
            'whole_failures': whole,
        }

    @staticmethod
    def run_attack(family: str, params: dict, victim_name: str, copies: int, trials: int, seed: int,
                   jobs: int = 1, n: int = None, target: tuple = None,
                   locality: Optional[int] = None, keep_trials: bool = False) -> AttackReport:
        """
        Full attack: per-element estimate, argmax element, cheating instance, amplified rate

        Args:
            family: 'rjoin' or 'kb'
            params: gadget parameters
            victim_name: one of VICTIMS
            copies: N, copies of the chosen element in the instance
            trials: runs for both the estimate and the instance
            seed: master seed

        Returns:
            AttackReport
        """
        if copies < 1:
            raise BadParams(f"Need at least one copy, got {copies}")
        cover = GadgetService.build_cover(family, params)
        victim = AdversaryService.make_victim(victim_name, family, params)

        # 1. ESTIMATE per-element failure on the gadget
        estimate = AdversaryService.estimate_failure(
            cover.host, cover, victim, trials, derive_seed(seed, 0), jobs, locality)
        rates = estimate['element_rates']
        chosen = int(np.argmax(rates)) + 1

        # 2. ASSEMBLE the cheating instance x = (i*, ..., i*)
        instance = GadgetService.assemble_cheating_instance(
            family, params, [chosen] * copies, n=n, target=target, cover=cover)

        # 3. RUN on the instance
        failures = AdversaryService._instance_failures(instance, cover, victim, trials, seed, jobs)
        hits = int(failures.any(axis=1).sum())
        rate = hits / trials
        k = cover.size
        report = AttackReport(
            gadget=f"{family}:" + ','.join(f"{key}={value}" for key, value in sorted(params.items())),
            cover_size=k,
            radius=cover.radius,
            victim=victim.name,
            claimed_colors=victim.colors,
            mode=victim.mode,
            trials=trials,
            seed=int(seed),
            element_rates=rates,
            whole_gadget_rate=estimate['whole_rate'],
            chosen_index=chosen,
            copies=copies,
            instance_failures=hits,
            instance_rate=rate,
            interval=AnalysisService.binomial_interval(hits, trials),
            theoretical_bound=1.0 - (1.0 - 1.0 / k) ** copies,
            product_law=1.0 - (1.0 - rates[chosen - 1]) ** copies,
            assumption=INDEPENDENCE_NOTE,
        )
        if keep_trials:
            report.trial_outcomes = [
                {'trial': t, 'failed': bool(row.any()), 'copies_failed': int(row.sum())}
                for t, row in enumerate(failures)
            ]
        logger.info(f"Attack {report.gadget} x{copies}: instance rate {rate:.3f} "
                    f"vs bound {report.theoretical_bound:.3f}")
        return report

    @staticmethod
    def _instance_failures(instance, cover, victim, trials, seed, jobs) -> np.ndarray:
        """trials x copies matrix of patch failures"""
        graph = instance.graph
        out = np.zeros((trials, instance.copies), dtype=bool)

        if victim.mode == DIRECT:
            seeds = [derive_seed(seed, 1, t) for t in range(trials)]
            for t, coloring in enumerate(AdversaryService._colorings(victim, graph, seeds, jobs)):
                out[t] = _patch_failures(graph, instance.patches, coloring, victim.colors)
            return out

        # Each copy is an independent run on the gadget whose colors are carried
        # through the patch map; the copy's view equals the element's view.
        seeds = [derive_seed(seed, 1, t, j) for t in range(trials) for j in range(instance.copies)]
        runs = AdversaryService._colorings(victim, cover.host, seeds, jobs)
        for t in range(trials):
            coloring = np.ones(graph.n, dtype=np.int64)
            for j, mapping in enumerate(instance.patch_maps):
                source = np.asarray(runs[t * instance.copies + j], dtype=np.int64)
                gadget_ids = np.fromiter(mapping.keys(), dtype=np.int64)
                coloring[np.fromiter(mapping.values(), dtype=np.int64)] = source[gadget_ids]
            out[t] = _patch_failures(graph, instance.patches, coloring, victim.colors)
        return out
