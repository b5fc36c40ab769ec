import itertools
import math

import numpy as np
import pytest

from app.exceptions import BadParams, BudgetExceeded, EmptyGraph
from app.models.clustering import Clustering, NetworkDecomposition
from app.services.analysis_service import AnalysisService
from app.services.graph_service import GraphService


def _brute_force_chi(g):
    if g.m == 0:
        return 1
    edges = g.edges()
    for k in range(1, g.n + 1):
        for coloring in itertools.product(range(k), repeat=g.n):
            col = np.asarray(coloring)
            if (col[edges[:, 0]] != col[edges[:, 1]]).all():
                return k
    return g.n


# ---------------------------------------------------------------- colorings

def test_proper_coloring_detects_first_bad_edge(c5):
    assert AnalysisService.is_proper_coloring(c5, [1, 2, 1, 2, 3]) == (True, None)
    assert AnalysisService.is_proper_coloring(c5, [1, 2, 1, 2, 1]) == (False, (0, 4))


def test_proper_coloring_length_mismatch(c5):
    with pytest.raises(BadParams):
        AnalysisService.is_proper_coloring(c5, [1, 2])


def test_proper_coloring_matches_naive_scan(petersen):
    rng = np.random.default_rng(11)
    for _ in range(200):
        coloring = rng.integers(1, 4, size=petersen.n)
        naive = all(coloring[u] != coloring[v] for u, v in petersen.edges())
        assert AnalysisService.is_proper_coloring(petersen, coloring)[0] == naive


# ---------------------------------------------------------------- exact chromatic number

@pytest.mark.parametrize('fixture, chi', [
    ('c5', 3), ('c6', 2), ('k4', 4), ('petersen', 3), ('grid8', 2), ('path5', 2),
])
def test_exact_chromatic_number_known_values(request, fixture, chi):
    g = request.getfixturevalue(fixture)
    cert = AnalysisService.exact_chromatic_number(g)
    assert cert.chi == chi
    assert AnalysisService.verify_certificate(g, cert).passed


def test_certificate_coloring_is_one_based(c5):
    cert = AnalysisService.exact_chromatic_number(c5)
    assert min(cert.coloring) == 1
    assert max(cert.coloring) == 3
    assert len(cert.clique) == 2


def test_edgeless_graph_has_chi_one():
    cert = AnalysisService.exact_chromatic_number(GraphService.build_graph(3, []))
    assert cert.chi == 1


def test_empty_graph_rejected():
    with pytest.raises(EmptyGraph):
        AnalysisService.exact_chromatic_number(GraphService.build_graph(0, []))


def test_budget_exceeded_carries_bracket(petersen):
    with pytest.raises(BudgetExceeded) as info:
        AnalysisService.exact_chromatic_number(petersen, budget=1)
    assert info.value.lo == 2
    assert info.value.hi >= 3
    assert info.value.exit_code == 3


@pytest.fixture
def cp_sat_only(monkeypatch):
    """Every k-coloring question skips backtracking and goes to CP-SAT"""
    def give_up(nbrs, k, clique, budget):
        budget.tick()
        raise BudgetExceeded('backtracking disabled')

    monkeypatch.setattr('app.services.analysis_service._k_colorable', give_up)


@pytest.mark.parametrize('fixture, chi', [('c5', 3), ('k4', 4), ('petersen', 3), ('grid8', 2)])
def test_cp_sat_decides_what_backtracking_leaves(cp_sat_only, request, fixture, chi):
    g = request.getfixturevalue(fixture)
    cert = AnalysisService.exact_chromatic_number(g)
    assert cert.chi == chi
    assert AnalysisService.verify_certificate(g, cert).passed


def test_cp_sat_refutes_three_colors_on_odd_kb_gadget(cp_sat_only):
    from app.services.gadget_service import GadgetService
    assert AnalysisService.k_coloring(GadgetService.kb_gadget(5, 5), 3) is None


def test_backtracking_slice_hands_over_to_cp_sat(monkeypatch, petersen):
    monkeypatch.setattr('config.Config.SOLVER_BACKTRACK_SLICE', 1)
    cert = AnalysisService.exact_chromatic_number(petersen)
    assert cert.chi == 3
    assert AnalysisService.verify_certificate(petersen, cert).passed


def test_hint_is_used_as_upper_bound(grid8):
    hint = [(i % 8 + i // 8) % 2 + 5 for i in range(64)]
    cert = AnalysisService.exact_chromatic_number(grid8, hint=hint)
    assert cert.chi == 2


def test_matches_brute_force_on_small_graphs():
    rng = np.random.default_rng(5)
    for _ in range(60):
        n = int(rng.integers(1, 7))
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.5]
        g = GraphService.build_graph(n, pairs)
        assert AnalysisService.exact_chromatic_number(g).chi == _brute_force_chi(g)


def test_verify_certificate_rejects_tampering(c5):
    cert = AnalysisService.exact_chromatic_number(c5)
    cert.coloring = (1,) * 5
    report = AnalysisService.verify_certificate(c5, cert)
    assert not report.passed
    assert report.clauses['coloring'] is False


def test_k_coloring(c5):
    assert AnalysisService.k_coloring(c5, 2) is None
    found = AnalysisService.k_coloring(c5, 3)
    assert AnalysisService.is_proper_coloring(c5, found)[0]
    assert max(found) <= 3


# ---------------------------------------------------------------- local facts

def test_local_chromatic_number_of_odd_cycle(c5):
    assert AnalysisService.local_chromatic_number(c5, 1) == (2, 0)
    assert AnalysisService.local_chromatic_number(c5, 2) == (3, 0)


def test_girth(c6, petersen, k4, path5):
    assert AnalysisService.girth(c6) == 6
    assert AnalysisService.girth(petersen) == 5
    assert AnalysisService.girth(k4) == 3
    assert AnalysisService.girth(path5) == math.inf


def test_graph_stats(path5):
    stats = AnalysisService.graph_stats(path5)
    assert stats == {'n': 5, 'm': 4, 'connected': True, 'max_degree': 2, 'diameter': 4}


def test_graph_stats_disconnected_omits_diameter():
    stats = AnalysisService.graph_stats(GraphService.build_graph(3, [(0, 1)]))
    assert stats['connected'] is False
    assert 'diameter' not in stats


# ---------------------------------------------------------------- verifiers

def test_verify_clustering_accepts_separated_clusters(path5):
    clustering = Clustering(5, [[0, 1], [3, 4]], [2])
    report = AnalysisService.verify_clustering(path5, clustering, lam=0.25, d=1)
    assert report.passed
    assert report.metrics['lambda'] == pytest.approx(0.2)


def test_verify_clustering_flags_adjacent_clusters(path5):
    clustering = Clustering(5, [[0, 1], [2, 3]], [4])
    report = AnalysisService.verify_clustering(path5, clustering, lam=0.25)
    assert report.clauses['non_adjacent'] is False
    assert not report.passed


def test_verify_clustering_flags_too_many_unclustered(path5):
    clustering = Clustering(5, [[0]], [1, 2, 3, 4])
    report = AnalysisService.verify_clustering(path5, clustering, lam=0.5)
    assert report.clauses['unclustered_fraction'] is False


def test_verify_decomposition(path5):
    good = NetworkDecomposition(5, [[0, 1], [2, 3], [4]], [1, 2, 1], alpha=2)
    assert AnalysisService.verify_decomposition(path5, good, 2, d=1).passed

    bad = NetworkDecomposition(5, [[0, 1], [2, 3], [4]], [1, 1, 2], alpha=2)
    report = AnalysisService.verify_decomposition(path5, bad, 2)
    assert report.clauses['same_color_non_adjacent'] is False


def test_verify_decomposition_diameter_bound(path5):
    decomposition = NetworkDecomposition(5, [[0, 1, 2, 3, 4]], [1], alpha=1)
    report = AnalysisService.verify_decomposition(path5, decomposition, 1, d=3)
    assert report.clauses['diameter'] is False
    assert report.metrics['max_diameter'] == 4


# ---------------------------------------------------------------- statistics

def test_binomial_interval():
    lo, hi = AnalysisService.binomial_interval(5, 10)
    assert lo < 0.5 < hi
    assert AnalysisService.binomial_interval(0, 0) == (0.0, 1.0)
    lo, hi = AnalysisService.binomial_interval(10, 10)
    assert hi == pytest.approx(1.0)
    assert lo > 0.6
