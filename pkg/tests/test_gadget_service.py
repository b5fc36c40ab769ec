import pytest

from app.exceptions import BadParams, DoesNotFit, SizeLimit
from app.services.analysis_service import AnalysisService
from app.services.gadget_service import GadgetService
from app.services.graph_service import GraphService


# ---------------------------------------------------------------- r-join gadgets

@pytest.mark.parametrize('chi, r, k, size', [
    (2, 2, 1, 2), (2, 3, 2, 28), (3, 3, 2, 60), (2, 2, 3, 182),
])
def test_rjoin_size(chi, r, k, size):
    assert GadgetService.rjoin_size(chi, r, k) == size
    assert GadgetService.rjoin_size(chi, r, k) == ((2 * r * chi + 1) ** k - 1) // (2 * r)


def test_rjoin_gadget_is_connected_with_meta():
    g = GadgetService.rjoin_gadget(2, 3, 2)
    assert g.n == 28
    assert GraphService.is_connected(g)
    assert g.meta == {'family': 'rjoin', 'chi': 2, 'r': 3, 'k': 2}
    assert g.labels[0] == '1:0'


def test_rjoin_gadget_chromatic_lower_bound():
    g = GadgetService.rjoin_gadget(2, 2, 2)
    assert AnalysisService.exact_chromatic_number(g).chi >= 2 * (2 - 1) + 1


def test_rjoin_gadget_rejects_bad_params():
    with pytest.raises(BadParams) as info:
        GadgetService.rjoin_gadget(1, 1, 0)
    assert set(info.value.details) == {'chi', 'r', 'k'}


def test_rjoin_gadget_size_limit(monkeypatch):
    monkeypatch.setattr('config.Config.MAX_GADGET_NODES', 50)
    with pytest.raises(SizeLimit):
        GadgetService.rjoin_gadget(3, 3, 2)


def test_rjoin_cover_needs_r_three_and_k_two():
    with pytest.raises(BadParams):
        GadgetService.rjoin_cover(2, 2, 2)
    with pytest.raises(BadParams):
        GadgetService.rjoin_cover(2, 3, 1)


def test_rjoin_cover_certificates_hold():
    cover = GadgetService.rjoin_cover(2, 3, 2)
    assert cover.size == 2
    assert cover.radius == 2
    report = GadgetService.verify_cover(cover.host, cover, 2)
    assert report.passed, report.violations
    assert report.metrics['T'] == 2
    assert len(report.metrics['certificates']) == 2


@pytest.mark.slow
@pytest.mark.parametrize('chi, k', [(2, 3), (3, 2)])
def test_larger_rjoin_covers(chi, k):
    cover = GadgetService.rjoin_cover(chi, 3, k)
    assert cover.size == k
    assert GadgetService.verify_cover(cover.host, cover, chi).passed


# ---------------------------------------------------------------- Klein-bottle gadgets

def test_kb_gadget_is_a_quadrangulation():
    g = GadgetService.kb_gadget(9, 9)
    assert g.n == 81
    assert g.m == 2 * g.n
    assert g.meta == {'family': 'kb', 'w': 9, 'hh': 9}
    assert g.labels[10] == '1,1'


def test_kb_gadget_girth_is_four():
    assert AnalysisService.girth(GadgetService.kb_gadget(5, 5)) == 4


@pytest.mark.parametrize('width, height', [(3, 5), (5, 5)])
def test_odd_kb_gadget_needs_four_colors(width, height):
    g = GadgetService.kb_gadget(width, height)
    assert AnalysisService.exact_chromatic_number(g).chi >= 4


def test_kb_gadget_rejects_small_sides():
    with pytest.raises(BadParams):
        GadgetService.kb_gadget(1, 5)


def test_kb_parity_follows_width():
    for width in range(2, 16):
        for height in range(2, 16):
            parity = GadgetService.kb_parity(width, height)
            assert parity['parity'] == ('odd' if width % 2 else 'even')


def test_kb_parity_breaking_edges_sit_on_the_seam():
    parity = GadgetService.kb_parity(5, 5)
    assert parity['count'] == 5
    for p, q in parity['breaking_edges']:
        assert p[1] == 0 and q[1] == 0
        assert abs(p[0] - q[0]) == 1


@pytest.mark.parametrize('width, height', [(4, 9), (9, 5), (8, 8), (5, 5), (7, 5), (5, 9)])
def test_kb_cover_needs_odd_sides_of_seven(width, height):
    with pytest.raises(BadParams):
        GadgetService.kb_cover(width, height)


def test_kb_cover_elements_are_grid_patches():
    cover = GadgetService.kb_cover(9, 9)
    assert cover.size == 4
    assert cover.radius == 1
    report = GadgetService.verify_cover(cover.host, cover, 2)
    assert report.passed, report.violations
    assert report.clauses['grid_patch']
    assert all(c['grid_patch_isomorphic'] for c in report.metrics['certificates'])


@pytest.mark.parametrize('side', [7, 9, pytest.param(11, marks=pytest.mark.slow),
                                  pytest.param(13, marks=pytest.mark.slow)])
def test_every_kb_cover_element_induces_the_core_grid(side):
    cover = GadgetService.kb_cover(side, side)
    a = (side + 5) // 2
    core = GadgetService.kb_core_patch(side, side)
    assert [e.size for e in cover.elements] == [a * a] * 4
    for element in cover.elements:
        inner, _ = GraphService.induced_subgraph(cover.host, element)
        assert GraphService.is_isomorphic(inner, core)[0]
    report = GadgetService.verify_cover(cover.host, cover, 2)
    assert report.passed, report.violations
    assert cover.radius == (side - 5) // 4


def _lattice_neighborhood(width, height, radius):
    """Induced radius-T neighborhood of the core rectangle inside a plain lattice"""
    a, b = (width + 5) // 2, (height + 5) // 2
    lattice_w = a + 2 * radius
    lattice = GraphService.grid_graph(lattice_w, b + 2 * radius)
    box = [y * lattice_w + x for x in range(radius, radius + a) for y in range(radius, radius + b)]
    view, _ = GraphService.induced_subgraph(lattice, GraphService.neighborhood_of_set(lattice, box, radius))
    return view


def test_kb_neighborhood_wraps_around_the_seam_when_width_is_one_mod_four():
    cover = GadgetService.kb_cover(9, 9)
    element = cover.elements[0]
    induced, _ = GadgetService.element_view(cover.host, element, 1, 'induced')
    local, _ = GadgetService.element_view(cover.host, element, 1, 'local_view')
    # the outer ring closes into odd cycles; the edges closing it join nodes at distance T
    assert AnalysisService.k_coloring(induced, 2) is None
    assert not GraphService.is_isomorphic(induced, _lattice_neighborhood(9, 9, 1))[0]
    reference, _, _ = GadgetService.kb_reference_patch(9, 9, 1)
    assert GraphService.is_isomorphic(local, reference)[0]
    assert AnalysisService.exact_chromatic_number(local).chi == 2


@pytest.mark.slow
def test_kb_neighborhood_is_a_lattice_patch_when_width_is_three_mod_four():
    cover = GadgetService.kb_cover(11, 11)
    for element in cover.elements:
        induced, _ = GadgetService.element_view(cover.host, element, 1, 'induced')
        assert GraphService.is_isomorphic(induced, _lattice_neighborhood(11, 11, 1))[0]


@pytest.mark.slow
@pytest.mark.parametrize('width, height', [
    (w, h) for w in range(3, 14, 2) for h in range(5, 14) if w * h <= 169
])
def test_odd_kb_gadgets_are_not_three_colorable(width, height):
    assert AnalysisService.k_coloring(GadgetService.kb_gadget(width, height), 3) is None


def test_verify_cover_flags_uncovered_nodes():
    cover = GadgetService.rjoin_cover(2, 3, 2)
    cover.elements = cover.elements[:1]
    cover.certificates = cover.certificates[:1]
    report = GadgetService.verify_cover(cover.host, cover, 2)
    assert not report.passed


def test_build_cover_rejects_unknown_family():
    with pytest.raises(BadParams):
        GadgetService.build_cover('moebius', {})


# ---------------------------------------------------------------- cheating instances

def test_chromatic_cheating_instance():
    instance = GadgetService.assemble_cheating_instance('rjoin', {'chi': 2, 'r': 3, 'k': 2}, [2, 2])
    assert instance.copies == 2
    assert GraphService.is_connected(instance.graph)
    assert AnalysisService.exact_chromatic_number(instance.graph).chi == 2
    assert instance.target['kind'] == 'chromatic'
    assert instance.marked.size == sum(p.size for p in instance.patches)


def test_chromatic_cheating_instance_pads_to_target_size():
    base = GadgetService.assemble_cheating_instance('rjoin', {'chi': 2, 'r': 3, 'k': 2}, [1])
    padded = GadgetService.assemble_cheating_instance('rjoin', {'chi': 2, 'r': 3, 'k': 2}, [1],
                                                      n=base.graph.n + 6)
    assert padded.graph.n == base.graph.n + 6
    assert padded.graph.m == base.graph.m + 6


def test_chromatic_cheating_instance_too_small_target():
    with pytest.raises(DoesNotFit):
        GadgetService.assemble_cheating_instance('rjoin', {'chi': 2, 'r': 3, 'k': 2}, [1], n=3)


def test_cheating_instance_index_out_of_range():
    with pytest.raises(BadParams):
        GadgetService.assemble_cheating_instance('rjoin', {'chi': 2, 'r': 3, 'k': 2}, [3])
    with pytest.raises(DoesNotFit):
        GadgetService.assemble_cheating_instance('rjoin', {'chi': 2, 'r': 3, 'k': 2}, [])


def test_grid_cheating_instance_is_the_target_grid():
    instance = GadgetService.assemble_cheating_instance('kb', {'w': 9, 'hh': 9}, [2], target=(9, 9))
    grid = GraphService.grid_graph(9, 9)
    assert instance.graph.sha256() == grid.sha256()
    assert AnalysisService.exact_chromatic_number(instance.graph).chi == 2
    assert instance.to_dict()['target'] == {'kind': 'grid', 'w': 9, 'hh': 9}


def test_grid_cheating_instance_must_fit():
    with pytest.raises(DoesNotFit):
        GadgetService.assemble_cheating_instance('kb', {'w': 9, 'hh': 9}, [1, 2], target=(9, 9))


@pytest.mark.slow
@pytest.mark.parametrize('chi', [2, 3])
def test_rjoin_gadget_is_locally_chi_colorable(chi):
    g = GadgetService.rjoin_gadget(chi, 3, 2)
    assert AnalysisService.exact_chromatic_number(g).chi >= 2 * (chi - 1) + 1
    assert AnalysisService.local_chromatic_number(g, 3)[0] == chi
