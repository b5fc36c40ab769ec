import pytest

from app.exceptions import BadParams, Disconnected
from app.models.clustering import NetworkDecomposition
from app.models.ledger import RoundLedger
from app.services.graph_service import GraphService


def test_total_is_sum_of_phases():
    ledger = RoundLedger().charge('a', 3).charge('b', 4).charge('a', 1)
    assert ledger.phases == {'a': 4, 'b': 4}
    assert ledger.total == 8


def test_structural_phases_leave_distributed_total():
    ledger = RoundLedger().charge('carve', 5, structural=True).charge('gather', 2)
    assert ledger.total == 7
    assert ledger.distributed_total == 2
    assert ledger.to_dict()['structural'] == ['carve']


def test_negative_rounds_rejected():
    with pytest.raises(BadParams):
        RoundLedger().charge('oops', -1)


def test_gather_reaches_the_fringe(path5):
    # leader 1 collecting {1, 2} plus N({1, 2}) = {0, 1, 2, 3}
    assert RoundLedger.gather_cost(path5, [1, 2]) == 2
    assert RoundLedger.gather_cost(path5, [1, 2], leader=2) == 2
    assert RoundLedger.gather_cost(path5, [0], radius=0) == 0
    assert RoundLedger.gather_cost(path5, []) == 0


def test_gather_needs_a_connected_region():
    g = GraphService.build_graph(4, [(0, 1), (2, 3)])
    with pytest.raises(Disconnected):
        RoundLedger.gather_cost(g, [0, 2])


def test_charge_helpers(c6):
    ledger = RoundLedger()
    assert ledger.charge_gather(c6, [0]) == 1
    assert ledger.charge_broadcast(c6, [0, 1, 2]) == 3
    assert ledger.charge_power_simulation(4, 3) == 12
    assert ledger.phases == {'gather': 1, 'broadcast': 3, 'power_simulation': 12}


def test_absorb_scales_and_prefixes():
    inner = RoundLedger().charge('base', 2, structural=True).charge('carve', 3)
    outer = RoundLedger().absorb(inner, prefix='iter0.', scale=3)
    assert outer.phases == {'iter0.base': 6, 'iter0.carve': 9}
    assert outer.structural == {'iter0.base'}
    assert outer.distributed_total == 9


def test_decomposition_needs_one_color_per_cluster():
    with pytest.raises(BadParams):
        NetworkDecomposition(3, [[0], [1, 2]], [1], alpha=1)
