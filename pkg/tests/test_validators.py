import pytest

from config import Config
from app.exceptions import BadParams
from app.validators.param_validators import ParamValidator


def test_pipeline_defaults():
    ok, data, errors = ParamValidator.validate_pipeline({})
    assert ok and errors == {}
    assert data == {'alpha': 2, 'mode': 'det', 'seed': Config.DEFAULT_SEED}


@pytest.mark.parametrize('payload, field', [
    ({'alpha': 0}, 'alpha'),
    ({'alpha': 2.5}, 'alpha'),
    ({'alpha': 'two'}, 'alpha'),
    ({'alpha': True}, 'alpha'),
    ({'mode': 'quantum'}, 'mode'),
    ({'seed': -1}, 'seed'),
])
def test_pipeline_rejections(payload, field):
    ok, data, errors = ParamValidator.validate_pipeline(payload)
    assert not ok
    assert data == {}
    assert field in errors


def test_integral_strings_are_accepted():
    ok, data, _ = ParamValidator.validate_pipeline({'alpha': '3', 'seed': '7'})
    assert ok
    assert (data['alpha'], data['seed']) == (3, 7)


def test_graph_payload():
    ok, data, _ = ParamValidator.validate_graph_payload({'n': 3, 'edges': [[0, 1], [1, 2]]})
    assert ok
    assert data['edges'] == [(0, 1), (1, 2)]
    ok, _, errors = ParamValidator.validate_graph_payload({'edges': [[0, 1, 2]]})
    assert not ok
    assert set(errors) == {'n', 'edges'}


def test_rjoin_cover_thresholds():
    assert ParamValidator.validate_rjoin({'chi': 2, 'r': 2, 'k': 1})[0]
    ok, _, errors = ParamValidator.validate_rjoin({'chi': 2, 'r': 2, 'k': 1}, for_cover=True)
    assert not ok
    assert set(errors) == {'r', 'k'}


def test_kb_cover_needs_odd_sides():
    assert ParamValidator.validate_kb({'w': 4, 'hh': 9})[0]
    ok, _, errors = ParamValidator.validate_kb({'w': 4, 'hh': 9}, for_cover=True)
    assert not ok
    assert set(errors) == {'w'}
    ok, data, _ = ParamValidator.validate_kb({'w': 9, 'hh': 13}, for_cover=True)
    assert ok and data == {'w': 9, 'hh': 13}


def test_unknown_family():
    ok, _, errors = ParamValidator.validate_family('torus', {})
    assert not ok
    assert 'family' in errors


def test_attack_params():
    ok, data, _ = ParamValidator.validate_attack({'victim': 'const1'})
    assert ok and data == {'copies': 1, 'trials': 100, 'victim': 'const1'}
    ok, _, errors = ParamValidator.validate_attack({'victim': 'oracle', 'copies': 0, 'trials': 0})
    assert set(errors) == {'victim', 'copies', 'trials'}


@pytest.mark.parametrize('value, ok', [(0.5, True), (1, True), (0, False), (1.01, False), ('x', False)])
def test_eps(value, ok):
    assert ParamValidator.validate_eps(value)[0] is ok


def test_sizes():
    assert ParamValidator.validate_sizes('16, 24,32')[1] == {'sizes': [16, 24, 32]}
    assert not ParamValidator.validate_sizes('16,1')[0]
    assert not ParamValidator.validate_sizes('a,b')[0]
    assert not ParamValidator.validate_sizes('')[0]


def test_require_raises_with_field_details():
    with pytest.raises(BadParams) as info:
        ParamValidator.require(ParamValidator.validate_pipeline({'mode': 'x'}))
    assert 'mode' in info.value.details
    assert info.value.to_dict()['error'] == 'BadParams'
