import csv
import json

import pytest
from click.testing import CliRunner

from app.cli import graphcolor
from app.services.gadget_service import GadgetService
from app.services.graph_service import GraphService
from app.utils.graph_io import read_graph


@pytest.fixture
def runner():
    return CliRunner()


def _invoke(runner, *args):
    return runner.invoke(graphcolor, [str(a) for a in args], catch_exceptions=False)


def _load(path):
    with open(path) as fh:
        return json.load(fh)


# ---------------------------------------------------------------- gen

def test_gen_grid_writes_file(runner, tmp_path):
    path = tmp_path / 'grid.txt'
    result = _invoke(runner, 'gen', 'grid', '--w', 8, '--hh', 8, '-o', path)
    assert result.exit_code == 0
    g = read_graph(str(path))
    assert (g.n, g.m) == (64, 112)


def test_gen_kb_prints_text_with_meta(runner):
    result = _invoke(runner, 'gen', 'kb', '--w', 5, '--hh', 5)
    assert result.exit_code == 0
    assert result.output.startswith('# family kb w=5 hh=5\n25 50\n')


def test_gen_rejects_bad_params(runner):
    result = _invoke(runner, 'gen', 'rjoin', '--chi', 1, '--r', 3, '--k', 2)
    assert result.exit_code == 4


# ---------------------------------------------------------------- analyze

def test_analyze_girth(runner, tmp_path, c6, write_graph_file):
    out = tmp_path / 'out.json'
    result = _invoke(runner, 'analyze', write_graph_file(c6), '--girth', '-o', out)
    assert result.exit_code == 0
    document = _load(out)
    assert document['girth'] == 6
    assert document['schema'] == 1
    assert 'stats' not in document


def test_analyze_defaults_to_stats(runner, tmp_path, path5, write_graph_file):
    out = tmp_path / 'out.json'
    _invoke(runner, 'analyze', write_graph_file(path5), '-o', out)
    assert _load(out)['stats']['diameter'] == 4


def test_analyze_forest_girth_is_null(runner, tmp_path, path5, write_graph_file):
    out = tmp_path / 'out.json'
    _invoke(runner, 'analyze', write_graph_file(path5), '--girth', '-o', out)
    assert _load(out)['girth'] is None


def test_analyze_parity_needs_kb_file(runner, tmp_path, grid8, write_graph_file):
    kb_file = write_graph_file(GadgetService.kb_gadget(7, 5), 'kb.txt')
    out = tmp_path / 'out.json'
    assert _invoke(runner, 'analyze', kb_file, '--parity', '-o', out).exit_code == 0
    assert _load(out)['parity']['parity'] == 'odd'
    assert _invoke(runner, 'analyze', write_graph_file(grid8), '--parity').exit_code == 4


def test_analyze_budget_exceeded_exits_three(runner, petersen, write_graph_file):
    result = _invoke(runner, 'analyze', write_graph_file(petersen), '--chromatic', '--budget', 1)
    assert result.exit_code == 3


# ---------------------------------------------------------------- color / decompose / simulate

def test_color_grid(runner, tmp_path, grid8, write_graph_file):
    out = tmp_path / 'out.json'
    result = _invoke(runner, 'color', write_graph_file(grid8), '--alpha', 2, '--mode', 'det', '-o', out)
    assert result.exit_code == 0
    document = _load(out)
    assert document['proper'] and document['within_bound']
    assert document['colors_used'] <= 3
    assert len(document['coloring']) == 64


def test_color_rejects_unknown_mode(runner, grid8, write_graph_file):
    result = _invoke(runner, 'color', write_graph_file(grid8), '--mode', 'quantum')
    assert result.exit_code == 4


def test_color_rejects_alpha_zero(runner, grid8, write_graph_file):
    assert _invoke(runner, 'color', write_graph_file(grid8), '--alpha', 0).exit_code == 4


def test_decompose_power(runner, tmp_path, write_graph_file):
    out = tmp_path / 'out.json'
    g = GraphService.path_graph(12)
    result = _invoke(runner, 'decompose', write_graph_file(g), '--alpha', 2, '--power', 3, '-o', out)
    assert result.exit_code == 0
    document = _load(out)
    assert document['report']['passed']
    assert document['power'] == 3


def test_simulate_flood(runner, tmp_path, path5, write_graph_file):
    out = tmp_path / 'out.json'
    trace = tmp_path / 'trace.jsonl'
    result = _invoke(runner, 'simulate', write_graph_file(path5), '--program', 'flood', '--radius', 1,
                     '--trace', trace, '-o', out)
    assert result.exit_code == 0
    assert _load(out)['outputs'] == [2, 3, 3, 3, 2]
    assert trace.exists()


# ---------------------------------------------------------------- cover / attack

def test_cover_even_width_is_bad_arguments(runner):
    result = _invoke(runner, 'cover', '--family', 'kb', '--w', 4, '--hh', 9, '--verify')
    assert result.exit_code == 4


def test_cover_rjoin_verifies(runner, tmp_path):
    out = tmp_path / 'cover.json'
    result = _invoke(runner, 'cover', '--family', 'rjoin', '--chi', 2, '--r', 3, '--k', 2, '--verify', '-o', out)
    assert result.exit_code == 0
    document = _load(out)
    assert document['report']['passed']
    assert document['cover']['T'] == 2
    assert document['n'] == 28


def test_attack_writes_csv(runner, tmp_path):
    out = tmp_path / 'attack.json'
    table = tmp_path / 'trials.csv'
    result = _invoke(runner, 'attack', '--gadget', 'rjoin', '--chi', 2, '--r', 3, '--k', 2,
                     '--victim', 'const1', '--copies', 2, '--trials', 4, '--seed', 5,
                     '--csv', table, '-o', out)
    assert result.exit_code == 0
    document = _load(out)
    assert document['instance_rate'] == 1.0
    assert document['N'] == 2
    with open(table, newline='') as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 4
    assert set(rows[0]) == {'trial', 'failed', 'copies_failed'}


def test_attack_locality_mismatch(runner):
    result = _invoke(runner, 'attack', '--gadget', 'rjoin', '--chi', 2, '--r', 3, '--k', 2,
                     '--victim', 'const1', '--trials', 2, '--locality', 9)
    assert result.exit_code == 4


# ---------------------------------------------------------------- bench

def test_bench_scaling_csv(runner, tmp_path):
    out = tmp_path / 'bench.csv'
    result = _invoke(runner, 'bench', 'scaling', '--sizes', '4,6', '--mode', 'det', '--fit', '-o', out)
    assert result.exit_code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == 'n,rounds,colors_used'
    assert [line.split(',')[0] for line in lines[1:3]] == ['16', '36']
    assert lines[3].startswith('# slope=')


def test_bench_rejects_tiny_sizes(runner):
    assert _invoke(runner, 'bench', 'scaling', '--sizes', '1,4').exit_code == 4


@pytest.mark.slow
def test_bench_rounds_grow_like_a_root_of_n(runner, tmp_path):
    out = tmp_path / 'bench.csv'
    result = _invoke(runner, 'bench', 'scaling', '--sizes', '16,24,32,48,64', '--alpha', 2,
                     '--mode', 'rand', '--repeats', 5, '--fit', '-o', out)
    assert result.exit_code == 0
    fit = out.read_text().splitlines()[-1]
    slope = float(fit.split()[1].split('=')[1])
    assert 0.35 <= slope <= 0.80
