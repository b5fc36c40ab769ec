import json

import pytest

from app.exceptions import BadParams, OutOfRange
from app.services.gadget_service import GadgetService
from app.utils.graph_io import format_meta, graph_text, parse_graph_text, read_graph, write_graph


def test_parse_skips_comments_and_blank_lines():
    g = parse_graph_text("# a triangle\n\n3 3\n0 1\n1 2\n0 2\n")
    assert (g.n, g.m) == (3, 3)
    assert g.meta == {}


def test_meta_line_is_parsed():
    g = parse_graph_text("# family kb w=9 hh=9\n2 1\n0 1\n")
    assert g.meta == {'family': 'kb', 'w': 9, 'hh': 9}


def test_format_meta():
    assert format_meta({'family': 'rjoin', 'chi': 2}) == '# family rjoin chi=2\n'
    assert format_meta({'chi': 2}) == ''


@pytest.mark.parametrize('text', [
    '',
    '# only a comment\n',
    '3 2\n0 1\n',
    'three 1\n0 1\n',
    '3 1\n0 1 2\n',
])
def test_malformed_text(text):
    with pytest.raises(BadParams):
        parse_graph_text(text)


def test_endpoint_out_of_range():
    with pytest.raises(OutOfRange):
        parse_graph_text('2 1\n0 5\n')


def test_write_then_read_keeps_labels_and_meta(tmp_path):
    g = GadgetService.kb_gadget(5, 5)
    path = str(tmp_path / 'kb.txt')
    written = write_graph(g, path)
    assert written == [path, f"{path}.labels.json"]

    sidecar = json.loads((tmp_path / 'kb.txt.labels.json').read_text())
    assert sidecar['0'] == '0,0'

    back = read_graph(path)
    assert back.sha256() == g.sha256()
    assert back.labels == g.labels
    assert back.meta == g.meta


def test_graph_text_starts_with_meta(c5):
    c5.meta = {'family': 'cycle', 'n': 5}
    lines = graph_text(c5).splitlines()
    assert lines[0] == '# family cycle n=5'
    assert lines[1] == '5 5'


def test_missing_file(tmp_path):
    with pytest.raises(BadParams):
        read_graph(str(tmp_path / 'nope.txt'))
