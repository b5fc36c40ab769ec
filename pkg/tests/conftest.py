import os
import sys

import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from config import TestConfig  # noqa: E402
from app import create_app  # noqa: E402
from app.services.graph_service import GraphService  # noqa: E402


@pytest.fixture
def path5():
    return GraphService.path_graph(5)


@pytest.fixture
def c5():
    return GraphService.cycle_graph(5)


@pytest.fixture
def c6():
    return GraphService.cycle_graph(6)


@pytest.fixture
def k4():
    return GraphService.complete_graph(4)


@pytest.fixture
def grid8():
    return GraphService.grid_graph(8, 8)


@pytest.fixture
def petersen():
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return GraphService.build_graph(10, outer + spokes + inner)


@pytest.fixture
def app():
    app = create_app(TestConfig)
    yield app


@pytest.fixture
def client(app):
    return app.test_client()


@pytest.fixture
def write_graph_file(tmp_path):
    """Write a Graph to a temp file and return its path"""
    from app.utils.graph_io import write_graph

    def _write(graph, name='g.txt'):
        path = str(tmp_path / name)
        write_graph(graph, path)
        return path
    return _write


GOLDEN_DIR = os.path.join(os.path.dirname(__file__), 'golden')


@pytest.fixture
def golden():
    """Compare a payload with tests/golden/<name>.json, recording the file on first use"""
    import json
    from app.utils.serialization import json_default

    def _check(name, payload):
        payload = json.loads(json.dumps(payload, default=json_default, sort_keys=True))
        path = os.path.join(GOLDEN_DIR, f'{name}.json')
        if not os.path.exists(path):
            os.makedirs(GOLDEN_DIR, exist_ok=True)
            with open(path, 'w') as fh:
                json.dump(payload, fh, indent=1, sort_keys=True)
            return
        with open(path) as fh:
            assert json.load(fh) == payload
    return _check
