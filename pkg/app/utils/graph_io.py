"""
Graph text format

    # optional comment lines; '# family kb w=9 hh=9' records generator metadata
    n m
    u v        (m lines, 0 <= u < v < n)

Labels live next to the graph in '<file>.labels.json' as {"id": "label"}.
"""
import json
import logging
import os

from app.exceptions import BadParams
from app.services.graph_service import GraphService

logger = logging.getLogger(__name__)

META_PREFIX = '# family '


def _parse_value(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def format_meta(meta: dict) -> str:
    if not meta or 'family' not in meta:
        return ''
    pairs = ' '.join(f"{k}={v}" for k, v in meta.items() if k != 'family')
    return f"{META_PREFIX}{meta['family']} {pairs}".rstrip() + '\n'


def parse_graph_text(text: str, labels=None):
    """Parse the text format into a Graph"""
    meta = {}
    data = []
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith('#'):
            if stripped.startswith(META_PREFIX.strip()):
                tokens = stripped[len(META_PREFIX):].split()
                if tokens:
                    meta['family'] = tokens[0]
                    for token in tokens[1:]:
                        key, _, value = token.partition('=')
                        meta[key] = _parse_value(value)
            continue
        data.append(stripped)

    if not data:
        raise BadParams("Graph text has no header line")
    try:
        n, m = (int(x) for x in data[0].split())
        edges = [tuple(int(x) for x in row.split()) for row in data[1:]]
    except ValueError as e:
        raise BadParams(f"Malformed graph text: {e}")
    if len(edges) != m or any(len(e) != 2 for e in edges):
        raise BadParams(f"Header announces {m} edges, found {len(edges)}")
    return GraphService.build_graph(n, edges, labels=labels, meta=meta)


def read_graph(path: str):
    """Read a graph file plus its label sidecar when present"""
    if not os.path.exists(path):
        raise BadParams(f"Graph file not found: {path}")
    with open(path) as fh:
        text = fh.read()
    labels = None
    sidecar = f"{path}.labels.json"
    if os.path.exists(sidecar):
        with open(sidecar) as fh:
            raw = json.load(fh)
        labels = [raw[str(i)] for i in range(len(raw))]
    graph = parse_graph_text(text, labels)
    logger.debug(f"Read {graph!r} from {path}")
    return graph


def graph_text(g) -> str:
    return format_meta(g.meta) + g.canonical_text()


def write_graph(g, path: str) -> list:
    """
    Write the graph file and, when the graph has labels, its sidecar

    Returns:
        list: paths written
    """
    with open(path, 'w') as fh:
        fh.write(graph_text(g))
    written = [path]
    if g.labels is not None:
        sidecar = f"{path}.labels.json"
        with open(sidecar, 'w') as fh:
            json.dump({str(i): label for i, label in enumerate(g.labels)}, fh, sort_keys=True)
        written.append(sidecar)
    logger.info(f"Wrote n={g.n} m={g.m} to {path}")
    return written
