"""
Simulation Service
Synchronous LOCAL-model execution: every round each node sends one message
per port, then receives the messages of all its neighbors. Ports are ordered
by ascending neighbor id. A node halts the first time its program reports an
output; halted nodes keep relaying but their output is frozen.
"""
import hashlib
import json
import logging
from abc import ABC, abstractmethod

import numpy as np

from config import Config
from app.exceptions import BadParams, NotHalted
from app.utils.seeding import node_rng

logger = logging.getLogger(__name__)


class NodeProgram(ABC):
    """Behavior of one node; the same program runs on every node"""

    @abstractmethod
    def initialize(self, node_id: int, degree: int, label, rng) -> dict:
        """Initial state from the node's id, degree, input label and randomness stream"""

    @abstractmethod
    def send(self, state: dict, round_no: int) -> list:
        """One message per port"""

    @abstractmethod
    def receive(self, state: dict, messages: list, round_no: int) -> dict:
        """New state from the per-port messages of this round"""

    def output(self, state: dict):
        """Node output, or None while the node has not halted"""
        return state.get('output')


# ============================================
# Demonstration programs
# ============================================

class DegreeProgram(NodeProgram):
    """Outputs its own degree at round 0"""

    def initialize(self, node_id, degree, label, rng):
        return {'output': degree}

    def send(self, state, round_no):
        return []

    def receive(self, state, messages, round_no):
        return state


class FloodBallSizeProgram(NodeProgram):
    """Floods known ids for `radius` rounds, then outputs the ball size"""

    def __init__(self, radius: int):
        self.radius = int(radius)

    def initialize(self, node_id, degree, label, rng):
        state = {'degree': degree, 'known': {node_id}, 'output': None}
        if self.radius == 0:
            state['output'] = 1
        return state

    def send(self, state, round_no):
        return [frozenset(state['known'])] * state['degree']

    def receive(self, state, messages, round_no):
        for msg in messages:
            state['known'] |= msg
        if round_no >= self.radius and state['output'] is None:
            state['output'] = len(state['known'])
        return state


class BfsParityProgram(NodeProgram):
    """
    2-colors a bipartite component by BFS parity from its minimum id

    Each node floods its view {id: (degree, neighbor ids or None)}. The view
    is closed once every known node has all its edges known; the node then
    outputs 1 + (distance from the minimum known id) mod 2.
    """

    def initialize(self, node_id, degree, label, rng):
        state = {'id': node_id, 'degree': degree, 'view': {node_id: (degree, None)}, 'output': None}
        if degree == 0:
            state['output'] = 1
        return state

    def send(self, state, round_no):
        msg = {'from': state['id'], 'view': dict(state['view'])}
        return [msg] * state['degree']

    def receive(self, state, messages, round_no):
        view = state['view']
        if view[state['id']][1] is None:
            view[state['id']] = (state['degree'], tuple(sorted(m['from'] for m in messages)))
        for msg in messages:
            for x, (deg, adj) in msg['view'].items():
                if x not in view or (view[x][1] is None and adj is not None):
                    view[x] = (deg, adj)
        if state['output'] is None:
            state['output'] = self._parity_if_closed(state['id'], view)
        return state

    @staticmethod
    def _parity_if_closed(own, view):
        edges = {}
        for x, (_, adj) in view.items():
            if adj is None:
                continue
            for y in adj:
                edges.setdefault(x, set()).add(y)
                edges.setdefault(y, set()).add(x)
        for x, (deg, _) in view.items():
            if len(edges.get(x, ())) < deg:
                return None

        root = min(view)
        dist = {root: 0}
        frontier = [root]
        while frontier:
            nxt = []
            for x in frontier:
                for y in edges.get(x, ()):
                    if y not in dist:
                        dist[y] = dist[x] + 1
                        nxt.append(y)
            frontier = nxt
        return dist[own] % 2 + 1


class ViewCollectProgram(NodeProgram):
    """
    Collects (id, degree, random token) of every node within `radius` hops and
    outputs a digest of that view; the output depends on the radius-ball only.
    """

    def __init__(self, radius: int):
        self.radius = int(radius)

    def initialize(self, node_id, degree, label, rng):
        token = int(rng.integers(0, 2 ** 31))
        state = {'degree': degree, 'known': {node_id: (degree, token)}, 'output': None}
        if self.radius == 0:
            state['output'] = self._digest(state['known'])
        return state

    def send(self, state, round_no):
        return [dict(state['known'])] * state['degree']

    def receive(self, state, messages, round_no):
        for msg in messages:
            state['known'].update(msg)
        if round_no >= self.radius and state['output'] is None:
            state['output'] = self._digest(state['known'])
        return state

    @staticmethod
    def _digest(known):
        text = json.dumps(sorted((k, v[0], v[1]) for k, v in known.items()))
        return hashlib.sha256(text.encode()).hexdigest()[:16]


PROGRAMS = {
    'degree': DegreeProgram,
    'flood': FloodBallSizeProgram,
    'bfs-parity': BfsParityProgram,
    'view': ViewCollectProgram,
}


class SimulationService:
    """Lockstep round executor"""

    @staticmethod
    def run_sync(g, program: NodeProgram, max_rounds: int, seed: int,
                 ids=None, labels=None, trace_path: str = None) -> dict:
        """
        Execute a node program on every node of g

        Args:
            g: Graph
            program: NodeProgram instance
            max_rounds: hard stop
            seed: master seed; node v draws from node_rng(seed, id(v))
            ids: optional permutation, node v runs with id ids[v]
            labels: optional per-node input labels (defaults to g.labels)
            trace_path: JSON-lines trace file (defaults to Config.TRACE_PATH)

        Returns:
            dict: {'outputs': [...], 'rounds': int, 'halt_rounds': [...]}

        Raises:
            NotHalted: some node never produced an output
        """
        if max_rounds < 0:
            raise BadParams(f"max_rounds must be non-negative, got {max_rounds}")
        n = g.n
        ids = np.arange(n) if ids is None else np.asarray(ids, dtype=np.int64)
        if sorted(ids.tolist()) != list(range(n)):
            raise BadParams("ids must be a permutation of 0..n-1")
        labels = labels if labels is not None else (g.labels or [None] * n)
        trace_path = trace_path or Config.TRACE_PATH

        # 1. PORTS (ascending neighbor id)
        ports = [sorted(g.neighbors(v).tolist(), key=lambda u: ids[u]) for v in range(n)]
        port_of = [{u: p for p, u in enumerate(ps)} for ps in ports]

        # 2. INITIALIZE
        states = [program.initialize(int(ids[v]), len(ports[v]), labels[v], node_rng(seed, int(ids[v])))
                  for v in range(n)]
        outputs = [None] * n
        halt_rounds = [None] * n
        SimulationService._collect(program, states, outputs, halt_rounds, 0)

        trace = open(trace_path, 'a') if trace_path else None
        try:
            # 3. ROUNDS
            round_no = 0
            while round_no < max_rounds and any(h is None for h in halt_rounds):
                round_no += 1
                sent = [program.send(states[v], round_no) for v in range(n)]
                inbox = [[None] * len(ports[v]) for v in range(n)]
                for v in range(n):
                    for p, u in enumerate(ports[v]):
                        inbox[u][port_of[u][v]] = sent[v][p]
                        if trace:
                            trace.write(json.dumps({
                                'round': round_no, 'node': int(ids[v]), 'action': 'send',
                                'payload_size': len(repr(sent[v][p])),
                            }) + '\n')
                for v in range(n):
                    states[v] = program.receive(states[v], inbox[v], round_no)
                SimulationService._collect(program, states, outputs, halt_rounds, round_no)
        finally:
            if trace:
                trace.close()

        pending = [v for v in range(n) if halt_rounds[v] is None]
        if pending:
            logger.error(f"{len(pending)} nodes did not halt within {max_rounds} rounds")
            raise NotHalted(f"{len(pending)} nodes did not halt within {max_rounds} rounds",
                            nodes=pending[:20])

        rounds = max(halt_rounds) if n else 0
        logger.debug(f"{type(program).__name__} halted after {rounds} rounds on n={n}")
        return {'outputs': outputs, 'rounds': int(rounds), 'halt_rounds': halt_rounds}

    @staticmethod
    def _collect(program, states, outputs, halt_rounds, round_no):
        for v, state in enumerate(states):
            if halt_rounds[v] is not None:
                continue
            out = program.output(state)
            if out is not None:
                outputs[v] = out
                halt_rounds[v] = round_no
