"""
Round Ledger
Charged-round accounting for macro operations executed centrally. Phases are
kept in insertion order; the total is always the sum of the phases.
"""
import numpy as np

from app.exceptions import BadParams, Disconnected


class RoundLedger:
    """Accumulated LOCAL rounds broken down by phase"""

    def __init__(self):
        self.phases = {}
        self.structural = set()

    @property
    def total(self) -> int:
        return int(sum(self.phases.values()))

    @property
    def distributed_total(self) -> int:
        """Rounds excluding phases of sequential (structural-only) procedures"""
        return int(sum(v for k, v in self.phases.items() if k not in self.structural))

    def charge(self, phase: str, rounds: int, structural: bool = False) -> 'RoundLedger':
        rounds = int(rounds)
        if rounds < 0:
            raise BadParams(f"Cannot charge negative rounds ({rounds}) to phase '{phase}'")
        self.phases[phase] = self.phases.get(phase, 0) + rounds
        if structural:
            self.structural.add(phase)
        return self

    # ------------------------------------------------------------------
    # Accounting rules
    # ------------------------------------------------------------------

    @staticmethod
    def gather_cost(g, nodes, leader: int = None, radius: int = 1) -> int:
        """
        Rounds for a leader to collect the radius-neighborhood of a node set

        Args:
            g: Graph the cluster lives in
            nodes: cluster node ids
            leader: collecting node (defaults to the minimum id)
            radius: neighborhood radius around the cluster (1 = S plus N(S))

        Returns:
            int: max distance from the leader into N_radius(nodes)
        """
        nodes = np.asarray(nodes, dtype=np.int64)
        if nodes.size == 0:
            return 0
        if leader is None:
            leader = int(nodes.min())
        region = g.distances_from(nodes, limit=radius) >= 0
        from_leader = g.distances_from([leader])
        reach = from_leader[region]
        if (reach < 0).any():
            raise Disconnected(f"Leader {leader} cannot reach every node of its region")
        return int(reach.max())

    broadcast_cost = gather_cost

    def charge_gather(self, g, nodes, leader: int = None, radius: int = 1, phase: str = 'gather') -> int:
        rounds = self.gather_cost(g, nodes, leader, radius)
        self.charge(phase, rounds)
        return rounds

    def charge_broadcast(self, g, nodes, leader: int = None, radius: int = 1, phase: str = 'broadcast') -> int:
        rounds = self.broadcast_cost(g, nodes, leader, radius)
        self.charge(phase, rounds)
        return rounds

    def charge_power_simulation(self, base_rounds: int, k: int, phase: str = 'power_simulation') -> int:
        """One round of G^k costs k rounds of G"""
        rounds = int(base_rounds) * int(k)
        self.charge(phase, rounds)
        return rounds

    def absorb(self, other: 'RoundLedger', prefix: str = '', scale: int = 1) -> 'RoundLedger':
        """Fold another ledger's phases in, optionally simulated on a power graph"""
        for phase, rounds in other.phases.items():
            self.charge(f"{prefix}{phase}", rounds * scale, structural=phase in other.structural)
        return self

    def to_dict(self) -> dict:
        return {
            'total': self.total,
            'distributed_total': self.distributed_total,
            'phases': dict(self.phases),
            'structural': sorted(self.structural),
        }

    def __repr__(self):
        return f"<RoundLedger total={self.total} phases={len(self.phases)}>"
