"""
Clustering and Network Decomposition Models
"""
from dataclasses import dataclass, field

import numpy as np

from app.exceptions import BadParams
from app.models.ledger import RoundLedger


def _as_nodeset(nodes) -> np.ndarray:
    return np.unique(np.asarray(nodes, dtype=np.int64))


@dataclass
class Clustering:
    """Disjoint, mutually non-adjacent clusters plus an unclustered remainder"""

    n: int
    clusters: list
    unclustered: np.ndarray
    ledger: RoundLedger = field(default_factory=RoundLedger)
    max_diameter: int = 0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.clusters = sorted((_as_nodeset(c) for c in self.clusters if len(c)), key=lambda c: int(c[0]))
        self.unclustered = _as_nodeset(self.unclustered)

    @property
    def clustered_count(self) -> int:
        return int(sum(c.size for c in self.clusters))

    @property
    def lambda_achieved(self) -> float:
        return self.unclustered.size / self.n if self.n else 0.0

    def cluster_index(self) -> np.ndarray:
        """Per-node cluster position, -1 for unclustered nodes"""
        index = np.full(self.n, -1, dtype=np.int64)
        for i, c in enumerate(self.clusters):
            index[c] = i
        return index

    def to_dict(self) -> dict:
        return {
            'clusters': [c.tolist() for c in self.clusters],
            'unclustered': self.unclustered.tolist(),
            'lambda': self.lambda_achieved,
            'max_diameter': int(self.max_diameter),
            'rounds': self.ledger.to_dict(),
            'meta': self.meta,
        }


@dataclass
class NetworkDecomposition:
    """Partition into clusters with a proper cluster coloring in 1..alpha"""

    n: int
    clusters: list
    colors: list
    alpha: int
    max_diameter: int = 0
    ledger: RoundLedger = field(default_factory=RoundLedger)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.clusters = [_as_nodeset(c) for c in self.clusters]
        self.colors = [int(c) for c in self.colors]
        if len(self.clusters) != len(self.colors):
            raise BadParams("Every cluster needs exactly one color",
                            clusters=len(self.clusters), colors=len(self.colors))

    def clusters_of_color(self, color: int) -> list:
        return [c for c, a in zip(self.clusters, self.colors) if a == color]

    def to_dict(self) -> dict:
        return {
            'clusters': [c.tolist() for c in self.clusters],
            'colors': list(self.colors),
            'alpha': self.alpha,
            'd': int(self.max_diameter),
            'rounds': self.ledger.to_dict(),
            'meta': self.meta,
        }

    @classmethod
    def from_dict(cls, n: int, data: dict) -> 'NetworkDecomposition':
        return cls(
            n=n,
            clusters=data['clusters'],
            colors=data['colors'],
            alpha=int(data['alpha']),
            max_diameter=int(data.get('d', 0)),
        )
