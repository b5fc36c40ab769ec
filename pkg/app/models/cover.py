"""
Subgraph Cover and Cheating Instance Models
"""
from dataclasses import dataclass, field

import numpy as np

VIEW_INDUCED = 'induced'
VIEW_LOCAL = 'local_view'


@dataclass
class ElementCertificate:
    """Per-element witnesses; the verifier re-derives every field"""

    chi: int = 0
    coloring: tuple = ()
    connected: bool = False
    witness: int = -1
    isomorphic: bool = None

    def to_dict(self) -> dict:
        payload = {
            'chi': self.chi,
            'connected': self.connected,
            'distance_T_witness': self.witness,
        }
        if self.isomorphic is not None:
            payload['grid_patch_isomorphic'] = self.isomorphic
        return payload


@dataclass
class SubgraphCover:
    """
    Ordered family of node sets covering a host graph

    view_mode tells how the radius-T neighborhood of an element is read:
    'induced' takes host[N_T(element)], 'local_view' additionally drops the
    edges joining two nodes at distance exactly T (what a T-round algorithm
    actually observes).
    """

    host: object
    elements: list
    radius: int
    family: str
    params: dict
    view_mode: str = VIEW_INDUCED
    certificates: list = field(default_factory=list)

    def __post_init__(self):
        self.elements = [np.unique(np.asarray(e, dtype=np.int64)) for e in self.elements]

    @property
    def size(self) -> int:
        return len(self.elements)

    def to_dict(self) -> dict:
        return {
            'family': self.family,
            'params': dict(self.params),
            'T': self.radius,
            'view_mode': self.view_mode,
            'elements': [e.tolist() for e in self.elements],
            'certificates': [c.to_dict() for c in self.certificates],
        }


@dataclass
class CheatingInstance:
    """Assembled graph with N marked patches copied from a gadget"""

    graph: object
    family: str
    indices: list
    patches: list
    patch_maps: list
    radius: int
    target: dict

    @property
    def copies(self) -> int:
        return len(self.indices)

    @property
    def marked(self) -> np.ndarray:
        """Union of the embedded patches (the marked subgraph)"""
        if not self.patches:
            return np.zeros(0, dtype=np.int64)
        return np.unique(np.concatenate(self.patches))

    def to_dict(self) -> dict:
        return {
            'family': self.family,
            'n': self.graph.n,
            'm': self.graph.m,
            'x': list(self.indices),
            'T': self.radius,
            'target': dict(self.target),
            'patches': [p.tolist() for p in self.patches],
        }
