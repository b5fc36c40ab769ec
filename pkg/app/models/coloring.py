"""
Coloring Models
Layered palette colors, chromatic certificates and pipeline results.

Palette p_a holds the pairs (a, b) for b >= 1 plus one Hidden color shared by
every palette. Colors are totally ordered as
    Hidden < (1,1) < (2,1) < ... < (alpha,1) < (1,2) < ...
and remapped to integers by Hidden -> 1, (a, b) -> alpha*(b-1) + a + 1.
"""
from dataclasses import dataclass, field
from functools import total_ordering

from app.models.ledger import RoundLedger

# Value used for the hidden class inside a partial (integer) coloring
HIDDEN_INDEX = -1


@total_ordering
@dataclass(frozen=True)
class PaletteColor:
    a: int
    b: int

    @property
    def is_hidden(self) -> bool:
        return self.a == 0 and self.b == 0

    def sort_key(self) -> tuple:
        return (self.b, self.a)

    def __lt__(self, other):
        if not isinstance(other, PaletteColor):
            return NotImplemented
        return self.sort_key() < other.sort_key()

    def remap(self, alpha: int) -> int:
        if self.is_hidden:
            return 1
        return alpha * (self.b - 1) + self.a + 1

    def __str__(self):
        return 'Hidden' if self.is_hidden else f"({self.a},{self.b})"


HIDDEN = PaletteColor(0, 0)


@dataclass
class ChromaticCertificate:
    """Exact chromatic number with both witnesses"""

    graph_sha256: str
    chi: int
    clique: tuple
    coloring: tuple
    expansions: int = 0

    def to_dict(self) -> dict:
        return {
            'graph_sha256': self.graph_sha256,
            'chi': self.chi,
            'clique': list(self.clique),
            'coloring': list(self.coloring),
        }


@dataclass
class HidingRecord:
    """Extended cluster A' and its partial coloring (HIDDEN_INDEX marks Hidden)"""

    cluster: tuple
    extended: tuple
    phi: dict
    chi_local: int

    def to_dict(self) -> dict:
        return {
            'A': list(self.cluster),
            'A_prime': list(self.extended),
            'phi': {str(u): c for u, c in sorted(self.phi.items())},
            'chi_local': self.chi_local,
        }


@dataclass
class PipelineResult:
    n: int
    m: int
    alpha: int
    coloring: list
    colors_used: int
    proper: bool
    chi_local_max: int
    ledger: RoundLedger = field(default_factory=RoundLedger)
    mode: str = 'det'
    seed: int = 0
    decomposition: object = None
    hiding_records: list = field(default_factory=list)

    @property
    def color_bound(self) -> int:
        return self.alpha * (self.chi_local_max - 1) + 1

    @property
    def within_bound(self) -> bool:
        return self.colors_used <= self.color_bound

    def to_dict(self, include_records: bool = False) -> dict:
        payload = {
            'n': self.n,
            'm': self.m,
            'alpha': self.alpha,
            'mode': self.mode,
            'seed': self.seed,
            'colors_used': self.colors_used,
            'color_bound': self.color_bound,
            'chi_local_max': self.chi_local_max,
            'proper': self.proper,
            'rounds': self.ledger.to_dict(),
            'coloring': list(self.coloring),
        }
        if self.decomposition is not None:
            payload['decomposition'] = self.decomposition.to_dict()
        if include_records:
            payload['hiding'] = [r.to_dict() for r in self.hiding_records]
        return payload
