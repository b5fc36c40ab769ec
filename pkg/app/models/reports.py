"""
Verifier Reports
Clause-by-clause outcome of a validity check, plus the adversary's report.
"""
from dataclasses import dataclass, field
from typing import Optional


@dataclass
class ValidationReport:
    """Outcome of one verifier run"""

    subject: str
    clauses: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    metrics: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.clauses.values())

    def check(self, clause: str, ok: bool, detail: str = None) -> bool:
        """Record a clause; a failing clause keeps its first detail message"""
        ok = bool(ok)
        self.clauses[clause] = self.clauses.get(clause, True) and ok
        if not ok and detail:
            self.violations.append(f"{clause}: {detail}")
        return ok

    def to_dict(self) -> dict:
        return {
            'subject': self.subject,
            'passed': self.passed,
            'clauses': dict(self.clauses),
            'violations': list(self.violations),
            'metrics': dict(self.metrics),
        }


@dataclass
class AttackReport:
    """Empirical failure amplification on a cheating instance"""

    gadget: str
    cover_size: int
    radius: int
    victim: str
    claimed_colors: int
    mode: str
    trials: int
    seed: int
    element_rates: list
    whole_gadget_rate: float
    chosen_index: int
    copies: int
    instance_failures: int
    instance_rate: float
    interval: tuple
    theoretical_bound: float
    product_law: float
    assumption: str
    trial_outcomes: Optional[list] = None

    def to_dict(self) -> dict:
        return {
            'gadget': self.gadget,
            'cover_size': self.cover_size,
            'T': self.radius,
            'victim': self.victim,
            'claimed_colors': self.claimed_colors,
            'mode': self.mode,
            'trials': self.trials,
            'seed': self.seed,
            'element_rates': list(self.element_rates),
            'whole_gadget_rate': self.whole_gadget_rate,
            'i_star': self.chosen_index,
            'index_rule': 'argmax',
            'N': self.copies,
            'instance_failures': self.instance_failures,
            'instance_rate': self.instance_rate,
            'interval': list(self.interval),
            'theoretical_bound': self.theoretical_bound,
            'product_law': self.product_law,
            'assumption': self.assumption,
        }
