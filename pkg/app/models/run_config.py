from dataclasses import dataclass, asdict
from typing import Optional

from config import Config
from app.exceptions import BadParams
from app.utils.seeding import SEED_MASK


@dataclass
class RunConfig:
    """Per-invocation settings: Config defaults overridden by command-line flags"""

    seed: int = Config.DEFAULT_SEED
    budget: int = Config.SOLVER_BUDGET
    retry_limit: int = Config.RETRY_LIMIT
    output: Optional[str] = None
    fmt: str = 'json'
    jobs: int = 1

    def __post_init__(self):
        errors = {}
        if not (0 <= int(self.seed) <= SEED_MASK):
            errors['seed'] = 'Seed must be a non-negative 64-bit integer'
        if int(self.budget) <= 0:
            errors['budget'] = 'Solver budget must be positive'
        if int(self.retry_limit) < 0:
            errors['retry_limit'] = 'Retry limit cannot be negative'
        if self.fmt not in ('json', 'csv'):
            errors['fmt'] = f"Unknown output format '{self.fmt}'"
        if int(self.jobs) < 1:
            errors['jobs'] = 'At least one job is required'
        if errors:
            raise BadParams('Invalid run configuration', **errors)

    @classmethod
    def from_options(cls, **options) -> 'RunConfig':
        """Build from CLI options, ignoring the ones left unset"""
        return cls(**{k: v for k, v in options.items() if v is not None})

    def to_dict(self) -> dict:
        return asdict(self)
