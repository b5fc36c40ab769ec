"""
Seed Derivation
All randomness flows from one 64-bit master seed. Sub-seeds are derived with
a counter scheme: the master seed followed by integer counters is fed to
numpy's SeedSequence and the first 64-bit word of its state is used.

    derive_seed(master, trial)            per-trial seed
    derive_seed(master, trial, copy)      per-copy seed inside a trial
    derive_seed(master, node_id)          per-node stream of a simulation
"""
import numpy as np

SEED_MASK = (1 << 64) - 1


def derive_seed(master: int, *counters: int) -> int:
    """Deterministic 64-bit sub-seed for (master, *counters)"""
    entropy = [int(master) & SEED_MASK] + [int(c) for c in counters]
    state = np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint64)
    return int(state[0])


def make_rng(master: int, *counters: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(master) & SEED_MASK] + [int(c) for c in counters]))


def node_rng(seed: int, node_id: int) -> np.random.Generator:
    """Randomness stream of one simulated node"""
    return make_rng(seed, node_id)
