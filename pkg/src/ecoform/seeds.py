"""Deterministic seed derivation shared by solvers, the split pipeline and the benchmark runner."""

import numpy as np


def derive_seed(*parts: int) -> int:
    """Mix integer parts into a single 63-bit seed, stable across runs and platforms."""
    ss = np.random.SeedSequence([int(p) & 0x7FFFFFFFFFFFFFFF for p in parts])
    return int(ss.generate_state(1, np.uint64)[0] >> 1)
