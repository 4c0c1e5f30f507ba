"""Seeded random generators.

All randomness goes through numpy's PCG64 bit generator seeded with the
caller's integer, so identical seeds reproduce identical streams.
"""
import numpy as np


def make_rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(int(seed)))
