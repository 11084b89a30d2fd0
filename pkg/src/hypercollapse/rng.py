"""Seeded, splittable random streams.

Every trial derives its generator from ``(master_seed, *path)`` so that the
result of a trial does not depend on which worker ran it or in which order.
"""
import numpy as np


def make_rng(seed=None, *path):
    """Return a Philox-backed generator keyed by ``seed`` and an index path.

    An existing ``np.random.Generator`` is passed through untouched.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None:
        seq = np.random.SeedSequence()
    else:
        seq = np.random.SeedSequence([int(seed), *(int(p) for p in path)])
    return np.random.Generator(np.random.Philox(seq))


def trial_rng(master_seed, trial, stream=0):
    return make_rng(master_seed, stream, trial)
