"""Deterministic per-task generator derivation.

Every Monte Carlo task gets its own generator derived from (rootSeed, stream,
taskIndex) through numpy's SeedSequence, whose mixing function is a published
integer hash with identical output on every platform.  The derivation is
injective in (stream, taskIndex), so results never depend on how tasks are
scheduled across workers.
"""

from __future__ import annotations

import numpy as np

# stream ids partition the seed space between run phases
STREAM_EXPERIMENT = 0
STREAM_VERIFY = 1


def seed_derive(root_seed: int, task_index: int, stream: int = STREAM_EXPERIMENT):
    """Generator for one task; identical (root, stream, index) gives an
    identical stream."""
    if root_seed < 0 or task_index < 0:
        raise ValueError("root seed and task index must be nonnegative")
    ss = np.random.SeedSequence(entropy=root_seed, spawn_key=(stream, task_index))
    return np.random.Generator(np.random.PCG64(ss))
