"""Deterministic random substreams keyed by (root seed, trial, unit, purpose).

Every stochastic draw in the simulator comes from its own counter-keyed
stream, so results are independent of worker count and trial execution
order.
"""

from enum import IntEnum

import numpy as np


class Draw(IntEnum):
    """Purpose tag of a random substream."""

    RU_LOS = 0
    NONRU_LOS = 1
    SHADOW_SEG = 2
    SHADOW_VAL = 3
    KFACTOR = 4
    SMALL_SCALE = 5
    VISIBILITY = 6
    NOISE = 7
    SYMBOLS = 8


def substream(root_seed: int, trial: int, unit: int, draw: Draw) -> np.random.Generator:
    """Return the generator for one (trial, unit, purpose) cell.

    `unit` is a UT index, RU-place index or 0 for trial-global draws,
    depending on the purpose.
    """
    ss = np.random.SeedSequence(root_seed, spawn_key=(trial, unit, int(draw)))
    return np.random.Generator(np.random.Philox(ss))
