from dataclasses import dataclass
from typing import Sequence

import numpy as np

_OBSERVABLE_CODES = {"W": 1, "I2": 2, "W4": 3, "E": 4, "D": 5}
# offset keeps observable spawn keys away from the realization's child streams
_OBSERVABLE_KEY_OFFSET = 1000


@dataclass
class RealizationStreams:
    gates: np.random.Generator
    sites: np.random.Generator
    outcomes: np.random.Generator


def realization_streams(master_seed: int, realization_index: int) -> RealizationStreams:
    """
    child(master_seed, k): three independent streams for gate draws,
    measurement-site selection and measurement outcomes. Splitting them lets a
    record be replayed from its gate stream and its recorded outcomes alone.
    """
    root = np.random.SeedSequence(entropy=master_seed, spawn_key=(realization_index,))
    gates, sites, outcomes = (np.random.default_rng(s) for s in root.spawn(3))
    return RealizationStreams(gates=gates, sites=sites, outcomes=outcomes)


def observable_rng(master_seed: int, realization_index: int, observable: str,
                   positions: Sequence[int], layer: int | None = None) -> np.random.Generator:
    """Restart stream of one criterion evaluation; independent of scheduling order."""
    key = (realization_index,
           _OBSERVABLE_KEY_OFFSET + _OBSERVABLE_CODES[observable],
           0 if layer is None else layer + 1,
           *positions)
    return np.random.default_rng(np.random.SeedSequence(entropy=master_seed, spawn_key=key))
