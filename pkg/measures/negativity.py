from typing import Sequence

import numpy as np

from .density import partial_transpose
from .measure_types import ReducedDensityMatrix


def log_negativity(rho: ReducedDensityMatrix, partition: Sequence[int]) -> float:
    """
    log2 of the trace norm of rho partially transposed on `partition`.

    A Bell pair gives 1. Round-off below zero is clamped.
    """
    partition = sorted(set(partition))
    if not partition or len(partition) >= rho.m or any(not 0 <= s < rho.m for s in partition):
        raise ValueError(f"partition {partition} is not a proper bipartition of {rho.m} spins")

    eigenvalues = np.linalg.eigvalsh(partial_transpose(rho, partition))
    trace_norm = float(np.sum(np.abs(eigenvalues)))
    return max(float(np.log2(trace_norm)), 0.0)
