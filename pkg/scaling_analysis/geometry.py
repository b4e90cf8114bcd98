import math
from typing import Sequence


def chord_length(N: int, x: float) -> float:
    """(N / pi) sin(pi x / N), evaluated on min(x, N - x) so w(x) == w(N - x) exactly."""
    if not 0 < x < N:
        raise ValueError(f"chord length needs 0 < x < N, got x={x}, N={N}")
    return N / math.pi * math.sin(math.pi * min(x, N - x) / N)


def cross_ratio(N: int, dual_positions: Sequence[float]) -> float:
    """
    eta = w12 w34 / (w13 w24) for dual-lattice positions i1..i4 on a ring of N
    sites; [i1, i2] bounds the first region and [i3, i4] the second.
    """
    if len(dual_positions) != 4:
        raise ValueError(f"cross ratio needs 4 dual positions, got {len(dual_positions)}")

    def w(a: float, b: float) -> float:
        gap = (b - a) % N
        if gap == 0:
            raise ValueError(f"dual positions {a} and {b} coincide on a ring of {N}")
        return chord_length(N, gap)

    i1, i2, i3, i4 = dual_positions
    return w(i1, i2) * w(i3, i4) / (w(i1, i3) * w(i2, i4))


def single_site_cross_ratio(N: int, x: int) -> float:
    """Cross ratio of two single-spin regions x bonds apart: 1 / w(x)^2."""
    return 1.0 / chord_length(N, x) ** 2
