from .circuit_types import Boundary, CircuitConfig, Layer, LayerKind


def odd_bonds(L: int) -> list[tuple[int, int]]:
    """Bonds (0,1), (2,3), ...; the first covers the first two sites."""
    return [(k, k + 1) for k in range(0, L - 1, 2)]


def even_bonds(L: int, boundary: Boundary) -> list[tuple[int, int]]:
    bonds = [(k, k + 1) for k in range(1, L - 1, 2)]
    if boundary == Boundary.PBC and L % 2 == 0:
        bonds.append((L - 1, 0))
    return bonds


def build_layer_schedule(config: CircuitConfig) -> list[Layer]:
    """
    [odd-bond unitaries, measurements, even-bond unitaries, measurements] repeated,
    2 * n_unitary_layers layers in total, always ending with a measurement layer.
    """
    layers = []
    for u in range(config.n_unitary_layers):
        bonds = odd_bonds(config.L) if u % 2 == 0 else even_bonds(config.L, config.boundary)
        layers.append(Layer(index=2 * u, kind=LayerKind.UNITARY, bonds=bonds))
        layers.append(Layer(index=2 * u + 1, kind=LayerKind.MEASUREMENT))
    return layers
