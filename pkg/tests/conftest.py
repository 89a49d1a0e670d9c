import numpy as np
import pytest

from ionprotect import DensityMatrix, FockSpace, Generator, LindbladChannel, Operator


@pytest.fixture
def rng():
    return np.random.default_rng(42)


def random_density(rng, space: FockSpace) -> DensityMatrix:
    mat = rng.standard_normal((space.dim, space.dim)) \
        + 1j * rng.standard_normal((space.dim, space.dim))
    mat = mat @ mat.conj().T
    return DensityMatrix(space, mat / np.trace(mat).real, validate=False)


def random_generator(rng, space: FockSpace, n_channels: int = 2) -> Generator:
    channels = []
    for _ in range(n_channels):
        mat = rng.standard_normal((space.dim, space.dim)) \
            + 1j * rng.standard_normal((space.dim, space.dim))
        channels.append(LindbladChannel(float(rng.uniform(0.1, 2.0)), Operator(space, mat)))
    return Generator(channels, space=space)


def collinearity_residual(a: np.ndarray, b: np.ndarray) -> float:
    """Relative residual of the best least-squares fit a ~ c * b."""
    c = np.vdot(b, a) / np.vdot(b, b)
    return float(np.linalg.norm(a - c * b) / np.linalg.norm(a))
