import pytest

from permugibbs import generate


@pytest.fixture(scope="session")
def lattice():
    return generate("integer-lattice", window=(-64.0, 64.0))


@pytest.fixture(scope="session")
def half_lattice():
    return generate("scaled-lattice", window=(-16.0, 16.0), spacing=0.5)
