import numpy as np
import pytest

from iontrans.protocol import GeometryInputs, ProtocolParams

TWO_ION_PHASES = (0.3, 1.1)
FOUR_ION_PHASES = (0.3, 1.1, 2.0, 2.9)


@pytest.fixture
def params():
    return ProtocolParams()


@pytest.fixture
def small_params():
    """Default physics with small sector caps, for quick step-II runs."""
    return ProtocolParams(max_ion_excitations=2, total_excitation_cap=2, bus_cutoff=2, spurious_cutoff=1)


@pytest.fixture
def two_ions():
    return GeometryInputs(2, phase_mode="explicit", phases=TWO_ION_PHASES)


@pytest.fixture
def four_ions():
    return GeometryInputs(4, phase_mode="explicit", phases=FOUR_ION_PHASES)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
