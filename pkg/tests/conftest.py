import pytest

from eswidth import hrir

FS = 48000


@pytest.fixture(scope="session")
def bank():
    return hrir.synth_spherical_bank(grid_step=5.0, ir_length=256, sample_rate=FS)


@pytest.fixture(scope="session")
def phase_bank(bank):
    return hrir.phase_basis(bank)


@pytest.fixture(scope="session")
def magnitude_bank(bank):
    return hrir.magnitude_basis(bank, max_lag=64)
