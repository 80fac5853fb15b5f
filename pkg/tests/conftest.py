import numpy as np
import pytest

from randpoled import DispersionModel, ProcessConfig
from randpoled.spectra import SpectralGrid


@pytest.fixture(scope="session")
def cfg():
    return ProcessConfig()


@pytest.fixture(scope="session")
def model():
    return DispersionModel()


@pytest.fixture(scope="session")
def l0(cfg, model):
    return model.qpm_period(cfg.omega_s0, cfg.omega_s0)


@pytest.fixture(scope="session")
def dk0(l0):
    return np.pi / l0


@pytest.fixture(scope="session")
def grid(cfg):
    return SpectralGrid.default(cfg.omega_s0, n=1025)
