import sys

import numpy as np
import pytest

from hfreadout.spectrum import TransmonParams, diagonalize

# device values: E_C/h = 36 MHz, E_J/h = 2.2 GHz, n_g = 0.25
DEVICE_EC = 36e6
DEVICE_EJ = 2.2e9
DEVICE_NG = 0.25
DEVICE_WR_BARE = 9.2233e9
DEVICE_ETA = 0.38


@pytest.fixture(scope="session")
def device_params():
    return TransmonParams(DEVICE_EC, DEVICE_EJ, DEVICE_NG)


@pytest.fixture(scope="session")
def device_spectrum(device_params):
    return diagonalize(device_params, 40)


@pytest.fixture(scope="session")
def deep_params():
    """E_J/E_C = 60 at n_g = 0.25, the simulation transmon."""
    return TransmonParams(36e6, 60 * 36e6, 0.25)


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
