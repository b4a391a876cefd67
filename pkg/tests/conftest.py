import numpy as np
import pytest

from xbarsim.device import DeviceProfile, load_profiles


@pytest.fixture(scope="session")
def shipped_profiles():
    return load_profiles()


@pytest.fixture(scope="session")
def ideal(shipped_profiles):
    return shipped_profiles["ideal"]


@pytest.fixture()
def linear_profile():
    # 101 uniform levels: 0.37 of the window is exactly level 37.
    return DeviceProfile(name="linear", g_min=1e-6, g_max=1e-4, n_levels=101,
                         nl_ltp=0.0, nl_ltd=0.0, sigma_c2c=0.0,
                         e_pulse=1e-12, t_pulse=1e-9, p_max=100)


@pytest.fixture()
def noisy_profile():
    return DeviceProfile(name="noisy", g_min=1e-5, g_max=1e-4, n_levels=256,
                         nl_ltp=0.8, nl_ltd=-0.8, sigma_c2c=0.1,
                         e_pulse=1e-12, t_pulse=1e-9, p_max=32)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
