import numpy as np
import pytest

from tribeat import correlation, network, sampler, wavepacket
from tribeat.grids import GridSpec

PHASES = {"0": 0.0, "pi/2": np.pi / 2, "pi": np.pi, "3pi/2": 3 * np.pi / 2}


@pytest.fixture(scope="session")
def ref_src():
    return wavepacket.reference_sources(efficiency=1.0, contamination=0.0)


@pytest.fixture(scope="session")
def default_spec():
    return GridSpec(-100.0, 100.0, -100.0, 100.0, 1.0)


@pytest.fixture(scope="session")
def landscapes(ref_src, default_spec):
    """Theory landscapes for the four reference phase settings."""
    return {name: correlation.landscape_theory(network.reference_network(phi), ref_src,
                                               spec=default_spec)
            for name, phi in PHASES.items()}


@pytest.fixture(scope="session")
def tritter_events_ideal(ref_src):
    """Ideal threefold coincidences at phi=pi/2 (1e5 prepared trials)."""
    u = network.reference_network(np.pi / 2)
    return sampler.sample_events(u, ref_src, sampler.NoiseModel.ideal(),
                                 100_000, seed=20240907)


@pytest.fixture(scope="session")
def phi0_events_quantum(ref_src):
    u = network.reference_network(0.0)
    return sampler.sample_events(u, ref_src, sampler.NoiseModel.ideal(),
                                 100_000, seed=31)


@pytest.fixture(scope="session")
def phi0_events_classical(ref_src):
    u = network.reference_network(0.0)
    return sampler.sample_distinguishable(u, ref_src, sampler.NoiseModel.ideal(),
                                          200_000, seed=31)
