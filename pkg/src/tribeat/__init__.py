"""Time-resolved three-photon interference simulator.

Computes coincidence densities of spectrally distinct single photons behind a
linear-optical network via matrix permanents, samples detection events under
realistic noise, and extracts landscape figures of merit (fidelity, beat
periods, symmetry scores).
"""

from tribeat.permanent import perm_naive, perm_ryser
from tribeat.network import (
    CircuitElement,
    NetworkFamily,
    circuit_to_unitary,
    gauge_distance,
    reference_network,
    tritter,
    u_zero,
)
from tribeat.wavepacket import SourceSet, Wavepacket, amplitude, reference_sources, spectral_overlap
from tribeat.grids import LandscapeGrid
from tribeat.correlation import DetectionConfig, amplitude_matrix, joint_density, landscape_theory
from tribeat.events import DetectionEvent
from tribeat.sampler import NoiseModel, port_weights, sample_distinguishable, sample_events
from tribeat.protocol import ProtocolConfig, enhancement_factor, monte_carlo_rate
from tribeat.analysis import (
    AnalysisReport,
    beat_periods,
    events_rotate_111,
    fidelity,
    smooth_events,
    symmetry_score,
)

__version__ = "0.1.0"
