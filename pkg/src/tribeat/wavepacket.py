"""Temporal amplitude models of the source photons.

A photon is described by a real nonnegative envelope (L2-normalised over its
support), an emission time ``t0`` and a carrier detuning in MHz.  Only
detuning *differences* matter downstream, so absolute optical frequencies are
never represented.  All times are in ns; the MHz*ns phase factor is 1e-3
cycles per unit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

MHZ_NS = 1e-3  # cycles accumulated per (MHz * ns)

# Detunings of the three sources relative to a common reference, MHz.
REFERENCE_DETUNINGS_MHZ = (72.4, 33.0, 52.4)
# Single-photon linewidth, MHz (sets the scale of the default envelope).
REFERENCE_LINEWIDTH_MHZ = 12.9
# Heralded efficiency from source to network.
REFERENCE_EFFICIENCY = 0.45

DEFAULT_RISE_NS = 5.0
DEFAULT_FALL_NS = 25.0

# Fixed-step trapezoid resolves the fastest beat (~25 ns) with >100 pts/period.
QUAD_STEP_NS = 0.25
# Pairwise overlaps are 1-D, so a much finer step is affordable; this keeps
# the self-overlap within 1e-9 of the L2 normalisation.
OVERLAP_STEP_NS = 0.02
# Envelope support is chosen so the truncated |xi|^2 mass stays below 1e-8;
# for the exponential tails this needs ~10 fall times (8 is not quite enough).
FALL_TIMES_IN_SUPPORT = 10.0


@dataclass(frozen=True)
class Wavepacket:
    """One source photon: envelope shape + emission time + carrier detuning."""

    shape: str
    params: dict
    t0_ns: float
    detuning_mhz: float
    _envelope: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    _support: tuple[float, float] = field(repr=False, compare=False)  # relative to t0
    _norm: float = field(repr=False, compare=False)

    @staticmethod
    def one_sided_exponential(gamma_per_ns: float, t0_ns: float = 0.0,
                              detuning_mhz: float = 0.0) -> "Wavepacket":
        if gamma_per_ns <= 0:
            raise ValueError("gamma must be positive")
        g = float(gamma_per_ns)

        def env(tau):
            return np.where(tau >= 0.0, np.exp(-g * np.maximum(tau, 0.0)), 0.0)

        # |env|^2 mass beyond T is exp(-2 g T); 19/2g pushes it below 1e-8
        support = (0.0, 9.5 / g)
        return Wavepacket._build("one_sided_exponential", {"gamma_per_ns": g},
                                 t0_ns, detuning_mhz, env, support)

    @staticmethod
    def double_exponential(rise_ns: float = DEFAULT_RISE_NS, fall_ns: float = DEFAULT_FALL_NS,
                           t0_ns: float = 0.0, detuning_mhz: float = 0.0) -> "Wavepacket":
        if rise_ns <= 0 or fall_ns <= 0:
            raise ValueError("rise and fall times must be positive")
        if rise_ns >= fall_ns:
            raise ValueError("rise time must be shorter than fall time")
        b = 1.0 / float(rise_ns)   # fast rate
        a = 1.0 / float(fall_ns)   # slow rate

        def env(tau):
            tau = np.maximum(tau, 0.0)
            return np.where(np.asarray(tau) > 0.0, np.exp(-a * tau) - np.exp(-b * tau), 0.0)

        support = (0.0, FALL_TIMES_IN_SUPPORT * fall_ns)
        return Wavepacket._build("double_exponential",
                                 {"rise_ns": float(rise_ns), "fall_ns": float(fall_ns)},
                                 t0_ns, detuning_mhz, env, support)

    @staticmethod
    def gaussian(sigma_ns: float, t0_ns: float = 0.0, detuning_mhz: float = 0.0) -> "Wavepacket":
        if sigma_ns <= 0:
            raise ValueError("sigma must be positive")
        s = float(sigma_ns)

        def env(tau):
            return np.exp(-(tau ** 2) / (4.0 * s * s))

        # |env|^2 is a normal pdf with std sigma; +-7 sigma leaves < 3e-12 outside
        support = (-7.0 * s, 7.0 * s)
        return Wavepacket._build("gaussian", {"sigma_ns": s}, t0_ns, detuning_mhz,
                                 env, support, pad_sides="both")

    @staticmethod
    def tabulated(times_ns, amplitudes, t0_ns: float = 0.0,
                  detuning_mhz: float = 0.0) -> "Wavepacket":
        t = np.asarray(times_ns, dtype=float)
        a = np.asarray(amplitudes, dtype=float)
        if t.ndim != 1 or t.shape != a.shape or t.size < 2:
            raise ValueError("tabulated envelope needs matching 1-d time/amplitude arrays")
        if np.any(np.diff(t) <= 0):
            raise ValueError("tabulated times must be strictly increasing")
        if np.any(a < 0) or not np.all(np.isfinite(a)):
            raise ValueError("tabulated amplitudes must be finite and nonnegative")

        def env(tau):
            return np.interp(tau, t, a, left=0.0, right=0.0)

        support = (float(t[0]), float(t[-1]))
        return Wavepacket._build("tabulated",
                                 {"times_ns": t.tolist(), "amplitudes": a.tolist()},
                                 t0_ns, detuning_mhz, env, support, pad_sides="none")

    @staticmethod
    def _build(shape, params, t0_ns, detuning_mhz, env, support,
               pad_sides="tail") -> "Wavepacket":
        lo, hi = support
        # Simpson rule on a dense grid for the normalisation constant only;
        # runtime quadrature uses QUAD_STEP_NS.  The window extends past the
        # declared support so the mass missed by the constant stays below
        # ~1e-12; causal shapes are never padded below their onset (the rule
        # cannot cross a jump).
        pad = 0.5 * (hi - lo)
        g_lo = lo - pad if pad_sides == "both" else lo
        g_hi = hi if pad_sides == "none" else hi + pad
        n = max(int((g_hi - g_lo) / 0.01), 2001) | 1
        grid = np.linspace(g_lo, g_hi, n)
        vals = env(grid) ** 2
        dx = grid[1] - grid[0]
        norm2 = float((vals[0:-2:2] + 4.0 * vals[1:-1:2] + vals[2::2]).sum() * dx / 3.0)
        if not norm2 > 0:
            raise ValueError("envelope has zero L2 norm")
        return Wavepacket(shape=shape, params=params, t0_ns=float(t0_ns),
                          detuning_mhz=float(detuning_mhz), _envelope=env,
                          _support=(lo, hi), _norm=1.0 / np.sqrt(norm2))

    def envelope(self, t_ns) -> np.ndarray:
        """Normalised real envelope evaluated at absolute time(s)."""
        tau = np.asarray(t_ns, dtype=float) - self.t0_ns
        return self._norm * self._envelope(tau)

    def support(self) -> tuple[float, float]:
        """Absolute time window containing all but < 1e-8 of the |xi|^2 mass."""
        lo, hi = self._support
        return (self.t0_ns + lo, self.t0_ns + hi)

    def with_detuning(self, detuning_mhz: float) -> "Wavepacket":
        return Wavepacket(self.shape, self.params, self.t0_ns, float(detuning_mhz),
                          self._envelope, self._support, self._norm)

    def with_t0(self, t0_ns: float) -> "Wavepacket":
        return Wavepacket(self.shape, self.params, float(t0_ns), self.detuning_mhz,
                          self._envelope, self._support, self._norm)


def amplitude(w: Wavepacket, t_ns):
    """Complex amplitude xi(t) = envelope(t - t0) * exp(-i 2 pi nu t).

    The detuning phase rides on absolute time, so |amplitude| is independent
    of the detuning.  Accepts scalars or arrays.
    """
    t = np.asarray(t_ns, dtype=float)
    if not np.all(np.isfinite(t)):
        raise ValueError("detection times must be finite")
    phase = np.exp(-2j * np.pi * w.detuning_mhz * MHZ_NS * t)
    out = w.envelope(t) * phase
    if np.ndim(t_ns) == 0:
        return complex(out)
    return out


@dataclass(frozen=True)
class SourceSet:
    """The ordered input photons plus per-source calibration defaults."""

    wavepackets: tuple[Wavepacket, ...]
    efficiency: float = 1.0
    contamination: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.efficiency <= 1.0:
            raise ValueError("efficiency must lie in [0, 1]")
        if not 0.0 <= self.contamination < 0.5:
            raise ValueError("contamination probability must lie in [0, 0.5)")

    def __len__(self):
        return len(self.wavepackets)

    def support(self) -> tuple[float, float]:
        windows = [w.support() for w in self.wavepackets]
        return (min(w[0] for w in windows), max(w[1] for w in windows))

    def time_grid(self, step_ns: float = QUAD_STEP_NS) -> np.ndarray:
        """Uniform quadrature grid spanning the union of envelope supports."""
        lo, hi = self.support()
        lo -= 5.0  # pre-window for jittered / shifted times
        n = int(np.ceil((hi - lo) / step_ns)) + 1
        return lo + step_ns * np.arange(n)


def reference_sources(efficiency: float = REFERENCE_EFFICIENCY,
                  contamination: float = 0.1265,
                  rise_ns: float = DEFAULT_RISE_NS,
                  fall_ns: float = DEFAULT_FALL_NS) -> SourceSet:
    """Three photons with the reference detunings and identical envelopes.

    Detunings (72.4, 33.0, 52.4) MHz, common emission time t0 = 0.  The
    default contamination is g2/2 at the operating excitation probability
    (see sampler.contamination_from_g2).
    """
    packets = tuple(
        Wavepacket.double_exponential(rise_ns=rise_ns, fall_ns=fall_ns,
                                      t0_ns=0.0, detuning_mhz=nu)
        for nu in REFERENCE_DETUNINGS_MHZ
    )
    return SourceSet(wavepackets=packets, efficiency=efficiency,
                     contamination=contamination)


def spectral_overlap(a: Wavepacket, b: Wavepacket) -> complex:
    """Inner product  integral conj(xi_a)(t) xi_b(t) dt  by trapezoid quadrature."""
    lo = min(a.support()[0], b.support()[0])
    hi = max(a.support()[1], b.support()[1])
    # pad past the declared supports so truncated tails stay below 1e-10
    hi = hi + 0.5 * (hi - lo)
    n = int(np.ceil((hi - lo) / OVERLAP_STEP_NS)) + 1
    t = lo + OVERLAP_STEP_NS * np.arange(n)
    vals = np.conj(amplitude(a, t)) * amplitude(b, t)
    return complex(np.trapezoid(vals, dx=OVERLAP_STEP_NS))


def gram_matrix(sources: SourceSet, step_ns: float = QUAD_STEP_NS) -> np.ndarray:
    """Pairwise overlaps G[a, b] = integral conj(xi_a) xi_b dt on a shared grid."""
    t = sources.time_grid(step_ns)
    xi = np.stack([amplitude(w, t) for w in sources.wavepackets])
    w = np.full(t.size, step_ns)
    w[0] = w[-1] = step_ns / 2.0
    return (np.conj(xi) * w) @ xi.T
