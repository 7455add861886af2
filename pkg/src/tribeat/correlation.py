"""Time-resolved multiphoton detection densities via matrix permanents.

For photons entering modes 1..N with amplitudes xi_j(t) and a network unitary
U, a record of detections (d_i, t_i) has joint density

    p(d, t) = |perm(M)|^2 / N!   with   M[i, j] = U[d_i, s_j] * xi_j(t_i).

The 1/N! convention over ordered records makes the density sum to one over
all ordered port tuples and times (unitarity + normalised envelopes), which
the tests enforce as a conservation law.  The theoretical correlation
landscape marginalises the threefold density over the absolute time t3 at
fixed differences (x, y) = (t1 - t3, t2 - t3).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from tribeat.grids import GridSpec, LandscapeGrid
from tribeat.permanent import perm_batch
from tribeat.wavepacket import SourceSet, amplitude

# Marginalisation over t3 uses a fixed-step trapezoid on the envelope support.
LANDSCAPE_T_STEP_NS = 0.5


@dataclass(frozen=True)
class DetectionConfig:
    """Ordered output ports and detection times of one N-fold coincidence."""

    ports: tuple[int, ...]
    times_ns: tuple[float, ...]

    def __post_init__(self):
        if len(self.ports) != len(self.times_ns):
            raise ValueError("ports and times must have equal length")
        if len(self.ports) == 0:
            raise ValueError("at least one detection record is required")


def _check_ports(u: np.ndarray, ports, n_photons: int) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    n_modes = u.shape[0]
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError("network matrix must be square")
    if n_photons > n_modes:
        raise ValueError(f"{n_photons} photons need at least {n_photons} input modes")
    ports = np.asarray(ports, dtype=int)
    if np.any(ports < 1) or np.any(ports > n_modes):
        raise ValueError(f"ports must lie in [1, {n_modes}], got {ports.tolist()}")
    return ports


def amplitude_matrix(u, sources: SourceSet, cfg: DetectionConfig) -> np.ndarray:
    """M[i, j] = U[d_i, s_j] * xi_j(t_i) for photons in input modes 1..N."""
    n = len(cfg.ports)
    if n != len(sources):
        raise ValueError(f"{len(sources)} photons but {n} detection records")
    ports = _check_ports(u, cfg.ports, n)
    u = np.asarray(u, dtype=complex)
    times = np.asarray(cfg.times_ns, dtype=float)
    xi = np.empty((n, n), dtype=complex)
    for j, w in enumerate(sources.wavepackets):
        xi[:, j] = amplitude(w, times)
    return u[ports - 1, :n] * xi


def joint_density(u, sources: SourceSet, ports, times_ns) -> np.ndarray | float:
    """p(d, t) = |perm M|^2 / N! for one port tuple and a batch of times.

    `times_ns` has shape (..., N); the result has the leading shape.  A plain
    length-N sequence gives a scalar.
    """
    times = np.asarray(times_ns, dtype=float)
    scalar = times.ndim == 1
    n = len(sources)
    if times.shape[-1] != n:
        raise ValueError(f"times must have last dimension {n}")
    ports = _check_ports(u, ports, n)
    u = np.asarray(u, dtype=complex)
    xi = np.empty(times.shape + (n,), dtype=complex)
    for j, w in enumerate(sources.wavepackets):
        xi[..., :, j] = amplitude(w, times)
    m = u[ports - 1, :n] * xi
    p = np.abs(perm_batch(m)) ** 2 / math.factorial(n)
    return float(p) if scalar else p


_PERMS3 = ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0))


def _landscape_rows(u, sources, ports, spec, t3, w3, x_idx):
    """Accumulate the t3 marginal for a block of x rows (disjoint output).

    Uses the permutation expansion of the 3x3 permanent directly: each row of
    the amplitude matrix depends on a single time axis, so the amplitudes are
    evaluated once per axis instead of per grid cell.  Equal by construction
    to marginalising `joint_density` (tested against it).
    """
    x = spec.x[x_idx]
    y = spec.y
    rows = np.asarray(ports, dtype=int) - 1
    u = np.asarray(u, dtype=complex)
    out = np.zeros((x.size, y.size))
    for t, w in zip(t3, w3):
        xi1 = np.stack([amplitude(wp, t + x) for wp in sources.wavepackets])
        xi2 = np.stack([amplitude(wp, t + y) for wp in sources.wavepackets])
        xi3 = np.array([amplitude(wp, float(t)) for wp in sources.wavepackets])
        a = u[rows[0], :3, None] * xi1
        b = u[rows[1], :3, None] * xi2
        c = u[rows[2], :3] * xi3
        perm = np.zeros((x.size, y.size), dtype=complex)
        for s0, s1, s2 in _PERMS3:
            perm += np.outer(a[s0], b[s1] * c[s2])
        out += w * (perm.real ** 2 + perm.imag ** 2)
    return out / 6.0


def landscape_theory(u, sources: SourceSet, ports=(1, 2, 3),
                     spec: GridSpec | None = None, metadata: dict | None = None,
                     workers: int = 1) -> LandscapeGrid:
    """Threefold coincidence density on the (x, y) grid.

    f(x, y) = 3! * integral p(ports, (t3+x, t3+y, t3)) dt3; the 3! counts the
    orderings of one-photon-per-port records, so the grid integrates to the
    total probability of that coincidence pattern.  Deterministic and
    bit-identical for any worker count (workers split disjoint x rows).
    """
    if spec is None:
        spec = GridSpec(-100.0, 100.0, -100.0, 100.0, 1.0)
    if len(sources) != 3:
        raise ValueError("landscape_theory expects exactly three photons")
    ports = tuple(int(p) for p in ports)
    if len(set(ports)) != 3:
        raise ValueError("landscape_theory expects three distinct ports")
    lo, hi = sources.support()
    n_t = int(np.ceil((hi - lo) / LANDSCAPE_T_STEP_NS)) + 1
    t3 = lo + LANDSCAPE_T_STEP_NS * np.arange(n_t)
    w3 = np.full(n_t, LANDSCAPE_T_STEP_NS)
    w3[0] = w3[-1] = LANDSCAPE_T_STEP_NS / 2.0

    nx = spec.shape[0]
    values = np.empty(spec.shape)
    if workers <= 1:
        values[:] = _landscape_rows(u, sources, ports, spec, t3, w3, np.arange(nx))
    else:
        blocks = np.array_split(np.arange(nx), workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_landscape_rows, u, sources, ports, spec, t3, w3, b)
                       for b in blocks if b.size]
            start = 0
            for b, fut in zip([b for b in blocks if b.size], futures):
                values[start:start + b.size] = fut.result()
                start += b.size
    values *= math.factorial(3)

    meta = {"ports": ",".join(str(p) for p in ports),
            "detunings_mhz": ",".join(f"{w.detuning_mhz:g}" for w in sources.wavepackets),
            "kind": "theory"}
    if metadata:
        meta.update(metadata)
    return LandscapeGrid(spec=spec, values=np.maximum(values, 0.0), metadata=meta)
