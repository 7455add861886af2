"""Acceptance gate: one test per release criterion, each printing a verdict
line.  Run with `pytest tests/test_acceptance.py -s` to see the lines live.
"""

import time
from itertools import product

import numpy as np
import pytest

from tribeat import analysis
from tribeat.analysis import beat_peak_ratio, beat_periods, fidelity, smooth_events, symmetry_score
from tribeat.cli import main as cli_main
from tribeat.correlation import joint_density
from tribeat.grids import LandscapeGrid
from tribeat.network import (
    CircuitElement,
    circuit_to_unitary,
    gauge_distance,
    reference_network,
    tritter,
    u_zero,
    unitarity_defect,
)
from tribeat.permanent import perm_naive, perm_ryser
from tribeat.protocol import ProtocolConfig, enhancement_factor, monte_carlo_rate
from tribeat.sampler import NoiseModel, sample_events
from tribeat.wavepacket import SourceSet, Wavepacket


def verdict(name, ok, detail=""):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def test_permanent_oracle_suite():
    rng = np.random.default_rng(42)
    start = time.time()
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(2, 6))
        m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        expected = perm_naive(m)
        err = abs(perm_ryser(m) - expected) / (1.0 + abs(expected))
        worst = max(worst, err)
    elapsed = time.time() - start
    verdict("permanent oracle suite", worst < 1e-10 and elapsed < 5.0,
            f"worst relative error {worst:.2e}, {elapsed:.2f}s")


def test_zero_permanent_anchor():
    perm = abs(perm_ryser(u_zero()))
    du = unitarity_defect(u_zero())
    dt = unitarity_defect(tritter())
    verdict("zero-permanent anchor", perm < 1e-10 and du <= 1e-12 and dt <= 1e-12,
            f"|perm|={perm:.2e}, unitarity defects {du:.2e}/{dt:.2e}")


def test_network_fit_anchors():
    d0 = gauge_distance(reference_network(0.0), u_zero())
    d1 = gauge_distance(reference_network(np.pi / 2), tritter())
    swaps = []
    for phi in (0.0, np.pi / 4, np.pi / 2):
        swaps.append(gauge_distance(reference_network(phi + np.pi),
                                    reference_network(phi)[[1, 0, 2], :]))
    ok = d0 <= 1e-6 and d1 <= 1e-6 and all(s <= 1e-6 for s in swaps)
    verdict("network fit anchors", ok,
            f"phi=0: {d0:.2e}, pi/2: {d1:.2e}, row-swap max: {max(swaps):.2e}")


def _total_probability(u, sources, step=2.0):
    lo, hi = sources.support()
    hi = lo + 0.8 * (hi - lo)  # the trimmed tail holds < 1e-6 of the mass
    n = int(np.ceil((hi - lo) / step)) + 1
    t = lo + step * np.arange(n)
    w = np.full(n, step)
    w[0] = w[-1] = step / 2.0
    times = np.empty((n, n, 3))
    times[:, :, 0] = t[:, None]
    times[:, :, 1] = t[None, :]
    total = 0.0
    for ports in product((1, 2, 3), repeat=3):
        s = 0.0
        for tk, wk in zip(t, w):
            times[:, :, 2] = tk
            p = joint_density(u, sources, ports, times)
            s += wk * float((p * w[:, None] * w[None, :]).sum())
        total += s
    return total


def test_normalization_conservation(ref_src):
    start = time.time()
    u = reference_network(0.0)
    identical = SourceSet(wavepackets=tuple(
        Wavepacket.double_exponential(detuning_mhz=50.0) for _ in range(3)))
    tot_ref = _total_probability(u, ref_src)
    tot_same = _total_probability(u, identical)
    elapsed = time.time() - start
    ok = abs(tot_ref - 1.0) <= 1e-3 and abs(tot_same - 1.0) <= 1e-3 and elapsed < 120.0
    verdict("normalization conservation", ok,
            f"detuned sources {tot_ref:.6f}, identical {tot_same:.6f}, {elapsed:.0f}s")


def test_time_resolved_hom_zero():
    bs = circuit_to_unitary([CircuitElement.beamsplitter(1, 2, 0.5)], 2)
    worst = 0.0
    for delta in (0.0, 20.0, 39.4):
        src = SourceSet(wavepackets=(Wavepacket.double_exponential(detuning_mhz=0.0),
                                     Wavepacket.double_exponential(detuning_mhz=delta)))
        for t in (5.0, 12.0, 28.0):
            worst = max(worst, joint_density(bs, src, (1, 2), (t, t)))
    verdict("time-resolved HOM zero", worst < 1e-20, f"max density {worst:.2e}")


def test_landscape_dip(landscapes):
    grid = landscapes["0"]
    ratio = grid.value_at(0.0, 0.0) / grid.values.max()
    verdict("phi=0 central dip", ratio < 0.05, f"f(0,0)/max = {ratio:.4f}")


def test_beat_periods(landscapes):
    bx0, by0 = beat_periods(landscapes["0"])
    bxt, byt = beat_periods(landscapes["pi/2"])
    ok_x = abs(bx0.period_ns - 50.0) / 50.0 <= 0.02
    ok_y = abs(by0.period_ns - 25.4) / 25.4 <= 0.02
    ok_t = abs(bxt.period_ns - byt.period_ns) / bxt.period_ns <= 0.05
    verdict("beat periods", ok_x and ok_y and ok_t,
            f"phi=0 x {bx0.period_ns:.2f} ns, y {by0.period_ns:.2f} ns; "
            f"pi/2 x {bxt.period_ns:.2f} vs y {byt.period_ns:.2f} ns")


def _cross_fidelity(a: LandscapeGrid, b_swapped: LandscapeGrid) -> float:
    vals, mask = analysis.transform_grid(b_swapped, "axis_swap")
    return analysis._fidelity_values(np.where(mask, a.values, 0.0), vals)


def test_symmetries(landscapes):
    rot = symmetry_score(landscapes["pi/2"], "rotation_120")
    cross_pi = _cross_fidelity(landscapes["pi"], landscapes["0"])
    cross_3pi2 = _cross_fidelity(landscapes["3pi/2"], landscapes["pi/2"])
    ok = rot > 0.99 and cross_pi > 0.99 and cross_3pi2 > 0.99
    verdict("landscape symmetries", ok,
            f"rotation {rot:.4f}, pi vs swapped 0 {cross_pi:.4f}, "
            f"3pi/2 vs swapped pi/2 {cross_3pi2:.4f}")


def test_sampler_end_to_end(ref_src, landscapes, tritter_events_ideal):
    start = time.time()
    theory = landscapes["pi/2"]
    smoothed = smooth_events(tritter_events_ideal, theory.spec, r0_ns=3.0)
    fid_ideal = fidelity(smoothed, theory)
    u = reference_network(np.pi / 2)
    noisy = sample_events(u, ref_src, NoiseModel(eta=0.45, jitter_ns=0.5, q=0.12),
                          100_000, seed=8)
    fid_noisy = fidelity(smooth_events(noisy, theory.spec, r0_ns=3.0), theory)
    elapsed = time.time() - start
    ok = fid_ideal >= 0.98 and 0.85 < fid_noisy < fid_ideal and elapsed < 600.0
    verdict("sampler end-to-end fidelity", ok,
            f"ideal {fid_ideal:.4f} (n={len(tritter_events_ideal)}), "
            f"eta=0.45 q=0.12 {fid_noisy:.4f} (n={len(noisy)}), {elapsed:.0f}s")


def test_distinguishable_baseline(phi0_events_classical, phi0_events_quantum, default_spec):
    classical = analysis.bin_events(phi0_events_classical, default_spec)
    quantum = analysis.bin_events(phi0_events_quantum, default_spec)
    cx, cy = beat_peak_ratio(classical)
    qx, qy = beat_peak_ratio(quantum)
    ok = max(cx, cy) < 0.05 and min(qx, qy) > 0.20
    verdict("distinguishable baseline", ok,
            f"classical peak/DC x {cx:.3f} y {cy:.3f}; quantum x {qx:.3f} y {qy:.3f}")


def test_protocol_rates():
    start = time.time()
    results = []
    ok = True
    for p_e in (0.01, 0.02, 0.03, 0.04, 0.06):
        cfg = ProtocolConfig(p_e=p_e, m=7, n=3)
        est = monte_carlo_rate(cfg, 1_000_000, seed=1000 + int(p_e * 100))
        closed = enhancement_factor(cfg)
        within = (np.isfinite(est.ratio)
                  and abs(est.ratio - closed) <= 3.0 * est.ratio_stderr)
        ok &= within
        results.append(f"p={p_e}: {est.ratio:.1f} vs {closed:.1f}")
    elapsed = time.time() - start
    ok &= elapsed < 60.0
    verdict("protocol Monte Carlo", ok, "; ".join(results) + f"; {elapsed:.0f}s")


def test_seeded_commands_byte_identical(tmp_path):
    grid_args = ["landscape", "--set", "grid.x_min=-40", "--set", "grid.x_max=40",
                 "--set", "grid.y_min=-40", "--set", "grid.y_max=40",
                 "--set", "grid.step=2", "--set", "network.phi=0"]
    g = [tmp_path / f"g{i}.grid" for i in range(3)]
    assert cli_main([*grid_args, "--output", str(g[0])]) == 0
    assert cli_main([*grid_args, "--output", str(g[1])]) == 0
    assert cli_main([*grid_args, "--output", str(g[2]), "--threads", "3"]) == 0
    grids_ok = g[0].read_bytes() == g[1].read_bytes() == g[2].read_bytes()

    sample_args = ["sample", "--set", "sampler.seed=21", "--set", "sampler.n_events=4000"]
    e = [tmp_path / f"e{i}.csv" for i in range(2)]
    assert cli_main([*sample_args, "--output", str(e[0])]) == 0
    assert cli_main([*sample_args, "--output", str(e[1])]) == 0
    events_ok = e[0].read_bytes() == e[1].read_bytes()
    verdict("seeded determinism", grids_ok and events_ok,
            f"grids identical: {grids_ok}, events identical: {events_ok}")
