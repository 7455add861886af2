import numpy as np
import pytest

from tribeat import analysis
from tribeat.analysis import (
    AnalysisError,
    analyze,
    beat_periods,
    bin_events,
    events_rotate_111,
    fidelity,
    smooth_events,
    symmetry_score,
    transform_grid,
)
from tribeat.events import DetectionEvent
from tribeat.grids import GridSpec, LandscapeGrid


def make_event(t1, t2, t3, event_id=0):
    return DetectionEvent(event_id=event_id, batch_id=event_id,
                          records=((1, t1), (2, t2), (3, t3)))


def event_at(x, y, event_id=0):
    return make_event(float(x), float(y), 0.0, event_id)


@pytest.fixture(scope="module")
def small_spec():
    return GridSpec(-20.0, 20.0, -20.0, 20.0, 1.0)


def test_kernel_value_at_center(small_spec):
    grid = smooth_events([event_at(0, 0)], small_spec, r0_ns=3.0)
    assert grid.value_at(0.0, 0.0) == pytest.approx(1.0, abs=1e-12)


def test_kernel_value_one_radius_away(small_spec):
    grid = smooth_events([event_at(0, 0)], small_spec, r0_ns=3.0)
    assert grid.value_at(3.0, 0.0) == pytest.approx(np.exp(-1.0), rel=1e-10)


def test_kernel_total_mass():
    spec = GridSpec(-60.0, 60.0, -60.0, 60.0, 1.0)
    rng = np.random.default_rng(0)
    events = [event_at(x, y, k) for k, (x, y) in
              enumerate(rng.uniform(-20, 20, size=(40, 2)))]
    grid = smooth_events(events, spec, r0_ns=3.0)
    expected = np.pi * 9.0 * len(events) / spec.step ** 2
    assert grid.values.sum() == pytest.approx(expected, rel=0.02)


def test_smoothing_is_linear_in_events(small_spec):
    rng = np.random.default_rng(1)
    evs = [event_at(x, y, k) for k, (x, y) in enumerate(rng.uniform(-10, 10, (30, 2)))]
    full = smooth_events(evs, small_spec, 3.0)
    part = (smooth_events(evs[:11], small_spec, 3.0).values
            + smooth_events(evs[11:], small_spec, 3.0).values)
    assert np.max(np.abs(full.values - part)) <= 1e-12 * max(full.values.max(), 1.0)


def test_smooth_rejects_empty(small_spec):
    with pytest.raises(AnalysisError):
        smooth_events([], small_spec, 3.0)
    with pytest.raises(AnalysisError):
        smooth_events([event_at(0, 0)], small_spec, r0_ns=0.0)


def test_fidelity_identity_scale_and_symmetry(small_spec):
    rng = np.random.default_rng(2)
    a = LandscapeGrid(spec=small_spec, values=rng.random(small_spec.shape))
    b = LandscapeGrid(spec=small_spec, values=rng.random(small_spec.shape))
    assert fidelity(a, a) == pytest.approx(1.0, abs=1e-12)
    scaled = LandscapeGrid(spec=small_spec, values=3.7 * a.values)
    assert fidelity(scaled, a) == pytest.approx(1.0, abs=1e-12)
    assert fidelity(a, b) == pytest.approx(fidelity(b, a), abs=1e-12)


def test_fidelity_disjoint_supports(small_spec):
    va = np.zeros(small_spec.shape)
    vb = np.zeros(small_spec.shape)
    va[:10] = 1.0
    vb[-10:] = 1.0
    assert fidelity(LandscapeGrid(spec=small_spec, values=va),
                    LandscapeGrid(spec=small_spec, values=vb)) == 0.0


def test_fidelity_errors(small_spec):
    a = LandscapeGrid(spec=small_spec, values=np.ones(small_spec.shape))
    other = GridSpec(-20.0, 20.0, -20.0, 20.0, 2.0)
    b = LandscapeGrid(spec=other, values=np.ones(other.shape))
    with pytest.raises(AnalysisError):
        fidelity(a, b)
    zero = LandscapeGrid(spec=small_spec, values=np.zeros(small_spec.shape))
    with pytest.raises(AnalysisError):
        fidelity(a, zero)


@pytest.fixture(scope="module")
def synthetic_grid():
    spec = GridSpec(-100.0, 100.0, -100.0, 100.0, 1.0)
    x, y = np.meshgrid(spec.x, spec.y, indexing="ij")
    values = (1 + np.cos(2 * np.pi * x / 50.0)) * (1 + np.cos(2 * np.pi * y / 25.4))
    return LandscapeGrid(spec=spec, values=values)


def test_beat_periods_synthetic(synthetic_grid):
    bx, by = beat_periods(synthetic_grid)
    assert abs(bx.period_ns - 50.0) <= bx.err_ns
    assert abs(by.period_ns - 25.4) <= by.err_ns


def test_beat_periods_offset_invariant(synthetic_grid, landscapes):
    for grid in (synthetic_grid, landscapes["0"]):
        shifted = LandscapeGrid(spec=grid.spec, values=grid.values + 0.4 * grid.values.max())
        b1 = beat_periods(grid)
        b2 = beat_periods(shifted)
        assert b1[0].period_ns == pytest.approx(b2[0].period_ns, abs=1e-9)
        assert b1[1].period_ns == pytest.approx(b2[1].period_ns, abs=1e-9)


def test_beat_periods_flat_grid_reports_error(small_spec):
    flat = LandscapeGrid(spec=small_spec, values=np.ones(small_spec.shape))
    with pytest.raises(AnalysisError):
        beat_periods(flat)


def test_radially_symmetric_scores_near_one():
    # radial around the (1,1,1) axis: in difference coordinates the invariant
    # quadratic form is x^2 - xy + y^2, not the Euclidean x^2 + y^2
    spec = GridSpec(-50.0, 50.0, -50.0, 50.0, 1.0)
    x, y = np.meshgrid(spec.x, spec.y, indexing="ij")
    grid = LandscapeGrid(spec=spec, values=np.exp(-(x ** 2 - x * y + y ** 2) / 300.0))
    for name in analysis.TRANSFORMS:
        assert symmetry_score(grid, name) > 0.999


def test_rotation_three_times_returns_original():
    # compact in the rotation-invariant hexagon so mask clipping is negligible
    spec = GridSpec(-60.0, 60.0, -60.0, 60.0, 1.0)
    x, y = np.meshgrid(spec.x, spec.y, indexing="ij")
    xo, yo = x - 8.0, y + 5.0
    values = np.exp(-(xo ** 2 - xo * yo + yo ** 2) / 150.0) + 0.5 * np.exp(
        -(x ** 2 - x * y + y ** 2) / 400.0)
    grid = LandscapeGrid(spec=spec, values=values)
    current = grid
    for _ in range(3):
        vals, mask = transform_grid(current, "rotation_120")
        current = LandscapeGrid(spec=spec, values=np.where(mask, vals, 0.0))
    assert analysis._fidelity_values(current.values, grid.values) > 0.999


def test_unknown_transform_rejected(synthetic_grid):
    with pytest.raises(AnalysisError):
        symmetry_score(synthetic_grid, "diagonal_flip")


def test_rotation_score_tritter_theory(landscapes):
    assert symmetry_score(landscapes["pi/2"], "rotation_120") > 0.99


def test_events_rotate_identity_and_cycle():
    ev = make_event(10.0, 20.0, 30.0)
    assert events_rotate_111([ev], 3)[0].records == ev.records
    rotated = events_rotate_111([ev], 1)[0]
    assert rotated.time_at_port(1) == 30.0
    assert rotated.time_at_port(2) == 10.0
    assert rotated.time_at_port(3) == 20.0


def test_rotated_tritter_events_match_original(tritter_events_ideal, default_spec):
    original = smooth_events(tritter_events_ideal, default_spec, 3.0)
    rotated = smooth_events(events_rotate_111(tritter_events_ideal, 1), default_spec, 3.0)
    assert fidelity(original, rotated) >= 0.97


def test_analyze_report_output(tritter_events_ideal, landscapes):
    report = analyze(tritter_events_ideal[:5000], landscapes["pi/2"], r0_ns=3.0)
    text = report.to_text()
    assert "fidelity" in text
    assert "0.936(13)" in text
    kv = report.to_key_values()
    assert "fidelity=" in kv
    assert "beat_period_x_ns=" in kv
    assert "symmetry_rotation_120=" in kv


def test_fidelity_stable_under_grid_step(ref_src, tritter_events_ideal):
    from tribeat.correlation import landscape_theory
    from tribeat.network import reference_network
    u = reference_network(np.pi / 2)
    events = tritter_events_ideal
    fids = []
    for step in (0.5, 1.0, 2.0):
        spec = GridSpec(-100.0, 100.0, -100.0, 100.0, step)
        theory = landscape_theory(u, ref_src, spec=spec)
        fids.append(fidelity(smooth_events(events, spec, 3.0), theory))
    assert max(fids) - min(fids) < 0.01


def test_bin_events_counts(small_spec):
    evs = [event_at(0, 0, 0), event_at(0, 0, 1), event_at(5, -3, 2), event_at(500, 0, 3)]
    grid = bin_events(evs, small_spec)
    assert grid.values.sum() == 3.0  # far event falls outside
    assert grid.value_at(0.0, 0.0) == 2.0
    assert grid.value_at(5.0, -3.0) == 1.0
