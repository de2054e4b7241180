"""Grid sweeps, state tracking, hybridization maps and resonance census."""

import warnings

import numpy as np
import pytest

from hfreadout.atlas import (
    DriveGrid,
    StarkTrackedState,
    compute_grid,
    extract_transition_amplitude,
    hybridization_map,
    resonance_condition_scan,
    spectral_collisions,
    track_states,
)
from hfreadout.floquet import DrivenSystem, driven_transmon, two_level_oracle, two_level_system

POWERS = np.linspace(0.0, 0.15, 6)


@pytest.fixture(scope="module")
def deep_system(deep_params):
    return driven_transmon(deep_params, 20)


def _tracked(grid, threshold=0.8, windows=3):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return track_states(grid, (0, 1), threshold=threshold, windows=windows)


@pytest.fixture(scope="module")
def far_grid(deep_system):
    return compute_grid(deep_system, np.linspace(10, 13, 13), POWERS, workers=4)


@pytest.fixture(scope="module")
def near_grid(deep_system):
    return compute_grid(deep_system, np.linspace(1.3, 1.7, 13), POWERS, workers=4)


def _overlaps(grid, st):
    """Per-cell best overlap of the reconstruction with any Floquet mode."""
    out = np.full(grid.shape, np.nan)
    for a in range(grid.shape[0]):
        for b in range(grid.shape[1]):
            v = st.state(grid.zeta[a, b], grid.omegas[a])
            out[a, b] = np.max(np.abs(v.conj() @ grid.modes[a, b]) ** 2)
    return out


class TestGrid:
    def test_axes_validated(self, deep_system):
        with pytest.raises(ValueError):
            compute_grid(deep_system, [1.0, 1.0], [0.0])
        with pytest.raises(ValueError):
            compute_grid(deep_system, [1.0], [0.1, 0.0])
        with pytest.raises(ValueError):
            compute_grid(deep_system, [1.0], [0.1], kind="photons")

    def test_every_cell_populated(self, far_grid):
        assert isinstance(far_grid, DriveGrid)
        assert far_grid.failed == {}
        assert np.all(np.isfinite(far_grid.quasienergies))

    def test_worker_count_does_not_change_grid(self, deep_system):
        args = (deep_system, [1.4, 1.5, 1.6], [0.0, 0.05, 0.1])
        one = compute_grid(*args, workers=1)
        two = compute_grid(*args, workers=2)
        assert np.array_equal(one.modes, two.modes)
        assert np.array_equal(one.quasienergies, two.quasienergies)


class TestTracking:
    def test_undriven_axis_gives_identity(self, deep_system):
        grid = compute_grid(deep_system, np.linspace(1.2, 2.0, 5), [0.0])
        for st in _tracked(grid):
            c = st.coefficients
            expect = np.zeros(deep_system.dim)
            expect[st.level] = 1.0
            np.testing.assert_allclose(c[0, 0].real, expect, atol=1e-10)
            np.testing.assert_allclose(c[0, 0].imag, 0.0, atol=1e-10)
            rest = c.copy()
            rest[0, 0] = 0.0
            assert np.abs(rest).max() < 1e-10

    def test_sparse_window_tracked_everywhere(self, far_grid):
        for st in _tracked(far_grid):
            assert st.included.all()
            assert _overlaps(far_grid, st).min() > 0.98
            assert st.norm_error < 1e-2

    def test_dense_window_flags_cells(self, near_grid):
        tracked = _tracked(near_grid)
        for st in tracked:
            excluded = ~st.included
            assert excluded.sum() > 0
        # the inclusion rule, cell by cell, against the final reference overlap
        for st in tracked:
            free = ~st.collisions
            assert np.all(st.overlap[st.included] >= 0.8)
            assert np.all(st.overlap[free & ~st.included] < 0.8)
            assert np.all((st.overlap >= 0) & (st.overlap <= 1 + 1e-12))

    @pytest.mark.parametrize("which", ["far_grid", "near_grid"])
    def test_threshold_monotone(self, which, request):
        grid = request.getfixturevalue(which)
        low = _tracked(grid, threshold=0.8)
        high = _tracked(grid, threshold=0.9)
        for a, b in zip(low, high):
            assert not np.any(b.included & ~a.included)

    def test_bad_order(self, far_grid):
        with pytest.raises(ValueError):
            track_states(far_grid, poly_order=5)


def _two_level_grid(energy, omegas, zetas):
    # |0> at zero, |1> at ``energy``; drive zeta (|1><0| e^{-iwt} + h.c.)
    sys = DrivenSystem(np.array([0.0, energy]), np.array([[0.0, 0.0], [1.0, 0.0]]))
    return compute_grid(sys, omegas, zetas, kind="zeta")


class TestHybridization:
    def test_undriven_row_is_zero(self, far_grid, near_grid):
        for grid in (far_grid, near_grid):
            tracked = _tracked(grid)
            for c in (0, 1):
                assert np.all(hybridization_map(grid, tracked, c).theta[:, 0] == 0.0)

    def test_theta_bounded(self, near_grid):
        tracked = _tracked(near_grid)
        for c in (0, 1):
            th = hybridization_map(near_grid, tracked, c).theta
            t = th[np.isfinite(th)]
            assert np.all((t >= 0) & (t <= 1))

    def test_unknown_level(self, far_grid):
        with pytest.raises(KeyError):
            hybridization_map(far_grid, _tracked(far_grid), 3)

    def test_two_level_profile(self):
        energy = 1e9
        omegas = np.linspace(0.95, 1.05, 41)
        zetas = np.array([0.0, 2e-3, 5e-3])
        grid = _two_level_grid(energy, omegas, zetas)
        tracked = [StarkTrackedState.identity(0, 2)]
        hm = hybridization_map(grid, tracked, 0)
        for b, zeta in enumerate(zetas * energy):
            expect = [two_level_oracle(2 * zeta, energy - w * energy).theta for w in omegas]
            np.testing.assert_allclose(hm.theta[:, b], expect, atol=1e-3)
        assert hm.theta[20, 1:] == pytest.approx(0.5, abs=1e-3)
        assert np.all(hm.theta <= 0.5 + 2e-2)
        assert np.all(hm.dominant[:, 1:] == 1)

    def test_refinement_keeps_resonance_center(self, deep_params):
        # the 1 -> 2 line of the deep transmon at weak drive
        sys = driven_transmon(deep_params, 12)
        centers = []
        for n in (16, 31):
            grid = compute_grid(sys, np.linspace(0.9, 1.0, n), [0.0, 0.004, 0.008], kind="zeta")
            hm = hybridization_map(grid, _tracked(grid, windows=2), 1)
            centers.append(grid.omega_norm[np.nanargmax(hm.theta[:, 2])])
        coarse_cell = 0.1 / 15
        assert abs(centers[0] - centers[1]) < coarse_cell
        ratio = (sys.energies[2] - sys.energies[1]) / sys.energies[1]
        assert abs(centers[1] - ratio) < coarse_cell

    def test_dense_window_more_hybridized(self, deep_system):
        omegas = {"near": np.linspace(1.4, 1.6, 9), "far": np.linspace(11, 13, 9)}
        counts = {}
        for key, om in omegas.items():
            grid = compute_grid(deep_system, om, POWERS, workers=4)
            counts[key] = hybridization_map(grid, _tracked(grid), 1).count_above(0.25)
        assert counts["near"] > counts["far"]
        assert counts["far"] == 0


class TestTransitionAmplitude:
    @pytest.mark.parametrize("a", [1e6, 2e7, 1e8])
    def test_two_level_extraction(self, a):
        energy = 1e9
        sys, zeta = two_level_system(energy, a)
        r = extract_transition_amplitude(sys, zeta, 1, 0, (0.8 * energy, 1.2 * energy), n_coarse=41)
        assert r.valid
        assert r.omega_gap == pytest.approx(a / 2, rel=1e-4)
        assert r.omega_theta == pytest.approx(a / 2, rel=1e-4)
        assert r.center == pytest.approx(energy, rel=1e-6)

    def test_edge_minimum_flagged(self):
        sys, zeta = two_level_system(1e9, 1e6)
        r = extract_transition_amplitude(sys, zeta, 1, 0, (1.1e9, 1.3e9), n_coarse=21)
        assert not r.valid
        assert np.isnan(r.omega_gap)


class TestResonanceCensus:
    def test_qubit_line(self, deep_params):
        spec_wq = driven_transmon(deep_params, 5).energies[1]
        hits = resonance_condition_scan(deep_params, (0.9 * spec_wq, 1.1 * spec_wq), initial=(0,))
        assert [(i, j) for _, i, j, _ in hits] == [(0, 1)]

    def test_device_finals(self, device_params, device_spectrum):
        wq = device_spectrum.transition(1, 0)
        hits = resonance_condition_scan(device_params, (12 * wq, 13 * wq))
        assert sorted((i, j) for _, i, j, _ in hits) == [(0, 14), (1, 15)]

    def test_offset_charge_moves_high_lines(self, device_params):
        ngs = [0.0, 0.25, 0.5]
        spread = {}
        for ng, i, j, w in resonance_condition_scan(device_params, (0.5e9, 12e9), n_g_list=ngs):
            spread.setdefault((i, j), []).append(w)
        low = np.ptp(spread[(0, 1)]) / np.mean(spread[(0, 1)])
        high = np.ptp(spread[(0, 14)]) / np.mean(spread[(0, 14)])
        assert low < 1e-6
        assert high > 0.05

    def test_collisions_suppressed_at_high_frequency(self, device_params, device_spectrum):
        wq = device_spectrum.transition(1, 0)
        dense = spectral_collisions(device_params, (0.5 * wq, 3 * wq))
        sparse = spectral_collisions(device_params, (11 * wq, 13 * wq))
        assert len(dense) > 50 * len(sparse)
        assert all(n == 1 for _, j, n in sparse if j <= 15)

    def test_collision_band_validated(self, device_params):
        with pytest.raises(ValueError):
            spectral_collisions(device_params, (2e9, 1e9))
