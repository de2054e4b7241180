import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hfreadout.spectrum import (
    CutoffError,
    TransmonParams,
    charge_matrix_element,
    decades_between,
    diagonalize,
    harmonic_estimate,
    matrix_element_series,
    zero_point_scales,
)

ratios = st.floats(min_value=5.0, max_value=100.0)
offsets = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False)


def test_free_rotor_levels():
    # the outermost charge states would trip the cutoff guard, keep n = -4..4
    spec = diagonalize(TransmonParams(1e8, 0.0, 0.0, n_cut=5), 9)
    expected = np.sort([4 * 1e8 * n**2 for n in range(-4, 5)])
    np.testing.assert_allclose(spec.energies, expected, rtol=1e-12, atol=1e-3)


def test_device_qubit_frequency(device_spectrum, device_params):
    assert device_spectrum.omega_q == pytest.approx(0.758e9, rel=0.01)
    assert device_spectrum.omega_q == pytest.approx(harmonic_estimate(device_params), rel=0.02)


def test_first_element_perturbative(deep_params):
    spec = diagonalize(deep_params, 10)
    nz = zero_point_scales(deep_params).n_zpf
    approx = nz * (1 - deep_params.e_c / (2 * spec.omega_q))
    assert charge_matrix_element(spec, 0, 1) == pytest.approx(approx, rel=0.01)


def test_parity_zero_at_symmetric_offset():
    spec = diagonalize(TransmonParams(36e6, 60 * 36e6, 0.0), 12)
    assert np.max(np.abs(np.diag(spec.charge_matrix))) < 1e-10
    # states alternate in parity, so even-distance elements vanish too
    assert abs(spec.charge_matrix[0, 2]) < 1e-10


def test_zero_point_scales():
    z = zero_point_scales(TransmonParams(1e8, 32e8))
    assert z.n_zpf == pytest.approx(1.0, abs=1e-14)
    dev = zero_point_scales(TransmonParams(36e6, 2.2e9))
    assert dev.n_zpf == pytest.approx((2200 / (32 * 36)) ** 0.25, rel=1e-14)
    assert dev.n_zpf == pytest.approx(1.1756, abs=1e-4)


@given(st.floats(1e6, 1e9), st.floats(1e6, 1e11))
def test_zpf_product_is_half(ec, ej):
    z = zero_point_scales(TransmonParams(ec, ej))
    assert z.n_zpf * z.phi_zpf == pytest.approx(0.5, rel=1e-14)


def test_matrix_elements_suppressed(device_spectrum):
    j, ratio, elems = matrix_element_series(device_spectrum, 0)
    odd = j % 2 == 1
    assert decades_between(ratio[odd], elems[odd], 2.0, 12.0) >= 6.0
    window = ratio[odd] <= 13
    assert np.all(np.diff(np.log10(elems[odd][window])) < 0)


def test_series_range_checked(device_spectrum):
    j, ratio, elems = matrix_element_series(device_spectrum.truncated(6), 0)
    with pytest.raises(ValueError):
        decades_between(ratio, elems, 2.0, 12.0)


@settings(max_examples=25, deadline=None)
@given(ratios, offsets)
def test_offset_periodicity_and_reflection(r, ng):
    a = diagonalize(TransmonParams(1e8, r * 1e8, ng), 8).energies
    b = diagonalize(TransmonParams(1e8, r * 1e8, ng + 1.0), 8).energies
    c = diagonalize(TransmonParams(1e8, r * 1e8, 1.0 - ng), 8).energies
    np.testing.assert_allclose(a, b, rtol=1e-10, atol=1e-10 * abs(a).max())
    np.testing.assert_allclose(a, c, rtol=1e-10, atol=1e-10 * abs(a).max())


def test_offset_is_reduced():
    assert TransmonParams(1e8, 1e9, 1.3).n_g == pytest.approx(0.3)
    assert TransmonParams(1e8, 1e9, -0.25).n_g == pytest.approx(0.75)


@settings(max_examples=10, deadline=None)
@given(st.floats(20.0, 100.0), st.floats(0.0, 1.0))
def test_cutoff_convergence(r, ng):
    n_cut = 20
    keep = 2 * n_cut // 3
    a = diagonalize(TransmonParams(1e8, r * 1e8, ng, n_cut), keep).energies
    b = diagonalize(TransmonParams(1e8, r * 1e8, ng, 2 * n_cut), keep).energies
    scale = np.abs(b).max()
    assert np.max(np.abs(a - b)) < 1e-10 * scale


@settings(max_examples=15, deadline=None)
@given(ratios, st.floats(0.0, 1.0))
def test_sum_rule(r, ng):
    p = TransmonParams(1e8, r * 1e8, ng)
    full = diagonalize(p)  # all charge states kept
    n2 = full.eigenvectors[:, 0].conj() @ np.diag((p.charges - p.n_g) ** 2) @ full.eigenvectors[:, 0]
    total = np.sum(np.abs(full.charge_matrix[:, 0]) ** 2)
    # N is measured from n_g, so the diagonal term carries <0|N|0>^2
    assert total == pytest.approx(float(n2.real), rel=1e-9)


def test_harmonic_limit_of_elements():
    # E_C -> 0 at fixed sqrt(8 E_J E_C)
    w = 5e9
    prev = None
    for ec in (50e6, 10e6, 2e6):
        ej = w**2 / (8 * ec)
        p = TransmonParams(ec, ej, 0.25, n_cut=80)
        spec = diagonalize(p, 5)
        nz = zero_point_scales(p).n_zpf
        dev = max(
            abs(spec.charge_matrix[i, i + 1] ** 2 / ((i + 1) * nz**2) - 1) for i in range(3)
        )
        if prev is not None:
            assert dev < prev
        prev = dev
    assert prev < 5e-3


def test_cutoff_too_small_raises():
    with pytest.raises(CutoffError):
        diagonalize(TransmonParams(1e7, 1e10, 0.0, n_cut=3), 5)


def test_invalid_params():
    with pytest.raises(ValueError):
        TransmonParams(-1.0, 1e9)
    with pytest.raises(ValueError):
        TransmonParams(1e8, 1e9, n_cut=0)


def test_phase_convention_reproducible(device_params):
    a = diagonalize(device_params, 10).eigenvectors
    b = diagonalize(device_params, 10).eigenvectors
    assert np.array_equal(a, b)
    # first significant charge amplitude is positive
    for k in range(a.shape[1]):
        col = a[:, k]
        first = np.argmax(np.abs(col) > 1e-8 * np.abs(col).max())
        assert col[first] > 0
