"""Resonator frequency pulls from a transmon coupled through its charge.

Three routes are provided: the full second-order sum over transmon levels,
the closed form valid when the resonator sits far above the qubit, and the
conventional rotating-wave result.  An exact diagonalization of the coupled
transmon-oscillator Hamiltonian serves as a reference.

All frequencies are ordinary frequencies in Hz.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy.linalg import eigh

from .spectrum import Spectrum, TransmonParams, diagonalize, zero_point_scales

__all__ = [
    "ReadoutCoupling",
    "ShiftReport",
    "DivergenceError",
    "PoleProximityError",
    "default_m_max",
    "chi_n_full",
    "dispersive_shift",
    "chi_high_freq",
    "chi_rwa",
    "chi0_high_freq",
    "enhancement_factor",
    "coupling_from_eta",
    "exact_pulls",
    "dressed_frequencies",
    "RatioScan",
    "resonance_ratio_scan",
]

POLE_GUARD = 1e-6


class DivergenceError(ArithmeticError):
    """A term of the perturbative sum is resonant with the resonator."""

    def __init__(self, n: int, m: int, detuning: float):
        self.n, self.m, self.detuning = n, m, detuning
        super().__init__(
            f"resonant pair (n={n}, m={m}): |E_nm| is {detuning:.3e} Hz from the "
            "resonator frequency"
        )


class PoleProximityError(ArithmeticError):
    """A closed-form expression is evaluated too close to one of its poles."""


@dataclass(frozen=True)
class ReadoutCoupling:
    """Charge coupling ``g`` to a resonator at ``omega_r_bare`` (both in Hz)."""

    g: float
    omega_r_bare: float

    def __post_init__(self):
        if not self.g >= 0:
            raise ValueError(f"g must be non-negative, got {self.g}")
        if not self.omega_r_bare > 0:
            raise ValueError(f"omega_r_bare must be positive, got {self.omega_r_bare}")

    @property
    def strong(self) -> bool:
        """True when ``g / omega_r_bare > 0.1`` and second order is suspect."""
        return self.g / self.omega_r_bare > 0.1


@dataclass(frozen=True)
class ShiftReport:
    chi_n: tuple[float, ...]
    chi: float
    method: str
    flags: tuple[str, ...] = field(default=())


def default_m_max(spec: Spectrum) -> int:
    """Three times the number of levels inside the cosine well, capped by ``spec``."""
    p = spec.params
    inside = int(np.count_nonzero(spec.energies - spec.energies[0] < 2.0 * p.e_j))
    return max(2, min(3 * max(inside, 1), spec.levels))


def _prefactor(spec: Spectrum, cpl: ReadoutCoupling) -> float:
    return cpl.g**2 / zero_point_scales(spec.params).n_zpf ** 2


def chi_n_full(
    spec: Spectrum, cpl: ReadoutCoupling, n: int, m_max: int | None = None
) -> float:
    """Pull of the resonator when the transmon sits in level ``n``.

    Second-order sum over the intermediate levels ``m < m_max``::

        chi_n = g^2 / N_zpf^2 * sum_m |N_nm|^2 * 2 E_nm / (E_nm^2 - w_r^2)

    Raises
    ------
    DivergenceError
        If some ``|E_nm|`` lies within ``1e-6 * omega_r_bare`` of the resonator.
    """
    if m_max is None:
        m_max = default_m_max(spec)
    if not 0 <= n < m_max <= spec.levels:
        raise ValueError(f"need 0 <= n < m_max <= {spec.levels}, got n={n}, m_max={m_max}")
    if cpl.g == 0:
        return 0.0

    wr = cpl.omega_r_bare
    e = spec.energies[:m_max]
    e_nm = e[n] - e
    gap = np.abs(np.abs(e_nm) - wr)
    gap[n] = np.inf
    worst = int(np.argmin(gap))
    if gap[worst] < POLE_GUARD * wr:
        raise DivergenceError(n, worst, float(gap[worst]))

    elems = spec.charge_matrix[n, :m_max] ** 2
    terms = elems * 2.0 * e_nm / (e_nm**2 - wr**2)
    terms[n] = 0.0
    return float(_prefactor(spec, cpl) * terms.sum())


def dispersive_shift(
    spec: Spectrum,
    cpl: ReadoutCoupling,
    method: str = "full_sum",
    n_levels: int = 2,
    m_max: int | None = None,
) -> ShiftReport:
    """Bundle the pulls and ``chi = chi_1 - chi_0`` for one of the three methods.

    Only the full sum resolves individual pulls; the two closed forms report
    ``chi`` alone and leave ``chi_n`` empty.
    """
    flags = ("strong_coupling",) if cpl.strong else ()
    if method == "full_sum":
        pulls = tuple(chi_n_full(spec, cpl, k, m_max) for k in range(max(n_levels, 2)))
        return ShiftReport(pulls, pulls[1] - pulls[0], method, flags)
    if method == "high_freq":
        return ShiftReport((), chi_high_freq(spec, cpl), method, flags)
    if method == "rwa":
        return ShiftReport((), chi_rwa(spec, cpl), method, flags)
    raise ValueError(f"unknown method {method!r}; expected full_sum, high_freq or rwa")


def chi_high_freq(spec: Spectrum, cpl: ReadoutCoupling) -> float:
    """Closed-form ``chi`` using the perturbative transmon matrix elements.

    ``chi = -8 E_C g^2 w_r^2 / ((w_r^2 - E_10^2)(w_r^2 - E_21^2))``, which
    tends to ``-8 E_C g^2 / w_r^2`` for a resonator far above the qubit.
    """
    if spec.levels < 3:
        raise ValueError("chi_high_freq needs at least three levels")
    wr = cpl.omega_r_bare
    e10, e21 = spec.transition(1, 0), spec.transition(2, 1)
    for name, e in (("E_10", e10), ("E_21", e21)):
        if abs(wr - e) < 0.01 * e:
            raise PoleProximityError(f"omega_r_bare is within 1% of {name} = {e:.6e} Hz")
    ec = spec.params.e_c
    return -8.0 * ec * cpl.g**2 * wr**2 / ((wr**2 - e10**2) * (wr**2 - e21**2))


def chi_rwa(spec: Spectrum, cpl: ReadoutCoupling, delta: float | None = None) -> float:
    """Rotating-wave dispersive shift ``-2 E_C g^2 / (D (D - E_C))``.

    ``delta`` defaults to ``omega_q - omega_r_bare``.
    """
    ec = spec.params.e_c
    d = spec.omega_q - cpl.omega_r_bare if delta is None else float(delta)
    guard = POLE_GUARD * cpl.omega_r_bare
    if abs(d) < guard or abs(d - ec) < guard:
        raise PoleProximityError(f"detuning {d:.6e} Hz is at a pole of the RWA formula")
    return -2.0 * ec * cpl.g**2 / (d * (d - ec))


def chi0_high_freq(spec: Spectrum, cpl: ReadoutCoupling) -> float:
    """Ground-state pull ``2 w_q g^2 / w_r^2`` for a resonator far above the qubit."""
    wq = spec.omega_q
    if cpl.omega_r_bare < 5.0 * wq:
        warnings.warn(
            "chi0_high_freq assumes omega_r_bare >> omega_q; "
            f"here omega_r_bare / omega_q = {cpl.omega_r_bare / wq:.3g}",
            RuntimeWarning,
            stacklevel=2,
        )
    return 2.0 * wq * (cpl.g / cpl.omega_r_bare) ** 2


def enhancement_factor(spec: Spectrum, cpl: ReadoutCoupling) -> dict[str, float]:
    """Ratio of the high-frequency shift to the rotating-wave shift.

    ``literal`` uses the rotating-wave formula at the actual detuning
    ``omega_q - omega_r_bare``.  ``matched`` evaluates it at
    ``delta = -omega_r_bare``, i.e. the comparison of ``-8 E_C g^2 / w_r^2``
    with ``-2 E_C g^2 / w_r^2`` that tends to 4 when ``omega_q << omega_r_bare``.
    """
    hf = chi_high_freq(spec, cpl)
    return {
        "literal": hf / chi_rwa(spec, cpl),
        "matched": hf / chi_rwa(spec, cpl, delta=-cpl.omega_r_bare),
    }


def coupling_from_eta(eta: float, omega_q: float, omega_r_bare: float) -> float:
    """Coupling strength ``g = eta * sqrt(omega_q * omega_r_bare) / 2``."""
    if not 0.0 < eta < 1.0:
        raise ValueError(f"eta must lie in (0, 1), got {eta}")
    if omega_q <= 0 or omega_r_bare <= 0:
        raise ValueError("frequencies must be positive")
    return 0.5 * eta * math.sqrt(omega_q * omega_r_bare)


def exact_pulls(
    spec: Spectrum,
    cpl: ReadoutCoupling,
    levels: Sequence[int] = (0, 1),
    n_transmon: int | None = None,
    n_photons: int = 8,
) -> np.ndarray:
    """Pulls from exact diagonalization of the coupled transmon and oscillator.

    ``H = diag(E) + w_r a^dag a + (g / N_zpf) N (a + a^dag)`` on ``n_transmon``
    transmon levels and ``n_photons + 1`` Fock states.  Dressed states are
    labelled by maximal overlap with the bare product states and
    ``chi_n = E(n, 1) - E(n, 0) - w_r``.
    """
    n_t = spec.levels if n_transmon is None else n_transmon
    if n_photons < 2:
        raise ValueError("need at least two photons in the oscillator basis")
    e = spec.energies[:n_t] - spec.energies[0]
    nmat = spec.charge_matrix[:n_t, :n_t]
    nf = n_photons + 1
    a = np.diag(np.sqrt(np.arange(1, nf)), 1)
    h = (
        np.kron(np.diag(e), np.eye(nf))
        + np.kron(np.eye(n_t), cpl.omega_r_bare * np.diag(np.arange(nf, dtype=float)))
        + (cpl.g / zero_point_scales(spec.params).n_zpf) * np.kron(nmat, a + a.T)
    )
    vals, vecs = eigh(h)
    out = []
    for n in levels:
        pair = []
        for k in (0, 1):
            col = int(np.argmax(np.abs(vecs[n * nf + k, :])))
            pair.append(vals[col])
        out.append(pair[1] - pair[0] - cpl.omega_r_bare)
    return np.array(out)


def dressed_frequencies(
    spec: Spectrum, cpl: ReadoutCoupling, levels: Sequence[int] = (0, 1), m_max=None
) -> np.ndarray:
    """Resonator frequencies ``omega_r_bare + chi_n`` for the given transmon levels."""
    return np.array([cpl.omega_r_bare + chi_n_full(spec, cpl, n, m_max) for n in levels])


@dataclass
class RatioScan:
    """Result of :func:`resonance_ratio_scan`, one row per (n_g, omega_r_bare).

    ``ratio`` is NaN where the perturbative sum diverged.  ``flags`` holds
    ``"diverged(n,m)"`` for a point that sits on a pole and
    ``"pole_crossed(n,m)"`` when a pole lies between a point and its
    predecessor on the same n_g.  Poles too weak to matter outside the pole
    guard (``g^2 |N_nm|^2 / (N_zpf^2 |chi|)`` below ``1e-6 omega_r_bare``)
    are recorded as ``"weak_pole(n,m)"`` and not counted by
    :meth:`flag_count` unless ``include_weak`` is set.
    """

    omega_r_bare: np.ndarray
    n_g: np.ndarray
    ratio: np.ndarray
    chi: np.ndarray
    chi_rwa: np.ndarray
    flags: list[tuple[str, ...]]

    def flag_count(
        self,
        n_g: float | None = None,
        lo: float = -np.inf,
        hi: float = np.inf,
        include_weak: bool = False,
    ) -> int:
        sel = (self.omega_r_bare >= lo) & (self.omega_r_bare <= hi)
        if n_g is not None:
            sel &= np.isclose(self.n_g, n_g)
        return sum(
            1
            for k in np.flatnonzero(sel)
            for f in self.flags[k]
            if include_weak or not f.startswith("weak_pole")
        )


def resonance_ratio_scan(
    params: TransmonParams,
    eta: float,
    omega_range: Sequence[float],
    n_g_list: Sequence[float] = (0.25, 0.0),
    m_max: int | None = None,
) -> RatioScan:
    """Full-sum ``chi`` normalized by the rotating-wave value across resonator frequencies.

    For each offset charge the transmon is diagonalized once; at every
    ``omega_r_bare`` the coupling follows from ``eta``.
    """
    omegas = np.asarray(omega_range, dtype=float)
    rows_w, rows_ng, ratio, chi, chi_r, flags = [], [], [], [], [], []
    for ng in n_g_list:
        p = replace(params, n_g=ng)
        spec = diagonalize(p)
        mm = default_m_max(spec) if m_max is None else m_max
        e = spec.energies[:mm]
        strength = 1.0 / zero_point_scales(spec.params).n_zpf ** 2
        prev = None
        for wr in omegas:
            g = coupling_from_eta(eta, spec.omega_q, wr)
            cpl = ReadoutCoupling(g, wr)
            point_flags = []
            # sign of |E_nm| - w_r for n in {0, 1}; a change between points is a pole crossing
            sign = np.sign(np.abs(e[None, :] - e[:2, None]) - wr)
            cr = chi_rwa(spec, cpl)
            if prev is not None:
                for n, m in zip(*np.nonzero(sign != prev)):
                    if n == m:
                        continue
                    # frequency range over which the resonant term outweighs chi
                    width = strength * spec.charge_matrix[n, m] ** 2 * g**2 / abs(cr)
                    kind = "pole_crossed" if width > POLE_GUARD * wr else "weak_pole"
                    point_flags.append(f"{kind}({n},{m})")
            prev = sign
            try:
                c = chi_n_full(spec, cpl, 1, mm) - chi_n_full(spec, cpl, 0, mm)
            except DivergenceError as err:
                point_flags.append(f"diverged({err.n},{err.m})")
                c = math.nan
            rows_w.append(wr)
            rows_ng.append(p.n_g)
            chi.append(c)
            chi_r.append(cr)
            ratio.append(c / cr)
            flags.append(tuple(point_flags))
    return RatioScan(
        np.array(rows_w), np.array(rows_ng), np.array(ratio), np.array(chi), np.array(chi_r), flags
    )
