"""Resonance atlases of the driven transmon.

The workflow is

1. :func:`compute_grid` evaluates Floquet modes on a rectangular grid of
   drive frequency and drive power;
2. :func:`track_states` follows the Stark-shifted image of chosen bare
   levels across the grid with windowed polynomial fits in ``(zeta, omega)``;
3. :func:`hybridization_map` measures how far the Floquet mode closest to a
   tracked computational state departs from it.

:func:`extract_transition_amplitude` isolates a single resonance ``i -> j``
at fixed drive amplitude and measures its strength two ways.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import partial
from typing import Sequence

import numpy as np
from scipy.optimize import curve_fit, minimize_scalar

from .floquet import (
    DriveParams,
    DrivenSystem,
    FloquetSet,
    NonUnitaryError,
    PropagationError,
    floquet_cell,
    zeta_from_stark,
)
from .parallel import ordered_map
from .spectrum import TransmonParams, diagonalize

__all__ = [
    "DriveGrid",
    "StarkTrackedState",
    "HybridizationMap",
    "TransitionAmplitude",
    "TransitionAmplitudeScan",
    "LabelCollision",
    "compute_grid",
    "track_states",
    "hybridization_map",
    "extract_transition_amplitude",
    "transition_amplitude_scan",
    "resonance_condition_scan",
    "spectral_collisions",
]

MAX_DEGREE = 4
LOST_OVERLAP = 0.5


# --------------------------------------------------------------------- grid


@dataclass(eq=False)
class DriveGrid:
    """Floquet data on an ``(omega, power)`` grid.

    Axes are normalized by the qubit frequency: ``omega_norm = omega / omega_q``
    and ``power_norm`` is ``delta_omega / omega_q`` (``kind="stark"``) or
    ``zeta / omega_q`` (``kind="zeta"``).  Array data is indexed
    ``[i_omega, i_power, ...]``; failed cells hold NaN and a reason.
    """

    system: DrivenSystem
    omega_q: float
    omega_norm: np.ndarray
    power_norm: np.ndarray
    kind: str
    zeta: np.ndarray
    modes: np.ndarray
    quasienergies: np.ndarray
    defects: np.ndarray
    failed: dict[tuple[int, int], str] = field(default_factory=dict)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.omega_norm), len(self.power_norm)

    @property
    def omegas(self) -> np.ndarray:
        return self.omega_norm * self.omega_q

    def ok(self, io: int, ip: int) -> bool:
        return (io, ip) not in self.failed

    def cell(self, io: int, ip: int) -> FloquetSet:
        return FloquetSet(
            self.modes[io, ip], self.quasienergies[io, ip], float(self.defects[io, ip]),
            float(self.omegas[io]),
        )


def _zeta_grid(omega_norm, power_norm, kind, omega_q):
    if kind == "zeta":
        return np.broadcast_to(power_norm[None, :] * omega_q, (len(omega_norm), len(power_norm))).copy()
    if kind == "stark":
        z = np.empty((len(omega_norm), len(power_norm)))
        for a, w in enumerate(omega_norm):
            for b, p in enumerate(power_norm):
                z[a, b] = zeta_from_stark(p * omega_q, w * omega_q, omega_q)
        return z
    raise ValueError(f"power kind must be 'zeta' or 'stark', got {kind!r}")


def _grid_task(system: DrivenSystem, tol: float, job):
    omega, zeta = job
    try:
        fs = floquet_cell(system, DriveParams(omega, zeta), tol)
    except (PropagationError, NonUnitaryError) as err:
        return None, f"{type(err).__name__}: {err}"
    return fs, ""


def compute_grid(
    system: DrivenSystem,
    omega_norm: Sequence[float],
    power_norm: Sequence[float],
    kind: str = "stark",
    tol: float = 1e-9,
    workers: int | None = None,
) -> DriveGrid:
    """Floquet modes for every cell of the grid.

    Cells are independent and may run in parallel; results land in
    preallocated arrays by cell index, so the grid does not depend on the
    worker count.
    """
    wn = np.asarray(omega_norm, dtype=float)
    pn = np.asarray(power_norm, dtype=float)
    for name, ax in (("omega", wn), ("power", pn)):
        if ax.ndim != 1 or len(ax) == 0 or np.any(np.diff(ax) <= 0):
            raise ValueError(f"{name} axis must be non-empty and strictly increasing")
    if wn[0] <= 0 or pn[0] < 0:
        raise ValueError("axes must be positive (power may start at zero)")
    e = system.energies
    omega_q = float(e[1] - e[0])
    zeta = _zeta_grid(wn, pn, kind, omega_q)

    d = system.dim
    modes = np.full((len(wn), len(pn), d, d), np.nan, dtype=complex)
    eps = np.full((len(wn), len(pn), d), np.nan)
    defects = np.full((len(wn), len(pn)), np.nan)
    jobs = [(wn[a] * omega_q, zeta[a, b]) for a in range(len(wn)) for b in range(len(pn))]
    results = ordered_map(partial(_grid_task, system, tol), jobs, workers)
    failed = {}
    for k, (fs, reason) in enumerate(results):
        a, b = divmod(k, len(pn))
        if fs is None:
            failed[(a, b)] = reason
            continue
        modes[a, b] = fs.modes
        eps[a, b] = fs.quasienergies
        defects[a, b] = fs.unitarity_defect
    return DriveGrid(system, omega_q, wn, pn, kind, zeta, modes, eps, defects, failed)


# ------------------------------------------------------------------ fitting


def _powers(x: np.ndarray, deg: int) -> np.ndarray:
    return x[:, None] ** np.arange(deg + 1)[None, :]


def _design(x, u, di, dj):
    px, pu = _powers(x, di), _powers(u, dj)
    return (px[:, :, None] * pu[:, None, :]).reshape(len(x), -1)


def _polyfit(x, u, y, di, dj):
    """Least-squares surface ``sum C_ij x^i u^j`` with column scaling."""
    a = _design(x, u, di, dj)
    scale = np.linalg.norm(a, axis=0)
    scale[scale == 0] = 1.0
    coef, *_ = np.linalg.lstsq(a / scale, y, rcond=None)
    coef = coef / scale[:, None]
    out = np.zeros((MAX_DEGREE + 1, MAX_DEGREE + 1, y.shape[1]), dtype=complex)
    out[: di + 1, : dj + 1] = coef.reshape(di + 1, dj + 1, -1)
    return out


def _evaluate(coef, x, u):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    u = np.atleast_1d(np.asarray(u, dtype=float))
    px, pu = _powers(x, MAX_DEGREE), _powers(u, MAX_DEGREE)
    return np.einsum("ni,nj,ijk->nk", px, pu, coef)


class LabelCollision(UserWarning):
    """Two tracked levels claimed the same Floquet mode in some cells."""


@dataclass(eq=False)
class StarkTrackedState:
    """Polynomial model of the Stark-shifted image of bare level ``level``.

    ``coefficients[i, j, k]`` multiplies ``x^i u^j`` for basis component
    ``k`` with ``x = zeta / zeta_scale`` and
    ``u = (omega - omega_center) / omega_half``.  After tracking,
    ``overlap`` holds for every cell the squared overlap of the chosen mode
    with the reference used in the final labelling pass (``nan`` for cells
    whose diagonalization failed).
    """

    level: int
    coefficients: np.ndarray
    window_boundaries: np.ndarray
    fit_residual: float
    zeta_scale: float
    omega_center: float
    omega_half: float
    norm_error: float = 0.0
    included: np.ndarray | None = None
    collisions: np.ndarray | None = None
    overlap: np.ndarray | None = None

    @classmethod
    def identity(cls, level: int, dim: int, omega_center: float = 1.0) -> "StarkTrackedState":
        coef = np.zeros((MAX_DEGREE + 1, MAX_DEGREE + 1, dim), dtype=complex)
        coef[0, 0, level] = 1.0
        return cls(level, coef, np.array([]), 0.0, 1.0, omega_center, 1.0)

    def _vars(self, zeta, omega):
        return np.asarray(zeta) / self.zeta_scale, (np.asarray(omega) - self.omega_center) / self.omega_half

    def raw(self, zeta, omega) -> np.ndarray:
        """Unnormalized reconstruction, shape ``(n, dim)``."""
        x, u = self._vars(zeta, omega)
        return _evaluate(self.coefficients, x, u)

    def state(self, zeta, omega) -> np.ndarray:
        """Normalized reconstruction; a single point returns a 1-d vector."""
        v = self.raw(zeta, omega)
        v = v / np.linalg.norm(v, axis=1, keepdims=True)
        return v[0] if np.ndim(zeta) == 0 else v


def _windows(n_power: int, windows: int) -> list[np.ndarray]:
    windows = max(1, min(windows, n_power))
    return [w for w in np.array_split(np.arange(n_power), windows) if len(w)]


def _cell_coords(grid: DriveGrid, cells):
    io = np.array([c[0] for c in cells], dtype=int)
    ip = np.array([c[1] for c in cells], dtype=int)
    return grid.zeta[io, ip], grid.omegas[io]


def track_states(
    grid: DriveGrid,
    levels: Sequence[int] = (0, 1),
    threshold: float = 0.8,
    poly_order: int = MAX_DEGREE,
    windows: int = 8,
) -> list[StarkTrackedState]:
    """Follow bare levels into the driven grid with windowed polynomial fits.

    The power axis is split into ``windows`` contiguous windows.  In each
    window every cell's Floquet modes are compared with a reference state:
    the bare level in the first window and the fit from earlier windows
    afterwards.  The best-overlapping mode, with its phase fixed so the
    overlap is real and positive, becomes a data point if its squared
    overlap with the reference is at least ``threshold``.  Cells where the
    mode has drifted further than that sit on a resonance and are left out.
    After each window the fit is redone on all points gathered so
    far, and a final pass over the whole grid relabels and refits.

    The polynomial degree in ``zeta`` is limited by the number of distinct
    power rows available, so early windows are not overfitted.
    """
    if not 0 < poly_order <= MAX_DEGREE:
        raise ValueError(f"poly_order must lie in [1, {MAX_DEGREE}]")
    n_w, n_p = grid.shape
    dim = grid.system.dim
    zmax = float(np.nanmax(grid.zeta)) if np.nanmax(grid.zeta) > 0 else 1.0
    wc = 0.5 * (grid.omegas[0] + grid.omegas[-1])
    wh = 0.5 * (grid.omegas[-1] - grid.omegas[0]) or grid.omega_q
    parts = _windows(n_p, windows)
    bounds = np.array([grid.power_norm[w[0]] for w in parts[1:]])

    states = {lv: StarkTrackedState.identity(lv, dim, wc) for lv in levels}
    for st in states.values():
        st.zeta_scale, st.omega_half, st.window_boundaries = zmax, wh, bounds

    def label(rows, current):
        """Pick modes for every level in the given power rows."""
        cells = [(a, b) for a in range(n_w) for b in rows if grid.ok(a, b)]
        if not cells:
            return {lv: ([], [], cells, np.zeros(0)) for lv in levels}, []
        z, w = _cell_coords(grid, cells)
        modes = grid.modes[[c[0] for c in cells], [c[1] for c in cells]]
        picks, keep, amps = {}, {}, {}
        for lv in levels:
            ref = current[lv].state(z, w)  # (n, dim)
            amp = np.einsum("nk,nkm->nm", ref.conj(), modes)
            m = np.argmax(np.abs(amp), axis=1)
            chosen = modes[np.arange(len(cells)), :, m]
            ph = amp[np.arange(len(cells)), m]
            chosen = chosen * (np.abs(ph) / np.where(ph == 0, 1, ph))[:, None]
            ok = np.abs(ph) ** 2 >= threshold
            picks[lv] = (m, chosen)
            keep[lv] = ok
            amps[lv] = ph
        coll = np.zeros(len(cells), dtype=bool)
        for a_i, la in enumerate(levels):
            for lb in levels[a_i + 1 :]:
                same = (picks[la][0] == picks[lb][0]) & keep[la] & keep[lb]
                coll |= same
        out = {}
        for lv in levels:
            ok = keep[lv] & ~coll
            weight = np.abs(amps[lv]) ** 2
            out[lv] = ([cells[k] for k in np.flatnonzero(ok)], picks[lv][1][ok], cells, weight)
        return out, [cells[k] for k in np.flatnonzero(coll)]

    def fit(lv, cells, targets):
        st = states[lv]
        if not cells:
            return
        z, w = _cell_coords(grid, cells)
        rows = {c[1] for c in cells}
        cols = {c[0] for c in cells}
        di = min(poly_order, len(rows) - 1)
        dj = min(poly_order, len(cols) - 1)
        st.coefficients = _polyfit(z / zmax, (w - wc) / wh, np.asarray(targets), di, dj)

    data = {lv: ([], []) for lv in levels}
    collided: list = []
    for rows in parts:
        frozen = {lv: _copy_state(states[lv]) for lv in levels}
        found, coll = label(rows, frozen)
        collided += coll
        for lv in levels:
            data[lv][0].extend(found[lv][0])
            data[lv][1].extend(found[lv][1])
            fit(lv, data[lv][0], data[lv][1])

    # final relabel and refit over the whole range
    frozen = {lv: _copy_state(states[lv]) for lv in levels}
    found, coll = label(range(n_p), frozen)
    if coll:
        warnings.warn(f"{len(coll)} cells with colliding labels were left out of the fits", LabelCollision)
    for lv in levels:
        cells, targets, seen, weight = found[lv]
        fit(lv, cells, targets)
        st = states[lv]
        st.overlap = np.full(grid.shape, np.nan)
        for c, wgt in zip(seen, weight):
            st.overlap[c] = wgt
        inc = np.zeros(grid.shape, dtype=bool)
        col = np.zeros(grid.shape, dtype=bool)
        for c in cells:
            inc[c] = True
        for c in coll:
            col[c] = True
        st.included, st.collisions = inc, col
        if cells:
            z, w = _cell_coords(grid, cells)
            raw = st.raw(z, w)
            tg = np.asarray(targets)
            st.fit_residual = float(np.sqrt(np.mean(np.sum(np.abs(raw - tg) ** 2, axis=1))))
            st.norm_error = float(np.abs(np.linalg.norm(raw, axis=1) - 1.0).max())
    return [states[lv] for lv in levels]


def _copy_state(st: StarkTrackedState) -> StarkTrackedState:
    return StarkTrackedState(
        st.level, st.coefficients.copy(), st.window_boundaries, st.fit_residual,
        st.zeta_scale, st.omega_center, st.omega_half,
    )


# ------------------------------------------------------------ hybridization


@dataclass(eq=False)
class HybridizationMap:
    """``theta[i_omega, i_power]`` for computational level ``level``.

    NaN marks failed grid cells and cells where no Floquet mode keeps at
    least half of the tracked state (``lost``).
    """

    level: int
    theta: np.ndarray
    dominant: np.ndarray
    lost: np.ndarray
    omega_norm: np.ndarray
    power_norm: np.ndarray

    def count_above(self, value: float, omega_lo=-np.inf, omega_hi=np.inf) -> int:
        sel = (self.omega_norm >= omega_lo) & (self.omega_norm <= omega_hi)
        t = self.theta[sel]
        return int(np.count_nonzero(np.nan_to_num(t, nan=-1.0) > value))

    def at(self, omega_norm: float, power_norm: float) -> float:
        a = int(np.argmin(np.abs(self.omega_norm - omega_norm)))
        b = int(np.argmin(np.abs(self.power_norm - power_norm)))
        return float(self.theta[a, b])


def hybridization_map(grid: DriveGrid, tracked: Sequence[StarkTrackedState], c: int) -> HybridizationMap:
    """``Theta = 1 - |<c(zeta, omega)|psi>|^2`` with ``psi`` the closest Floquet mode.

    On the undriven row the Stark-shifted state is the bare state itself, so
    ``Theta`` is exactly zero there.
    """
    by_level = {st.level: st for st in tracked}
    if c not in by_level:
        raise KeyError(f"level {c} is not among the tracked states")
    st = by_level[c]
    n_w, n_p = grid.shape
    theta = np.full(grid.shape, np.nan)
    dom = np.full(grid.shape, -1, dtype=int)
    lost = np.zeros(grid.shape, dtype=bool)
    bare = np.zeros(grid.system.dim)
    bare[c] = 1.0
    for a in range(n_w):
        for b in range(n_p):
            if not grid.ok(a, b):
                continue
            z = grid.zeta[a, b]
            ref = bare if z == 0 else st.state(z, grid.omegas[a])
            amp = ref.conj() @ grid.modes[a, b]
            w = np.abs(amp) ** 2
            m = int(np.argmax(w))
            if w[m] < LOST_OVERLAP:
                lost[a, b] = True
                continue
            theta[a, b] = min(max(1.0 - w[m], 0.0), 1.0)
            comp = np.abs(grid.modes[a, b][:, m]) ** 2
            comp[c] = -1.0
            if comp.max() > 0:
                dom[a, b] = int(np.argmax(comp))
    return HybridizationMap(c, theta, dom, lost, grid.omega_norm.copy(), grid.power_norm.copy())


# -------------------------------------------------- transition amplitudes


@dataclass(frozen=True)
class TransitionAmplitude:
    """One extraction at fixed drive amplitude.

    ``omega_gap`` is half the minimum quasienergy gap, ``omega_theta`` the
    value from fitting the hybridization profile; both in Hz and NaN when
    the entry is ill-defined (see ``flags``).
    """

    zeta: float
    center: float
    omega_gap: float
    omega_theta: float
    low_power: float
    flags: tuple[str, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.flags

    @property
    def relative_to_low_power(self) -> float:
        return self.omega_gap / self.low_power - 1.0


def _pair_modes(fs: FloquetSet, i: int, j: int):
    w = np.abs(fs.modes[i, :]) ** 2 + np.abs(fs.modes[j, :]) ** 2
    order = np.argsort(w)[::-1]
    return int(order[0]), int(order[1]), w[order]


def _gap(system, zeta, i, j, tol, omega):
    fs = floquet_cell(system, DriveParams(omega, zeta), tol)
    a, b, _ = _pair_modes(fs, i, j)
    d = (fs.quasienergies[a] - fs.quasienergies[b]) % omega
    return min(d, omega - d), fs


def _theta_pair(fs: FloquetSet, i: int, j: int) -> float:
    """Hybridization of ``i`` inside the two-mode subspace of the pair."""
    a, b, _ = _pair_modes(fs, i, j)
    wa, wb = abs(fs.modes[i, a]) ** 2, abs(fs.modes[i, b]) ** 2
    return min(wa, wb) / (wa + wb)


def _theta_profile(slope):
    def model(w, center, omega):
        d = slope * (w - center)
        return 0.5 * (1.0 - np.abs(d) / np.sqrt(d * d + 4.0 * omega * omega))

    return model


def _detuning_slope(ws, gaps, center, omega_gap) -> float:
    """``|dD/d omega|`` from coarse gaps far enough from the crossing.

    Away from the anti-crossing the gap is ``|D|`` up to a small
    ``4 Omega^2`` correction; the AC Stark shifts make the slope differ
    slightly from one.
    """
    dist = ws - center
    est = []
    for side in (dist < 0, dist > 0):
        far = np.flatnonzero(side & (np.abs(dist) > 10.0 * omega_gap))
        if len(far) == 0:
            continue
        near = far[np.argsort(np.abs(dist[far]))[:3]]
        d = np.sqrt(np.maximum(gaps[near] ** 2 - 4.0 * omega_gap**2, 0.0))
        est.extend(d / np.abs(dist[near]))
    return float(np.median(est)) if est else 1.0


def extract_transition_amplitude(
    system: DrivenSystem,
    zeta: float,
    i: int,
    j: int,
    window: tuple[float, float],
    n_coarse: int = 121,
    tol: float = 1e-10,
) -> TransitionAmplitude:
    """Strength of the single-photon resonance ``i -> j`` at drive amplitude ``zeta``.

    The drive frequency is scanned over ``window`` (Hz).  The two Floquet
    modes with most weight on ``{i, j}`` anti-cross; half their minimum
    quasienergy gap is ``Omega``.  Independently, the hybridization of ``i``
    inside that two-mode subspace is fitted to the two-level profile, with
    the detuning slope taken from the gaps far from the crossing.  The
    entry is flagged (and its values set to NaN) when the weight of a third
    mode on ``{i, j}`` varies across the crossing, the minimum sits on the window edge, or the two
    estimates differ by more than 5%.
    """
    lo, hi = window
    ws = np.linspace(lo, hi, n_coarse)
    gaps = np.array([_gap(system, zeta, i, j, tol, w)[0] for w in ws])
    k = int(np.argmin(gaps))
    low = zeta * abs(system.coupling[j, i])
    flags = []
    if k in (0, n_coarse - 1):
        flags.append("minimum at window edge")
    res = minimize_scalar(
        lambda w: _gap(system, zeta, i, j, tol, w)[0],
        bounds=(ws[max(k - 1, 0)], ws[min(k + 1, n_coarse - 1)]),
        method="bounded",
        options={"xatol": 1e-12 * hi},
    )
    center = float(res.x)
    gap, fs = _gap(system, zeta, i, j, tol, center)
    omega_gap = 0.5 * gap
    slope = _detuning_slope(ws, gaps, center, omega_gap)
    span = 8.0 * max(omega_gap, 1e-9 * center) / slope
    wf = center + span * np.linspace(-1.0, 1.0, 41)
    th, third = [], []
    for w in wf:
        cell = floquet_cell(system, DriveParams(w, zeta), tol)
        th.append(_theta_pair(cell, i, j))
        weights = _pair_modes(cell, i, j)[2]
        third.append(weights[2] if len(weights) > 2 else 0.0)
    th = np.array(th)
    # dressing leaves a slowly varying background weight on other modes; a
    # mode that takes part in the crossing changes its weight across it
    swing = float(np.ptp(third))
    if swing > 0.05:
        flags.append(f"multiple crossing (third mode weight varies by {swing:.3f})")
    try:
        popt, _ = curve_fit(
            _theta_profile(slope), wf, th, p0=(center, omega_gap), xtol=1e-12, ftol=1e-12, maxfev=4000
        )
        omega_theta = abs(float(popt[1]))
    except RuntimeError:
        omega_theta = math.nan
        flags.append("hybridization fit failed")
    if not math.isnan(omega_theta) and abs(omega_theta / omega_gap - 1.0) > 0.05:
        flags.append(f"estimates disagree ({omega_gap:.4e} vs {omega_theta:.4e})")
    if flags:
        return TransitionAmplitude(zeta, center, math.nan, math.nan, low, tuple(flags))
    return TransitionAmplitude(zeta, center, omega_gap, omega_theta, low)


@dataclass(frozen=True)
class TransitionAmplitudeScan:
    initial: int
    final: int
    entries: tuple[TransitionAmplitude, ...]

    @property
    def zetas(self) -> np.ndarray:
        return np.array([e.zeta for e in self.entries])

    @property
    def omega(self) -> np.ndarray:
        return np.array([e.omega_gap for e in self.entries])

    @property
    def low_power(self) -> np.ndarray:
        return np.array([e.low_power for e in self.entries])


def transition_amplitude_scan(
    system: DrivenSystem,
    i: int,
    j: int,
    stark: Sequence[float],
    window_below: float = 0.15,
    window_above: float = 0.02,
    n_coarse: int = 121,
    tol: float = 1e-10,
    workers: int | None = None,
) -> TransitionAmplitudeScan:
    """Extract ``Omega_{i->j}`` for a list of Stark shifts (in units of ``omega_q``).

    The amplitude at each power follows from the Stark relation evaluated at
    the bare resonance ``E_j - E_i``; the frequency window extends
    ``window_below`` / ``window_above`` (fractions of that frequency) below
    and above it, since the Stark shift pulls the resonance down.
    """
    e = system.energies
    wq = e[1] - e[0]
    w0 = e[j] - e[i]
    window = (w0 * (1.0 - window_below), w0 * (1.0 + window_above))
    jobs = [zeta_from_stark(s * wq, w0, wq) for s in stark]
    task = partial(_amp_task, system, i, j, window, n_coarse, tol)
    return TransitionAmplitudeScan(i, j, tuple(ordered_map(task, jobs, workers, chunksize=1)))


def _amp_task(system, i, j, window, n_coarse, tol, zeta):
    return extract_transition_amplitude(system, zeta, i, j, window, n_coarse, tol)


# -------------------------------------------------------- resonance census


def resonance_condition_scan(
    params: TransmonParams,
    band: tuple[float, float],
    initial: Sequence[int] = (0, 1),
    n_g_list: Sequence[float] | None = None,
    levels: int = 30,
) -> list[tuple[float, int, int, float]]:
    """Single-photon resonance frequencies ``E_j - E_i`` inside ``band`` (Hz).

    Returns ``(n_g, i, j, omega)`` tuples sorted by ``n_g`` then frequency.
    ``n_g_list`` defaults to the offset charge of ``params``.
    """
    from dataclasses import replace

    lo, hi = band
    out = []
    for ng in n_g_list if n_g_list is not None else (params.n_g,):
        p = replace(params, n_g=ng)
        spec = diagonalize(p, levels)
        hits = []
        for i in initial:
            for j in range(i + 1, spec.levels):
                w = spec.transition(j, i)
                if lo <= w <= hi:
                    hits.append((p.n_g, i, j, w))
        out += sorted(hits, key=lambda h: h[3])
    return out


def spectral_collisions(
    params: TransmonParams,
    band: tuple[float, float],
    initial: Sequence[int] = (0,),
    n_g_list: Sequence[float] | None = None,
    levels: int = 30,
) -> list[tuple[int, int, int]]:
    """Accidental collisions between transmon lines and resonator photon lines.

    A transmon line ``E_j - E_i`` sweeps an interval as the offset charge
    runs over ``n_g_list`` (default: 21 points on ``[0, 0.5]``).  It
    collides with the ``n``-photon line of a resonator whose frequency lies
    in ``band`` (Hz) whenever ``n * band`` overlaps that interval.  Returns
    the colliding ``(i, j, n)`` triples.
    """
    from dataclasses import replace

    lo, hi = band
    if not 0 < lo < hi:
        raise ValueError("band must satisfy 0 < lo < hi")
    ngs = np.linspace(0.0, 0.5, 21) if n_g_list is None else np.asarray(n_g_list, dtype=float)
    e = np.array([diagonalize(replace(params, n_g=float(g)), levels).energies for g in ngs])
    out = []
    for i in initial:
        d = e[:, i + 1 :] - e[:, i : i + 1]
        for k, (a, b) in enumerate(zip(d.min(axis=0), d.max(axis=0))):
            for n in range(max(1, math.ceil(a / hi)), math.floor(b / lo) + 1):
                out.append((i, i + 1 + k, n))
    return out
