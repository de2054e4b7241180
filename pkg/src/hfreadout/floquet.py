"""Floquet modes of a periodically driven few-level system.

A system is described by static level energies ``E`` and a drive operator
``C``; the Hamiltonian (in Hz) is

    H(t) = diag(E) + zeta * (C exp(-i w t) + C^dag exp(i w t)).

For the transmon ``C = N / 2`` in the undriven eigenbasis, so the drive term
is ``zeta N cos(w t)``.  The propagator over one period is integrated in the
interaction picture of ``diag(E)`` and diagonalized with a complex Schur
decomposition, which returns an orthonormal basis even when eigenphases are
degenerate.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import qr, schur

from .spectrum import TransmonParams, diagonalize

__all__ = [
    "DriveParams",
    "DrivenSystem",
    "FloquetSet",
    "TwoLevelResult",
    "PropagationError",
    "NonUnitaryError",
    "StarkValidityWarning",
    "driven_transmon",
    "two_level_system",
    "propagate",
    "one_period_propagator",
    "floquet_modes",
    "floquet_cell",
    "fold_quasienergy",
    "zeta_from_stark",
    "stark_from_zeta",
    "two_level_oracle",
]

MAX_DEFECT = 1e-8
DEGENERACY_GAP = 1e-10
# smallest relative tolerance DOP853 accepts without complaint
_RTOL_FLOOR = 2.3e-14


class PropagationError(RuntimeError):
    """The time integration failed or lost unitarity."""

    def __init__(self, message: str, defect: float):
        self.defect = defect
        super().__init__(f"{message} (worst column defect {defect:.3e})")


class NonUnitaryError(ValueError):
    """A matrix handed to :func:`floquet_modes` is not unitary enough."""


class StarkValidityWarning(RuntimeWarning):
    """The Stark-shift relation is used outside its derivation regime."""


@dataclass(frozen=True)
class DriveParams:
    """Monochromatic drive: frequency ``omega`` and amplitude ``zeta``, both Hz."""

    omega: float
    zeta: float

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if not self.zeta >= 0:
            raise ValueError(f"zeta must be non-negative, got {self.zeta}")

    @property
    def period(self) -> float:
        return 1.0 / self.omega


@dataclass(frozen=True, eq=False)
class DrivenSystem:
    """Static energies (Hz) and the drive operator ``C`` in the same basis."""

    energies: np.ndarray
    coupling: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=float)
        c = np.asarray(self.coupling)
        if c.shape != (len(e), len(e)):
            raise ValueError("coupling must be square and match the energies")
        object.__setattr__(self, "energies", e)
        object.__setattr__(self, "coupling", c)

    @property
    def dim(self) -> int:
        return len(self.energies)

    @property
    def time_symmetric(self) -> bool:
        """Real symmetric ``C``: the drive is ``2 zeta C cos(w t)``."""
        c = self.coupling
        return bool(np.isrealobj(c) or not np.any(c.imag)) and np.array_equal(c, c.T)


def driven_transmon(params: TransmonParams, levels: int = 20) -> DrivenSystem:
    """Transmon driven through its charge, ``zeta N cos(w t)``, on the lowest levels.

    Energies are measured from the ground state.
    """
    spec = diagonalize(params, levels)
    e = spec.energies - spec.energies[0]
    # the diagonal offset -n_g only adds a global phase that vanishes over a period
    return DrivenSystem(e, 0.5 * spec.charge_matrix)


def two_level_system(omega: float, a: float) -> tuple[DrivenSystem, float]:
    """Two-level model in the basis ``(nc, c)``: ``nc`` at ``omega``, ``c`` at zero.

    The drive ``(a/2)(s+ exp(-i w_d t) + h.c.)`` maps to ``C = s+`` and
    ``zeta = a / 2``, which is returned alongside the system.
    """
    sp = np.array([[0.0, 1.0], [0.0, 0.0]])
    return DrivenSystem(np.array([omega, 0.0]), sp), 0.5 * a


def _column_defect(u: np.ndarray) -> float:
    g = u.conj().T @ u
    return float(np.abs(g - np.eye(len(g))).max())


def _integrate(system: DrivenSystem, drive: DriveParams, tau0, tau1, rtol):
    """Interaction-picture propagator from ``tau0`` to ``tau1`` (times in periods)."""
    n = system.dim
    f = drive.omega
    e = system.energies / f
    de = e[:, None] - e[None, :]
    c = system.coupling.astype(complex) * (drive.zeta / f)
    cd = c.conj().T.copy()
    two_pi_i = 2j * math.pi

    def rhs(tau, y):
        u = y.reshape(n, n)
        ph = np.exp(-two_pi_i * tau)
        v = (c * ph + cd * ph.conjugate()) * np.exp(two_pi_i * de * tau)
        return (-two_pi_i * (v @ u)).ravel()

    y0 = np.eye(n, dtype=complex).ravel()
    sol = solve_ivp(rhs, (tau0, tau1), y0, method="DOP853", rtol=rtol, atol=rtol)
    if not sol.success:
        return None, sol.message
    u_i = sol.y[:, -1].reshape(n, n)
    return u_i, ""


def _to_lab(u_i, e, tau0, tau1):
    left = np.exp(-2j * math.pi * e * tau1)
    right = np.exp(2j * math.pi * e * tau0)
    return left[:, None] * u_i * right[None, :]


def propagate(
    system: DrivenSystem, drive: DriveParams, t_start: float, t_end: float, tol: float = 1e-10
) -> np.ndarray:
    """Propagator ``U(t_end, t_start)`` (times in seconds, either order)."""
    f = drive.omega
    tau0, tau1 = t_start * f, t_end * f
    e = system.energies / f
    rtol = max(tol / 100.0, _RTOL_FLOOR)
    defect = math.inf
    for _ in range(3):
        u_i, msg = _integrate(system, drive, tau0, tau1, rtol)
        if u_i is None:
            raise PropagationError(f"integration failed: {msg}", math.inf)
        defect = _column_defect(u_i)
        if defect <= tol:
            break
        if rtol <= _RTOL_FLOOR:
            break
        rtol = max(rtol / 10.0, _RTOL_FLOOR)
    if defect > 10.0 * tol:
        raise PropagationError("unitarity lost beyond 10 * tol", defect)
    return _to_lab(u_i, e, tau0, tau1)


def one_period_propagator(
    system: DrivenSystem, drive: DriveParams, tol: float = 1e-10, t0: float = 0.0
) -> np.ndarray:
    """``U(t0 + T, t0)`` for one drive period.

    Parameters
    ----------
    tol : float
        Target accuracy in ``[1e-12, 1e-6]``; the unitarity defect of the
        result is at most ``10 * tol``.
    t0 : float
        Start time in seconds.  Quasienergies do not depend on it.

    Raises
    ------
    PropagationError
        If the integrator fails or unitarity degrades beyond ``10 * tol``.
    """
    if not 1e-12 <= tol <= 1e-6:
        raise ValueError(f"tol must lie in [1e-12, 1e-6], got {tol}")
    if drive.zeta == 0:
        return np.diag(np.exp(-2j * math.pi * system.energies / drive.omega))
    if t0 == 0.0 and system.time_symmetric:
        # H(T - t) = H(t) and H real symmetric give U(T, T/2) = U(T/2, 0)^T
        half = propagate(system, drive, 0.0, 0.5 * drive.period, tol)
        return half.T @ half
    return propagate(system, drive, t0, t0 + drive.period, tol)


def fold_quasienergy(eps, omega: float):
    """Fold quasienergies (Hz) into the zone ``(-omega/2, omega/2]``."""
    half = 0.5 * omega
    return half - np.mod(half - np.asarray(eps, dtype=float), omega)


@dataclass(frozen=True, eq=False)
class FloquetSet:
    """Floquet modes at the start time (columns) and folded quasienergies in Hz."""

    modes: np.ndarray
    quasienergies: np.ndarray
    unitarity_defect: float
    omega: float

    def overlaps(self, states: np.ndarray) -> np.ndarray:
        """``|<state|mode>|^2`` with states as columns; shape ``(n_states, n_modes)``."""
        return np.abs(np.asarray(states).conj().T @ self.modes) ** 2


def _reorthogonalize(q: np.ndarray) -> np.ndarray:
    # basis-independent choice inside a degenerate subspace: project the bare
    # states carrying the most weight and orthonormalize them in that order
    m = q.conj().T
    _, _, piv = qr(m, pivoting=True, mode="economic")
    k = q.shape[1]
    cand = q @ m[:, piv[:k]]
    out, _ = np.linalg.qr(cand)
    return out


def _fix_phase(v: np.ndarray) -> np.ndarray:
    out = v.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        big = int(np.argmax(np.abs(col) > (1.0 - 1e-9) * np.abs(col).max()))
        out[:, k] = col * (abs(col[big]) / col[big])
    return out


def floquet_modes(u: np.ndarray, omega: float, max_defect: float = MAX_DEFECT) -> FloquetSet:
    """Eigen-decomposition of a one-period propagator.

    Quasienergies are ``-omega * arg(lambda) / (2 pi)`` folded into
    ``(-omega/2, omega/2]``.  Modes are sorted by quasienergy, ties broken by
    the index of their largest component, and each mode's largest component
    is made real positive.

    Raises
    ------
    NonUnitaryError
        If ``max |U^dag U - 1|`` exceeds ``max_defect``.
    """
    u = np.asarray(u, dtype=complex)
    defect = _column_defect(u)
    if defect > max_defect:
        raise NonUnitaryError(f"unitarity defect {defect:.3e} exceeds {max_defect:.1e}")
    t, z = schur(u, output="complex")
    lam = np.diag(t)
    phase = -np.angle(lam) / (2.0 * math.pi)

    # group nearly equal eigenphases (on the circle) and clean each group
    order = np.argsort(phase)
    groups, cur = [], [order[0]]
    for a, b in zip(order[:-1], order[1:]):
        if phase[b] - phase[a] < DEGENERACY_GAP:
            cur.append(b)
        else:
            groups.append(cur)
            cur = [b]
    if groups and (phase[order[0]] + 1.0 - phase[cur[-1]]) < DEGENERACY_GAP:
        groups[0] = cur + groups[0]
    else:
        groups.append(cur)
    for grp in groups:
        if len(grp) > 1:
            z[:, grp] = _reorthogonalize(z[:, grp])

    z = _fix_phase(z)
    eps = fold_quasienergy(phase * omega, omega)
    lead = np.argmax(np.abs(z), axis=0)
    # quantize so tiny numerical noise does not reorder degenerate modes
    key_eps = np.round(eps / omega / DEGENERACY_GAP)
    idx = np.lexsort((lead, key_eps))
    return FloquetSet(z[:, idx], eps[idx], defect, omega)


def floquet_cell(system: DrivenSystem, drive: DriveParams, tol: float = 1e-9) -> FloquetSet:
    """Propagator plus decomposition for one drive point."""
    u = one_period_propagator(system, drive, tol)
    return floquet_modes(u, drive.omega)


def _stark_checks(omega, omega_q, ej_over_ec, e_c):
    if omega == omega_q:
        raise ZeroDivisionError("the Stark relation has a pole at omega = omega_q")
    if ej_over_ec is not None and ej_over_ec < 20:
        warnings.warn(
            f"E_J/E_C = {ej_over_ec:.3g} < 20; Stark relation assumes a deep transmon",
            StarkValidityWarning,
            stacklevel=3,
        )
    if e_c is not None and abs(omega - omega_q) < e_c:
        warnings.warn(
            "drive within E_C of the qubit; Stark relation is not reliable",
            StarkValidityWarning,
            stacklevel=3,
        )


def zeta_from_stark(
    delta_omega: float,
    omega: float,
    omega_q: float,
    ej_over_ec: float | None = None,
    e_c: float | None = None,
) -> float:
    """Drive amplitude producing a qubit Stark shift ``delta_omega`` (all Hz).

    Inverts ``dw / w_q = zeta^2 w^2 / (8 (w^2 - w_q^2)^2)``.  Passing
    ``ej_over_ec`` and ``e_c`` enables the validity warnings.
    """
    _stark_checks(omega, omega_q, ej_over_ec, e_c)
    if delta_omega < 0:
        raise ValueError("delta_omega must be non-negative")
    return math.sqrt(8.0 * delta_omega / omega_q) * abs(omega**2 - omega_q**2) / omega


def stark_from_zeta(
    zeta: float,
    omega: float,
    omega_q: float,
    ej_over_ec: float | None = None,
    e_c: float | None = None,
) -> float:
    """Qubit Stark shift (Hz) induced by a drive of amplitude ``zeta``."""
    _stark_checks(omega, omega_q, ej_over_ec, e_c)
    return omega_q * zeta**2 * omega**2 / (8.0 * (omega**2 - omega_q**2) ** 2)


@dataclass(frozen=True)
class TwoLevelResult:
    """Analytic two-level solution.

    ``omega_half`` is ``sqrt((A/2)^2 + (D/2)^2)``; the two quasienergies are
    split by ``quasienergy_gap = 2 * omega_half``.
    """

    omega_half: float
    theta: float

    @property
    def quasienergy_gap(self) -> float:
        return 2.0 * self.omega_half


def two_level_oracle(a: float, delta: float) -> TwoLevelResult:
    """Quasienergy splitting and hybridization of the resonantly driven two-level model.

    ``Theta = x^2 / (2 (1 + x^2 + sqrt(1 + x^2)))`` with ``x = A / D``,
    evaluated in the equivalent form ``(1 - |D| / sqrt(A^2 + D^2)) / 2``
    so that ``D = 0`` needs no special casing.
    """
    r = math.hypot(a, delta)
    theta = 0.0 if r == 0 else 0.5 * (1.0 - abs(delta) / r)
    return TwoLevelResult(0.5 * r, theta)
