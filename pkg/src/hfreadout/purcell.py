"""Purcell decay of a transmon read out through a far-detuned lumped resonator.

The Josephson junction is replaced by a linear inductor ``L_q``.  The island
(``C_q``) couples through ``C_C`` to a resonator (``L_res``, ``C_res``) that is
loaded by a matched line of impedance ``Z0`` either through a shared
inductance ``L_tr`` or a series capacitance ``C_tr``.

Circuit elements are SI (H, F, ohm).  Public frequencies and rates are in Hz;
angular quantities only appear internally.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "CircuitParams",
    "PurcellReport",
    "NearUnityCouplingError",
    "derived_frequencies",
    "resonator_linewidth",
    "island_impedance",
    "admittance_spectrum",
    "rwa_admittance",
    "purcell_rate",
    "purcell_from_values",
    "circuit_from_targets",
]

TWO_PI = 2.0 * math.pi
ETA_LIMIT = 0.9


class NearUnityCouplingError(ValueError):
    """Coupling efficiency too close to one for the far-detuned expansion."""


@dataclass(frozen=True)
class CircuitParams:
    """Lumped readout circuit; give exactly one of ``l_tr`` and ``c_tr``."""

    l_q: float
    c_q: float
    c_c: float
    l_res: float
    c_res: float
    l_tr: float | None = None
    c_tr: float | None = None
    z0: float = 50.0

    def __post_init__(self):
        if (self.l_tr is None) == (self.c_tr is None):
            raise ValueError("specify exactly one of l_tr (inductive) or c_tr (capacitive)")
        for name in ("l_q", "c_q", "l_res", "c_res", "z0"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.c_c >= 0:
            raise ValueError("c_c must be non-negative")
        tr = self.l_tr if self.l_tr is not None else self.c_tr
        if not tr >= 0:
            raise ValueError("line coupling element must be non-negative")

    @property
    def topology(self) -> str:
        return "inductive" if self.l_tr is not None else "capacitive"

    @property
    def c_sigma_sq(self) -> float:
        return self.c_res * self.c_q + self.c_res * self.c_c + self.c_q * self.c_c


@dataclass(frozen=True)
class PurcellReport:
    eta: float
    omega_r: float
    omega_q: float
    kappa: float
    kappa_q: float
    kappa_q_rwa: float
    topology: str

    @property
    def t1(self) -> float:
        """Purcell-limited lifetime ``1 / (2 pi kappa_q)`` in seconds."""
        return 1.0 / (TWO_PI * self.kappa_q)

    @property
    def t1_rwa(self) -> float:
        return 1.0 / (TWO_PI * self.kappa_q_rwa)


def _angular(c: CircuitParams) -> tuple[float, float]:
    wr = math.sqrt((c.c_q + c.c_c) / (c.l_res * c.c_sigma_sq))
    wq = math.sqrt(1.0 / (c.l_q * (c.c_q + c.c_c)))
    return wr, wq


def coupling_efficiency(c: CircuitParams) -> float:
    return c.c_c / math.sqrt((c.c_res + c.c_c) * (c.c_q + c.c_c))


def derived_frequencies(c: CircuitParams) -> tuple[float, float, float]:
    """Resonator and qubit frequencies (Hz) and the coupling efficiency ``eta``.

    Raises
    ------
    NearUnityCouplingError
        If ``eta >= 0.9``, where the far-detuned expansion breaks down.
    """
    eta = coupling_efficiency(c)
    if eta >= ETA_LIMIT:
        raise NearUnityCouplingError(f"eta = {eta:.4f} >= {ETA_LIMIT}")
    wr, wq = _angular(c)
    return wr / TWO_PI, wq / TWO_PI, eta


def resonator_linewidth(c: CircuitParams) -> float:
    """Energy decay rate of the resonator into the line, in Hz."""
    wr, _ = _angular(c)
    if c.topology == "inductive":
        kappa = c.l_tr**2 * wr**2 / (c.z0 * c.l_res)
    else:
        kappa = wr**2 * c.z0 * c.c_tr**2 * (c.c_q + c.c_c) / c.c_sigma_sq
    return kappa / TWO_PI


def _dissipative(c: CircuitParams, w: np.ndarray) -> np.ndarray:
    if c.topology == "inductive":
        return w**4 * c.c_c**2 * c.l_tr**2 / c.z0
    return w**6 * c.c_c**2 * c.c_tr**2 * c.l_res**2 * c.z0


def island_impedance(c: CircuitParams, omega, warn: bool = True):
    """Impedance seen from the transmon island at frequency ``omega`` (Hz).

    The expression holds near the qubit frequency; a warning is issued when
    ``omega`` is more than 50% away from it.
    """
    f = np.asarray(omega, dtype=float)
    if np.any(f <= 0):
        raise ValueError("omega must be positive")
    wr, wq = _angular(c)
    w = TWO_PI * f
    if warn and np.any(np.abs(w - wq) > 0.5 * wq):
        warnings.warn(
            "island impedance is only quantitative close to the qubit frequency",
            RuntimeWarning,
            stacklevel=2,
        )
    y = 1.0 / (1j * w * c.l_q) + 1j * w * (c.c_q + c.c_c) + _dissipative(c, w)
    z = 1.0 / y
    return complex(z) if np.ndim(omega) == 0 else z


def admittance_spectrum(c: CircuitParams, omegas) -> np.ndarray:
    """``Re Y`` of the island (siemens) on a grid of frequencies in Hz."""
    w = TWO_PI * np.asarray(omegas, dtype=float)
    if np.any(w <= 0):
        raise ValueError("omega must be positive")
    # the real part of 1/Z is exactly the dissipative term
    return _dissipative(c, w)


def rwa_admittance(c: CircuitParams, omegas) -> np.ndarray:
    """``Re Y`` implied by the standard Purcell formula at each frequency.

    Defined so that ``Re Y / (C_q + C_C)`` equals ``g^2 kappa / (w_r - w)^2``
    (angular units) with ``g = eta sqrt(w w_r) / 2``.
    """
    f = np.asarray(omegas, dtype=float)
    wr, _ = _angular(c)
    w = TWO_PI * f
    eta = coupling_efficiency(c)
    kappa = TWO_PI * resonator_linewidth(c)
    g2 = 0.25 * eta**2 * w * wr
    return (c.c_q + c.c_c) * g2 * kappa / (wr - w) ** 2


def purcell_from_values(
    omega_q: float,
    omega_r: float,
    eta: float,
    kappa: float,
    topology: str = "inductive",
    g: float | None = None,
) -> PurcellReport:
    """Purcell rates from derived quantities (all in Hz).

    ``kappa_q`` uses the lumped-circuit result, ``kappa_q_rwa`` the standard
    formula ``g^2 kappa / (omega_r - omega_q)^2``.  ``g`` defaults to
    ``eta sqrt(omega_q omega_r) / 2``.
    """
    if not 0 <= eta < ETA_LIMIT:
        raise NearUnityCouplingError(f"eta = {eta:.4f} outside [0, {ETA_LIMIT})")
    power = {"inductive": 4, "capacitive": 6}.get(topology)
    if power is None:
        raise ValueError(f"unknown topology {topology!r}")
    if g is None:
        g = 0.5 * eta * math.sqrt(omega_q * omega_r)
    kappa_q = eta**2 / (1.0 - eta**2) * (omega_q / omega_r) ** power * kappa
    kappa_q_rwa = g**2 * kappa / (omega_r - omega_q) ** 2
    return PurcellReport(eta, omega_r, omega_q, kappa, kappa_q, kappa_q_rwa, topology)


def kappa_q_from_coupling(
    omega_q: float, omega_r: float, eta: float, kappa: float, topology: str = "inductive"
) -> float:
    """Same rate written through ``g``: ``4 (w_q/w_r)^(p-1) (g/w_r)^2 kappa / (1 - eta^2)``."""
    p = {"inductive": 4, "capacitive": 6}[topology]
    g = 0.5 * eta * math.sqrt(omega_q * omega_r)
    return 4.0 * (omega_q / omega_r) ** (p - 1) * (g / omega_r) ** 2 * kappa / (1.0 - eta**2)


def purcell_rate(c: CircuitParams) -> PurcellReport:
    """Qubit linewidth inherited from the line, lumped model and standard formula."""
    f_r, f_q, eta = derived_frequencies(c)
    return purcell_from_values(f_q, f_r, eta, resonator_linewidth(c), c.topology)


def circuit_from_targets(
    omega_q: float,
    omega_r: float,
    eta: float,
    kappa: float,
    topology: str = "inductive",
    z0: float = 50.0,
    c_q: float = 100e-15,
    c_res: float | None = None,
) -> CircuitParams:
    """Build a circuit that reproduces target frequencies, ``eta`` and ``kappa``.

    The problem is under-determined; ``C_q`` (default 100 fF) and ``C_res``
    (default equal to ``C_q``) are fixed by convention and the remaining
    elements solved for.
    """
    if not 0 < eta < ETA_LIMIT:
        raise NearUnityCouplingError(f"eta must lie in (0, {ETA_LIMIT}), got {eta}")
    if c_res is None:
        c_res = c_q
    # eta^2 (C_res + C_C)(C_q + C_C) = C_C^2, a quadratic in C_C
    a = 1.0 - eta**2
    b = -(eta**2) * (c_res + c_q)
    cc = -(eta**2) * c_res * c_q
    c_c = (-b + math.sqrt(b * b - 4 * a * cc)) / (2 * a)
    wq, wr, k = TWO_PI * omega_q, TWO_PI * omega_r, TWO_PI * kappa
    c_sig = c_res * c_q + c_res * c_c + c_q * c_c
    l_q = 1.0 / (wq**2 * (c_q + c_c))
    l_res = (c_q + c_c) / (wr**2 * c_sig)
    if topology == "inductive":
        return CircuitParams(l_q, c_q, c_c, l_res, c_res, l_tr=math.sqrt(k * z0 * l_res) / wr, z0=z0)
    if topology == "capacitive":
        c_tr = math.sqrt(k * c_sig / (wr**2 * z0 * (c_q + c_c)))
        return CircuitParams(l_q, c_q, c_c, l_res, c_res, c_tr=c_tr, z0=z0)
    raise ValueError(f"unknown topology {topology!r}")
