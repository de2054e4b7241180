"""Undriven transmon in the truncated charge basis.

The Hamiltonian is ``4 E_C (N - n_g)^2 - E_J cos(phi)``; in the charge basis
``N = -n_cut ... n_cut`` the cosine is a nearest-neighbour hopping with
amplitude ``-E_J / 2``.  Energies are in Hz throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import eigh

__all__ = [
    "TransmonParams",
    "Spectrum",
    "ZeroPointScales",
    "CutoffError",
    "diagonalize",
    "charge_matrix_element",
    "zero_point_scales",
    "matrix_element_series",
]

DEFAULT_N_CUT = 40

# boundary weight allowed on the two outermost charge states
_BOUNDARY_WEIGHT = 1e-6
# components below this fraction of the largest are ignored by the phase rule
_PHASE_FLOOR = 1e-8


class CutoffError(ValueError):
    """The charge-basis cutoff is too small for the requested levels."""


@dataclass(frozen=True)
class TransmonParams:
    """Transmon parameters.

    Parameters
    ----------
    e_c, e_j : float
        Charging and Josephson energies in Hz.
    n_g : float
        Offset charge; stored reduced to ``[0, 1)``.
    n_cut : int
        Charge-basis cutoff, the basis is ``-n_cut ... n_cut``.
    """

    e_c: float
    e_j: float
    n_g: float = 0.0
    n_cut: int = DEFAULT_N_CUT

    def __post_init__(self):
        if not self.e_c > 0:
            raise ValueError(f"e_c must be positive, got {self.e_c}")
        if not self.e_j >= 0:
            raise ValueError(f"e_j must be non-negative, got {self.e_j}")
        if int(self.n_cut) != self.n_cut or self.n_cut < 1:
            raise ValueError(f"n_cut must be an integer >= 1, got {self.n_cut}")
        object.__setattr__(self, "n_cut", int(self.n_cut))
        object.__setattr__(self, "n_g", float(self.n_g) % 1.0)

    @property
    def ej_over_ec(self) -> float:
        return self.e_j / self.e_c

    @property
    def charges(self) -> np.ndarray:
        return np.arange(-self.n_cut, self.n_cut + 1, dtype=float)

    def hamiltonian(self) -> np.ndarray:
        """Dense charge-basis Hamiltonian (Hz)."""
        dim = 2 * self.n_cut + 1
        h = np.diag(4.0 * self.e_c * (self.charges - self.n_g) ** 2)
        hop = -0.5 * self.e_j * np.ones(dim - 1)
        return h + np.diag(hop, 1) + np.diag(hop, -1)


@dataclass(frozen=True)
class ZeroPointScales:
    n_zpf: float
    phi_zpf: float


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Sorted eigenenergies and charge-basis eigenvectors.

    ``eigenvectors[:, k]`` is level ``k``; its first component above
    ``1e-8`` of its largest magnitude is real positive.
    """

    energies: np.ndarray
    eigenvectors: np.ndarray
    params: TransmonParams

    @property
    def levels(self) -> int:
        return len(self.energies)

    def transition(self, i: int, j: int) -> float:
        """``E_i - E_j`` in Hz."""
        return float(self.energies[i] - self.energies[j])

    @property
    def omega_q(self) -> float:
        """Qubit frequency ``E_1 - E_0``."""
        return self.transition(1, 0)

    @cached_property
    def charge_matrix(self) -> np.ndarray:
        """``<i|N - n_g|j>`` between all kept levels (real symmetric)."""
        v = self.eigenvectors
        n = self.params.charges - self.params.n_g
        m = v.T @ (n[:, None] * v)
        return 0.5 * (m + m.T)

    def truncated(self, levels: int) -> "Spectrum":
        if not 1 <= levels <= self.levels:
            raise ValueError(f"cannot truncate {self.levels} levels to {levels}")
        return Spectrum(self.energies[:levels], self.eigenvectors[:, :levels], self.params)


def _fix_phases(vecs: np.ndarray) -> np.ndarray:
    out = vecs.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        big = np.abs(col) > _PHASE_FLOOR * np.abs(col).max()
        first = np.argmax(big)
        if col[first] < 0:
            out[:, k] = -col
    return out


def diagonalize(params: TransmonParams, levels: int | None = None) -> Spectrum:
    """Diagonalize the undriven transmon.

    Parameters
    ----------
    params : TransmonParams
    levels : int, optional
        Number of lowest levels to keep. Defaults to ``n_cut``.

    Raises
    ------
    CutoffError
        If the highest kept level has more than 1e-6 weight on the two
        outermost charge states.
    """
    dim = 2 * params.n_cut + 1
    if levels is None:
        levels = min(params.n_cut, dim)
    if not 1 <= levels <= dim:
        raise ValueError(f"levels must lie in [1, {dim}], got {levels}")

    energies, vecs = eigh(params.hamiltonian(), subset_by_index=(0, levels - 1))

    top = vecs[:, -1]
    edge = top[0] ** 2 + top[-1] ** 2
    if edge > _BOUNDARY_WEIGHT:
        raise CutoffError(
            f"level {levels - 1} has weight {edge:.2e} on the outermost charge "
            f"states; increase n_cut (now {params.n_cut}) or request fewer levels"
        )
    return Spectrum(energies, _fix_phases(vecs), params)


def charge_matrix_element(spec: Spectrum, i: int, j: int) -> float:
    """``|<j|N|i>|`` for kept levels ``i`` and ``j``."""
    for k in (i, j):
        if not 0 <= k < spec.levels:
            raise IndexError(f"level {k} out of range for {spec.levels} levels")
    return abs(float(spec.charge_matrix[j, i]))


def zero_point_scales(params: TransmonParams) -> ZeroPointScales:
    """Charge and phase zero-point fluctuations of the harmonic approximation."""
    if params.e_j <= 0:
        raise ValueError("zero-point scales need e_j > 0")
    n_zpf = (params.e_j / (32.0 * params.e_c)) ** 0.25
    return ZeroPointScales(n_zpf=n_zpf, phi_zpf=1.0 / (2.0 * n_zpf))


def matrix_element_series(spec: Spectrum, i: int = 0, rel_floor: float = 1e-12):
    """Charge matrix elements from level ``i`` to every higher kept level.

    Returns ``(j, ratio, element)`` arrays where ``ratio = E_ji / E_10``.
    Elements below ``rel_floor`` times the largest one (selection-rule
    zeros, e.g. parity at ``n_g = 0``) are dropped.
    """
    js = np.arange(i + 1, spec.levels)
    elems = np.abs(spec.charge_matrix[js, i])
    keep = elems > rel_floor * elems.max()
    ratio = (spec.energies[js] - spec.energies[i]) / spec.omega_q
    return js[keep], ratio[keep], elems[keep]


def decades_between(ratio: np.ndarray, elems: np.ndarray, lo: float, hi: float) -> float:
    """Drop in ``log10`` of a matrix-element series between two frequency ratios.

    The series is interpolated linearly in ``log10`` versus the ratio.
    """
    logs = np.log10(elems)
    if not (ratio[0] <= lo and hi <= ratio[-1]):
        raise ValueError(f"[{lo}, {hi}] is outside the series range [{ratio[0]}, {ratio[-1]}]")
    return float(np.interp(lo, ratio, logs) - np.interp(hi, ratio, logs))


def harmonic_estimate(params: TransmonParams) -> float:
    """``sqrt(8 E_J E_C) - E_C``, the large ``E_J/E_C`` qubit frequency."""
    return math.sqrt(8.0 * params.e_j * params.e_c) - params.e_c
