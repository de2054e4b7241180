"""Numerical toolkit for high-frequency dispersive readout of transmons.

Submodules
----------
spectrum    undriven transmon in the charge basis
dispersive  resonator pulls and dispersive shifts
purcell     lumped-circuit Purcell decay and island admittance
floquet     one-period propagators, Floquet modes, two-level model
atlas       drive-grid sweeps, Stark-state tracking, hybridization maps
qnd         QND fidelity formalism and repeated-measurement classifier

All frequencies and energies are ordinary frequencies in Hz (E/h).
"""

__version__ = "0.1.0"
CONFIG_SCHEMA_VERSION = "1"

from .spectrum import (  # noqa: F401
    TransmonParams,
    Spectrum,
    ZeroPointScales,
    CutoffError,
    diagonalize,
    charge_matrix_element,
    zero_point_scales,
)
