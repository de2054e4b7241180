# %% [markdown]
# # Transmon spectrum and charge matrix elements
#
# A transmon with E_C/h = 36 MHz and E_J/h = 2.2 GHz sits deep in the
# transmon regime (E_J/E_C ~ 61).  Its low levels are nearly harmonic and
# insensitive to the offset charge; levels above the Josephson well behave
# like charge states and move strongly with n_g.

# %%
import numpy as np

from hfreadout.spectrum import TransmonParams, diagonalize, matrix_element_series, zero_point_scales

device = TransmonParams(e_c=36e6, e_j=2.2e9, n_g=0.25)
spec = diagonalize(device, 30)
wq = spec.omega_q
print(f"omega_q/2pi = {wq / 1e9:.4f} GHz, anharmonicity = {(spec.transition(2, 1) - wq) / 1e6:.1f} MHz")
print(f"zero-point charge n_zpf = {zero_point_scales(device).n_zpf:.4f}")

# %% [markdown]
# Offset-charge dispersion grows quickly with level index.  The table lists
# the peak-to-peak excursion of each transition frequency from |0> as n_g
# runs over half a period.

# %%
ngs = np.linspace(0.0, 0.5, 11)
energies = np.array([diagonalize(TransmonParams(36e6, 2.2e9, g), 20).energies for g in ngs])
e0j = energies - energies[:, :1]
for j in (1, 2, 5, 10, 14, 18):
    print(f"j = {j:2d}: <E_j0> = {e0j[:, j].mean() / wq:6.2f} omega_q, spread = {np.ptp(e0j[:, j]) / 1e6:9.3f} MHz")

# %% [markdown]
# ## Suppression of high-lying matrix elements
#
# A drive at frequency omega couples |0> to |j> through <j|N|0>.  For final
# states with E_j0 near 12 omega_q the element is many orders of magnitude
# smaller than for the first few transitions.  Odd j are the parity-allowed
# series; even-j elements are only nonzero through the weak n_g dependence.

# %%
j, ratio, elems = matrix_element_series(spec, 0)
for jj, r, m in zip(j, ratio, elems):
    if jj % 2 == 1 and r < 16:
        print(f"j = {jj:2d}  E_j0/omega_q = {r:6.2f}  |<j|N|0>| = {m:.3e}")
