# %% [markdown]
# # Floquet modes of the driven transmon and hybridization maps
#
# A strong readout tone at frequency omega dresses the transmon.  The
# Floquet modes of H = H_transmon + zeta N cos(omega t) replace the bare
# eigenstates.  When a computational state becomes resonant with a highly
# excited one, the two hybridize.  Theta = 1 - |<c|psi>|^2 measures how far
# the Floquet mode psi closest to the Stark-shifted computational state c
# departs from it.
#
# Drive strength is expressed through the qubit AC Stark shift d_omega; the
# tracking needs fine power steps, so the grid has 16 of them; only every
# third column is printed.

# %%
import warnings

import numpy as np

from hfreadout.atlas import compute_grid, hybridization_map, track_states, transition_amplitude_scan
from hfreadout.floquet import driven_transmon
from hfreadout.spectrum import TransmonParams

system = driven_transmon(TransmonParams(36e6, 60 * 36e6, 0.25), 20)
powers = np.linspace(0.0, 0.15, 16)
shown = slice(None, None, 3)

maps = {}
for label, (lo, hi) in {"near": (1.4, 1.6), "far": (11.0, 13.0)}.items():
    grid = compute_grid(system, np.linspace(lo, hi, 9), powers)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        tracked = track_states(grid, (0, 1), windows=8)
    maps[label] = hybridization_map(grid, tracked, 1)

for label, hm in maps.items():
    print(f"--- omega/omega_q window '{label}', Theta for |1> (rows: omega, columns: d_omega/omega_q)")
    print("        " + " ".join(f"{p:7.3f}" for p in hm.power_norm[shown]))
    for w, row in zip(hm.omega_norm, hm.theta):
        print(f"{w:7.3f} " + " ".join("   lost" if np.isnan(t) else f"{t:7.3f}" for t in row[shown]))

# %% [markdown]
# Cells marked "lost" have no Floquet mode holding half of the tracked
# state.  Close to the qubit frequency isolated resonances light up and
# become denser as the power grows; near omega/omega_q = 12 the map stays
# clean.
#
# ## Strength of a single resonance
#
# Half the minimum quasienergy gap of an isolated anti-crossing gives the
# effective transition amplitude Omega.  At weak drive it approaches
# zeta |<8|N|1>| / 2; the ratio drifts upward at larger powers as the dressed
# matrix elements change.

# %%
scan = transition_amplitude_scan(system, 1, 8, [0.001, 0.01, 0.05])
for e in scan.entries:
    state = "flagged: " + "; ".join(e.flags) if e.flags else f"{e.relative_to_low_power:+.2%} from the weak-drive law"
    print(f"zeta/2pi = {e.zeta / 1e6:8.2f} MHz: {state}")
