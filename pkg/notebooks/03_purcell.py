# %% [markdown]
# # Purcell decay through a lumped readout circuit
#
# The qubit sees the transmission line through the readout resonator.  Its
# decay rate is Re Y(omega_q)/C_total, where Y is the admittance looking out
# of the transmon island.  Far below the resonator, the coupling capacitor
# and the resonator-line coupling element both become poor conductors, so
# the rate falls as a high power of omega_q/omega_r.

# %%
import numpy as np

from hfreadout.purcell import admittance_spectrum, circuit_from_targets, purcell_rate, rwa_admittance

wq, wr, eta, kappa = 0.758e9, 9.227e9, 0.38, 1.8e6
for topology in ("inductive", "capacitive"):
    rep = purcell_rate(circuit_from_targets(wq, wr, eta, kappa, topology))
    print(f"{topology:10s}: T1 = {rep.t1 * 1e3:8.3f} ms   (rotating-wave estimate {rep.t1_rwa * 1e6:.1f} us)")

# %% [markdown]
# Relative to the resonator linewidth, the qubit decay rate follows
# (omega_q/omega_r)^4 for an inductively coupled resonator and ^6 for a
# capacitively coupled one.

# %%
ratios = np.geomspace(1 / 20, 1 / 5, 8)
for topology in ("inductive", "capacitive"):
    rel = [purcell_rate(circuit_from_targets(x * wr, wr, eta, kappa, topology)) for x in ratios]
    slope = np.polyfit(np.log(ratios), np.log([r.kappa_q / r.kappa for r in rel]), 1)[0]
    print(f"{topology}: log-log slope {slope:.4f}")

# %% [markdown]
# The full admittance and the rotating-wave form agree near the resonator
# but drift apart by orders of magnitude at the qubit frequency.

# %%
circ = circuit_from_targets(wq, wr, eta, kappa, "inductive")
for w in (0.5e9, wq, 2e9, 5e9, 8.5e9):
    print(f"{w / 1e9:5.2f} GHz: Re Y = {admittance_spectrum(circ, np.array([w]))[0]:.3e} S,"
          f" rotating-wave {rwa_admittance(circ, np.array([w]))[0]:.3e} S")
