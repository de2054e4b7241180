# %% [markdown]
# # QND fidelity from repeated measurements
#
# Each record is a leakage check, 18 back-to-back qubit measurements and a
# second leakage check.  An isolated disagreeing outcome is an assignment
# error; a lasting switch is a transition.  The classifier decodes each
# sequence with the most likely hidden path and estimates per-measurement
# rates from the interior positions.

# %%
from hfreadout.qnd import (
    classify_records,
    compose_two_measurements,
    qnd_decomposition,
    readout_fidelity,
    repeatability,
    synthesize_records,
    table_from_rates,
)

rates = (3e-3, 4e-4, 2e-4)  # assignment, bit flip, leakage
records = synthesize_records(rates, 200_000, seed=2024)
tally = classify_records(records)
for name, est, true in zip(("assign", "bit flip", "leakage"), (tally.assign, tally.bitflip, tally.leakage), rates):
    lo, hi = est.wilson()
    print(f"{name:9s}: {est.rate:.2e}  (95% interval {lo:.2e} .. {hi:.2e}; injected {true:.1e})")
print(f"Q estimate {tally.q_estimate:.5f}; discarded {tally.n_discarded}; leaked {tally.n_leaked}")

# %% [markdown]
# ## Why readout fidelity can hide leakage
#
# Suppose each measurement leaks either computational state with
# probability 0.1 into a level that always reads out as "1".  The first
# outcome is still right, so the readout fidelity F stays at one.  The QND
# fidelity Q drops to 0.9, and the repeatability R notices only the leaks
# that start from |0>.

# %%
table = table_from_rates(0.0, 0.0, 0.1)
d = qnd_decomposition(table)
print(f"F = {readout_fidelity(table):.3f}, Q = {d.q:.3f}, R = {repeatability(compose_two_measurements(table)):.3f}")
print(d)
