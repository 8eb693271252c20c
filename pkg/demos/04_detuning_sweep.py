"""Detuning the system away from the memory.

With isotropic couplings the reduced dynamics stays phase covariant at any
detuning (the coherence sectors never mix), but the energy exchange is no
longer conserved pairwise, and the non-Markovianity witnesses respond
strongly to the mismatch. This sweep varies omega_S = omega_M + d around
resonance while memory and environment remain at omega = 1, and tabulates
the cumulative measures.

A full-resolution sweep is `kdqflux sweep --set kind=detuning_sweep`; this
demo uses a coarser grid to stay quick.
"""

import sys

import numpy as np

from kdqflux.cli import load_config, run_sweep

POINTS = int(sys.argv[1]) if len(sys.argv) > 1 else 21
N_MAX = int(sys.argv[2]) if len(sys.argv) > 2 else 300

spec = load_config(None, {
    "kind": "detuning_sweep", "grid_points": POINTS, "n_max": N_MAX,
    "grid_min": -0.2, "grid_max": 0.2,
    "output_dir": "demo_out/detuning_sweep",
})
assert run_sweep(spec, quiet=True) == 0

rows = np.loadtxt("demo_out/detuning_sweep/sweep.csv", delimiter=",",
                  skiprows=1, usecols=(0, 1, 2, 3))
print(f"detuning sweep: {POINTS} points, {N_MAX} collisions each\n")
print("  d        I_RHP      I_LFS      sum N_q")
for d, irhp, ilfs, snq in rows:
    bar = "#" * int(round(irhp))
    print(f"{d:+.3f}   {irhp:8.4f}   {ilfs:7.4f}   {snq:8.4f}  {bar}")

for name, col in (("I_RHP", 1), ("I_LFS", 2), ("sum N_q", 3)):
    peak = rows[np.argmax(rows[:, col]), 0]
    print(f"{name} peaks at d = {peak:+.3f}")
print("\nall three measures rise sharply on the red-detuned side and peak")
print("a few percent below resonance before falling off.")
