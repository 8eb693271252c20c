"""Three witnesses, one phenomenon.

Per collision the analysis evaluates three independent diagnostics of
non-Markovianity:

* N_q  -- non-positivity of the Kirkwood-Dirac energy-change distribution,
          built only from energy measurements on the system;
* g_n  -- trace-norm excess of the Choi matrix of the single-step map
          (complete-positivity violation, the RHP increment);
* dI   -- change of the mutual information between the system and an
          untouched entangled reference (the LFS increment).

This demo runs the resonant reference configuration and prints where each
witness fires. The windows agree to within a collision or two at the onset;
g_n persists slightly longer at each window tail.
"""

import sys

import numpy as np

from kdqflux import RunConfig, analyze

N_MAX = int(sys.argv[1]) if len(sys.argv) > 1 else 300
TOL = 1e-10


def windows(indices):
    if indices.size == 0:
        return []
    spans = [[int(indices[0]), int(indices[0])]]
    for i in indices[1:]:
        if i == spans[-1][1] + 1:
            spans[-1][1] = int(i)
        else:
            spans.append([int(i), int(i)])
    return spans


result = analyze(RunConfig(n_max=N_MAX))
steps = result.record_array("n")
series = {
    "N_q  (energy-change non-positivity)": result.record_array("n_q"),
    "g_n  (CP violation of step maps)   ": result.record_array("g_n"),
    "dI   (mutual-information increase) ": result.record_array("delta_i"),
}

print(f"resonant run, {N_MAX} collisions\n")
for label, values in series.items():
    spans = windows(steps[values > TOL])
    text = ", ".join(f"[{a}, {b}]" for a, b in spans)
    print(f"{label}: positive on {text}")

print("\ncumulative measures:")
print(f"  I_RHP  = {result.summary.i_rhp:.6f}")
print(f"  I_LFS  = {result.summary.i_lfs:.6f}")
print(f"  sum N_q = {result.summary.sum_nq:.6f}")

nq = series["N_q  (energy-change non-positivity)"]
min_eig = result.record_array("choi_min_eig")
fired = nq > TOL
print("\nwhenever N_q fired, the smallest Choi eigenvalue was negative:",
      bool(np.all(min_eig[fired] < -TOL)))
