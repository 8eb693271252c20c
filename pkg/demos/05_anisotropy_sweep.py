"""Anisotropic system-memory coupling.

Replacing the isotropic Heisenberg exchange between system and memory with
the anisotropic form (1-gamma)/2 XX + (1+gamma)/2 YY + ZZ breaks excitation
number conservation whenever gamma differs from zero. The reduced single-step
maps then couple the two coherence sectors: the extra entry d becomes
nonzero, and a fourth complete-positivity condition |d|^2 <= b(1-a) joins
the three phase covariant ones. The memory-environment interaction stays
isotropic (energy preserving) throughout.

The witnesses respond only weakly to gamma; the interesting observable here
is |d| itself, which grows linearly out of gamma = 0.
"""

import sys

import numpy as np

from kdqflux import RunConfig, analyze
from kdqflux.model import ANISOTROPIC, CouplingParams

N_MAX = int(sys.argv[1]) if len(sys.argv) > 1 else 300
GAMMAS = np.linspace(-1.0, 1.0, 9)

print(f"anisotropy sweep, {N_MAX} collisions per point\n")
print(" gamma    I_RHP      I_LFS     sum N_q    max |d|")
for gamma in GAMMAS:
    config = RunConfig(
        couplings=CouplingParams(sm_interaction_kind=ANISOTROPIC,
                                 gamma=float(gamma)),
        n_max=N_MAX)
    s = analyze(config).summary
    print(f"{gamma:+.2f}   {s.i_rhp:8.4f}   {s.i_lfs:8.4f}   {s.sum_nq:8.4f}"
          f"   {s.max_abs_d:.3e}")

print("\nat gamma = 0 the coherence sectors decouple (|d| at round-off) and")
print("the cumulative measures sit at a shallow stationary point; the")
print("dependence on gamma stays within a narrow numerical range.")
