"""
Iterated integrals from variations
==================================

P_n writes the n-th iterated integral of X through the power variations
X^(1), X^(2), ...  For a compensated Poisson process these are N_t - t and
N_t, and P_n becomes a Charlier polynomial.
"""

import math

import numpy as np

from levyharmonic.harmonic import hermite_monic
from levyharmonic.kailath_segall import ks_recurrence
from levyharmonic.models import brownian, compensated_poisson
from levyharmonic.sim import (
    SimConfig,
    compute_iterated_integrals,
    compute_variations,
    mc_orthogonality_test,
    simulate,
)

for n in range(1, 5):
    print(f"P_{n} =", ks_recurrence(n).to_plain())

# with x_2 = t and no jumps, n! P_n is the Hermite polynomial
p4 = ks_recurrence(4).subs({2: 0, 3: 0}).scale(math.factorial(4))
assert p4 == hermite_monic(4)

# variations of simulated Poisson paths
cfg = SimConfig(compensated_poisson(), grid=(0.5, 1.0), n_paths=5, seed=1)
paths = simulate(cfg)
var = compute_variations(paths, 3)
print("X_t      :", var.order(1)[:, -1])
print("[X, X]_t :", var.order(2)[:, -1])
P = compute_iterated_integrals(var, 3)
print("P^(2)    :", np.round(P[2, :, -1], 6))

# iterated integrals of different orders are uncorrelated
for model in (brownian(), compensated_poisson()):
    cfg = SimConfig(model, n_paths=50_000, seed=20080101)
    paths = simulate(cfg)
    for n, m in [(1, 2), (2, 3), (2, 2)]:
        print(mc_orthogonality_test(cfg, n, m, 1.0, paths))
