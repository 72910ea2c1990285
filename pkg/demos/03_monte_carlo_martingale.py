"""
Checking the martingale property by simulation
==============================================

Simulate each model on the grid (0.5, 1.0) and compare the sample means of
Q_n(X_1, 1) and of the increment Q_n(X_1, 1) - Q_n(X_0.5, 0.5) with zero.
"""

from levyharmonic.models import (
    brownian,
    compensated_gamma,
    compensated_poisson,
    compound_poisson_lognormal,
)
from levyharmonic.sim import SimConfig, mc_martingale_test, simulate

# each gate is a 3-SE test, so an occasional miss is expected; Q_1..Q_n
# share one sample and tend to miss together
N_PATHS = 100_000
SEED = 20080101

for model, top in [
    (brownian(), 4),
    (compensated_poisson(), 4),
    (compensated_gamma(), 4),
    (compound_poisson_lognormal(), 2),  # heavy tails: keep the degree low
]:
    cfg = SimConfig(model, grid=(0.5, 1.0), n_paths=N_PATHS, seed=SEED)
    paths = simulate(cfg)
    for n in range(1, top + 1):
        level, increment = mc_martingale_test(cfg, n, 0.5, 1.0, paths)
        print(level)
        print(increment)

# the lognormal model: the standard error grows fast with n
cfg = SimConfig(compound_poisson_lognormal(), grid=(0.5, 1.0), n_paths=N_PATHS, seed=SEED)
paths = simulate(cfg)
for n in (2, 3, 4):
    v, _ = mc_martingale_test(cfg, n, 0.5, 1.0, paths)
    print(f"n={n}: SE = {v.std_error:.3g}")
