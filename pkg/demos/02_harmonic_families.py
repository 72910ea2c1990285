"""
Time-space harmonic polynomials
===============================

Q_n(x, t) for the named models, and the classical families they reduce to.
"""

from levyharmonic.harmonic import (
    charlier_lambda,
    charlier_polys,
    hermite_monic,
    laguerre_qn,
    martingale_mean,
    q_closed,
    q_gf_oracle,
    q_recurrence,
)
from levyharmonic.models import (
    brownian,
    compensated_gamma,
    compensated_poisson,
    compound_poisson_lognormal,
    model_sum,
)
from levyharmonic.polycore import xt_names

models = [
    brownian(),
    compensated_poisson(),
    compensated_gamma(),
    compound_poisson_lognormal(),
    model_sum(brownian(), compensated_poisson()),
]

for m in models:
    print(f"{m.name:>26}: Q_3 =", q_closed(m, 3).to_plain())

# Brownian motion gives the monic Hermite polynomials
print("H~_4 =", hermite_monic(4).to_plain(xt_names))
assert q_closed(brownian(), 4).poly == hermite_monic(4)

# the gamma process gives Laguerre polynomials
assert q_closed(compensated_gamma(), 5).poly == laguerre_qn(5)

# the Poisson process: a fixed integer combination of shifted Charlier polynomials
lam = charlier_lambda(4)
print("lambda^(4) =", lam[4][1:])
cbar = charlier_polys(4)
print("Cbar_2 =", cbar[2].to_plain(xt_names))

# different constructions, same polynomial
p = compensated_poisson()
assert q_recurrence(p, 6).poly == q_gf_oracle(p, 6).poly == q_closed(p, 6).poly

# E[Q_n(X_t, t)] vanishes identically in t
print("E[Q_5] for the lognormal model:", martingale_mean(compound_poisson_lognormal(), 5).to_plain())
