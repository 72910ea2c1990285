"""
Moments from cumulants
======================

Gamma_n turns the first n cumulants into the n-th moment.
"""

import math

from levyharmonic.gamma import gamma_at, gamma_partition, gamma_recurrence, gamma_series
from levyharmonic.polycore import SparsePoly

# the first few, with x_k standing for the k-th cumulant
for n in range(1, 6):
    print(f"Gamma_{n} =", gamma_recurrence(n).to_plain())

# three independent constructions agree term by term
assert all(gamma_partition(n) == gamma_recurrence(n) == gamma_series(n) for n in range(13))

# Exp(1) has cumulants (k-1)!, so its moments are n!
n = 7
kappas = [SparsePoly.const(math.factorial(k - 1)) for k in range(1, n + 1)]
print(f"E[E^{n}] for E ~ Exp(1):", gamma_at(n, kappas).to_plain(), "=", math.factorial(n))

# Poisson(1) has all cumulants 1, which gives the Bell numbers
print("Bell numbers:", [gamma_at(k, [SparsePoly.const(1)] * k).to_plain() for k in range(1, 9)])

# LaTeX for a report
print(gamma_recurrence(4).to_latex())
