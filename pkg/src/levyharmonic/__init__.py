"""Exact time-space harmonic polynomials for Lévy processes.

Main entry points:

* :mod:`levyharmonic.gamma` -- cumulant-to-moment polynomials ``Gamma_n``;
* :mod:`levyharmonic.models` -- named Lévy models and their cumulants;
* :mod:`levyharmonic.harmonic` -- ``Q_n(x, t)`` and the classical families;
* :mod:`levyharmonic.kailath_segall` -- Kailath-Segall polynomials;
* :mod:`levyharmonic.sim` -- seeded simulation and Monte Carlo verdicts.
"""
from .gamma import gamma_partition, gamma_recurrence
from .harmonic import HarmonicPoly, q_closed, q_gf_oracle, q_recurrence
from .kailath_segall import ks_evaluate, ks_from_gamma, ks_recurrence
from .models import (
    LevyModel,
    brownian,
    compensated_gamma,
    compensated_poisson,
    compound_poisson_lognormal,
    model_sum,
    parse_model,
    user_model,
)
from .polycore import SparsePoly, TruncatedSeries, series_exp

__version__ = "0.1.0"

__all__ = [
    "HarmonicPoly",
    "LevyModel",
    "SparsePoly",
    "TruncatedSeries",
    "brownian",
    "compensated_gamma",
    "compensated_poisson",
    "compound_poisson_lognormal",
    "gamma_partition",
    "gamma_recurrence",
    "ks_evaluate",
    "ks_from_gamma",
    "ks_recurrence",
    "model_sum",
    "parse_model",
    "q_closed",
    "q_gf_oracle",
    "q_recurrence",
    "series_exp",
    "user_model",
]
