"""Deterministic symbolic identity suite behind ``levyharmonic selftest``."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterator

from . import gamma as G
from . import harmonic as H
from . import kailath_segall as KS
from .models import (
    TruncationError,
    brownian,
    compensated_gamma,
    compensated_poisson,
    compound_poisson_lognormal,
    model_sum,
    user_model,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def __str__(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.name}" + (f" ({self.detail})" if self.detail else "")


def named_models():
    return [
        brownian(),
        compensated_poisson(),
        compensated_gamma(),
        compound_poisson_lognormal(),
        model_sum(brownian(), compensated_poisson()),
    ]


def _gamma_oracles(n_max: int = 12) -> bool:
    return all(
        G.gamma_partition(n) == G.gamma_recurrence(n) == G.gamma_series(n) for n in range(n_max + 1)
    )


def _derivative_identity(n_max: int = 10) -> bool:
    return all(
        G.gamma_partial(n, j) == G.gamma_recurrence(n - j).scale(math.comb(n, j))
        for n in range(1, n_max + 1)
        for j in range(1, n + 1)
    )


def _shift_identities(n_max: int = 10) -> bool:
    return all(G.gamma_shift_check(n) and G.gamma_center_check(n) for n in range(n_max + 1))


def _convolution(n_max: int = 6) -> bool:
    return all(G.gamma_convolution_check(n) for n in range(n_max + 1))


def _four_routes(n_max: int = 10) -> bool:
    for model in named_models():
        for n in range(n_max + 1):
            closed = H.q_closed(model, n).poly
            if not (
                closed
                == H.q_recurrence(model, n).poly
                == H.q_gf_oracle(model, n).poly
                == H.q_from_expansion(H.q_expand_in_x(model, n))
            ):
                return False
    return True


def _hermite(n_max: int = 10) -> bool:
    b = brownian()
    return all(H.q_closed(b, n).poly == H.hermite_monic(n) for n in range(n_max + 1))


def _laguerre(n_max: int = 8) -> bool:
    g = compensated_gamma()
    return all(
        H.q_closed(g, n).poly == H.laguerre_qn(n, "series") == H.laguerre_qn(n, "explicit")
        for n in range(n_max + 1)
    )


def _charlier(n_max: int = 8) -> bool:
    p = compensated_poisson()
    lam = H.charlier_lambda(n_max)
    return all(lam[j][1] == 1 for j in range(1, n_max + 1)) and all(
        H.q_closed(p, n).poly == H.charlier_expansion(n) for n in range(1, n_max + 1)
    )


def _martingale_mean(n_max: int = 8) -> bool:
    return all(H.martingale_mean(m, n).is_zero() for m in named_models() for n in range(1, n_max + 1))


def _coefficient_identity(k_max: int = 8) -> bool:
    return all(H.gs_consistency_check(m, k) for m in named_models() for k in range(k_max + 1))


def _kailath_segall(n_max: int = 10, collapse_max: int = 8) -> bool:
    if not all(KS.ks_recurrence(n) == KS.ks_from_gamma(n) for n in range(n_max + 1)):
        return False
    for n in range(collapse_max + 1):
        # x_1 -> x, x_2 -> t, x_k -> 0 (k >= 3); ids coincide with x and t
        p = KS.ks_recurrence(n).subs({k: 0 for k in range(2, n)})
        if p.scale(math.factorial(n)) != H.hermite_monic(n):
            return False
    return True


def _truncation() -> bool:
    model = user_model(0, [1, 1, 1, 1, 1])  # m_2..m_6
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", H.MartingaleBoundWarning)
        ok = all(H.q_closed(model, n).poly == H.q_recurrence(model, n).poly for n in range(7))
    try:
        H.q_closed(model, 7)
    except TruncationError as exc:
        return ok and "[6/2]+1" in str(exc)
    return False


CHECKS: list[tuple[str, Callable[[], bool]]] = [
    ("Gamma_n: partition = recurrence = exp-series, n <= 12", _gamma_oracles),
    ("Gamma_n derivative identity, n <= 10", _derivative_identity),
    ("Gamma_n shift / centering identities, n <= 10", _shift_identities),
    ("Gamma_n convolution identity, n <= 6", _convolution),
    ("Q_n four-route agreement, named models, n <= 10", _four_routes),
    ("Brownian Q_n = monic Hermite, n <= 10", _hermite),
    ("Gamma-process Q_n = (-1)^n n! L_n^(t-n)(x+t), n <= 8", _laguerre),
    ("Poisson Q_n = sum lambda_k Cbar_k, n <= 8", _charlier),
    ("E[Q_n(X_t,t)] = 0 symbolically, n <= 8", _martingale_mean),
    ("coefficient identity in (s, t), k <= 8", _coefficient_identity),
    ("Kailath-Segall recurrence = Gamma form; Brownian collapse", _kailath_segall),
    ("truncated model: Q_6 built, Q_7 refused", _truncation),
]


def run_selftest() -> Iterator[CheckResult]:
    for name, fn in CHECKS:
        try:
            ok = fn()
            yield CheckResult(name, bool(ok))
        except Exception as exc:  # reported, not raised: selftest must finish
            yield CheckResult(name, False, f"{type(exc).__name__}: {exc}")

