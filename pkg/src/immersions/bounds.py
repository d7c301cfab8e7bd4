"""Closed-form bounds used by the two engines."""

from __future__ import annotations

import math

FAITHFUL_P = 1.0 / (10.0 * math.e * 4.0**20)


def badness_probability_bound(p: float) -> float:
    """``2p * sum_{i>=1} ((10ep)^(i/10) + (10ep)^(i/20))`` in closed form.

    With ``q = (10ep)^(1/20)`` both series are geometric, giving
    ``2p * (q^2 / (1 - q^2) + q / (1 - q))``.
    """
    if p <= 0:
        raise ValueError(f"p must be positive, got {p}")
    r = 10.0 * math.e * p
    if r >= 1.0:
        raise ValueError(f"series diverges: 10ep = {r:.6g} >= 1")
    q = r ** (1.0 / 20.0)
    return 2.0 * p * (q * q / (1.0 - q * q) + q / (1.0 - q))


def badness_probability_partial_sum(p: float, terms: int) -> float:
    """Direct partial sum of the badness series, for cross-checking."""
    r = 10.0 * math.e * p
    return 2.0 * p * math.fsum(r ** (i / 10.0) + r ** (i / 20.0) for i in range(1, terms + 1))


def chernoff_bound(beta: float, p: float, n: float) -> float:
    """Upper-tail bound ``P[X >= beta p n] < (e^(beta-1) beta^(-beta))^(p n)``
    for a binomial ``X``, evaluated in log space."""
    if beta <= 1:
        raise ValueError(f"beta must exceed 1, got {beta}")
    if not 0 < p < 1:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    return math.exp(p * n * (beta - 1.0 - beta * math.log(beta)))


def c_threshold_holds(C: int) -> bool:
    """``sqrt(2 (C-13)(C-2)) >= C + 13``, decided in exact integer arithmetic."""
    if C < 13:
        return False
    return 2 * (C - 13) * (C - 2) >= (C + 13) ** 2


def least_valid_C(lo: int = 14, hi: int = 100) -> int | None:
    return next((C for C in range(lo, hi + 1) if c_threshold_holds(C)), None)
