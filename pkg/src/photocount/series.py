"""Truncated alternating series with optional Euler transformation."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence

SERIES_TOL = 1e-10


@dataclass(frozen=True)
class SeriesResult:
    value: float
    truncation_order: int
    last_term_magnitude: float
    accelerated: bool
    converged: bool

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "truncation_order": self.truncation_order,
            "last_term_magnitude": self.last_term_magnitude,
            "accelerated": self.accelerated,
            "converged": self.converged,
        }


def _exact(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def alternating_sum(b: Sequence, accel: str = "none", tol: float = SERIES_TOL) -> SeriesResult:
    """Sum ``sum_i (-1)^i b_i`` over the supplied terms ``b_0..b_T``.

    With ``accel="euler"`` the Euler transform
    ``sum_n (-1)^n Δ^n b_0 / 2^(n+1)`` is used instead.  Terms are converted
    to exact rationals before differencing, so the transform itself adds no
    cancellation error.  The result is marked converged when the last
    included term is below ``tol`` in magnitude.
    """
    if not b:
        raise ValueError("need at least one term")
    terms = [_exact(x) for x in b]
    T = len(terms) - 1
    if accel == "none":
        total = sum((-1) ** i * t for i, t in enumerate(terms))
        last = abs(terms[-1])
    elif accel == "euler":
        total = Fraction(0)
        last = Fraction(0)
        for n in range(T + 1):
            delta = sum((-1) ** (n - j) * comb(n, j) * terms[j] for j in range(n + 1))
            term = (-1) ** n * delta / 2 ** (n + 1)
            total += term
            last = abs(term)
    else:
        raise ValueError(f"unknown acceleration {accel!r}")
    last = float(last)
    return SeriesResult(float(total), T, last, accel == "euler", last < tol)
