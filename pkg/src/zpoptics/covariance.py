"""Gaussian moment machinery for the vacuum measure.

The statistical ground truth: every mode amplitude is a zero-mean complex
Gaussian with ``<a a*> = sigma_sq`` and ``<a a> = 0``, independent across
modes.  Down-conversion correlates plain content of one beam with amplified
(conjugate) content of its partner; those pairings carry a temporal kernel
evaluated at the emission-time difference.  Fourth and higher moments follow
from pairwise moments by Wick factorization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .fields import FieldExpr


def gaussian_kernel(tau: float, correlation_time_s: float) -> float:
    """exp(-tau^2 / (2 tau_c^2)): unit at zero lag, vanishing beyond tau_c."""
    x = tau / correlation_time_s
    return math.exp(-0.5 * x * x)


@dataclass(frozen=True)
class CovarianceModel:
    """Second-moment description of the vacuum plus the pair coupling.

    ``sigma_sq`` is the vacuum norm ``<a a*>`` (1/2: each real quadrature has
    variance 1/4).  ``coupling`` and ``pump`` set the strength g*V of the
    amplified admixture; ``kernel`` is the signal-idler temporal correlation
    nu(tau) with nu(0) = 1, defaulting to a Gaussian of width
    ``correlation_time_s``.
    """

    sigma_sq: float = 0.5
    coupling: float = 0.1
    pump: complex = 1.0 + 0j
    correlation_time_s: float = 1e-12
    kernel: Callable[[float], complex] | None = None

    def __post_init__(self) -> None:
        if self.sigma_sq <= 0:
            raise ValueError("vacuum norm must be positive")
        if self.correlation_time_s <= 0:
            raise ValueError("correlation time must be positive")
        if abs(complex(self.nu(0.0)) - 1.0) > 1e-12:
            raise ValueError("temporal kernel must satisfy nu(0) = 1")

    def nu(self, tau: float) -> complex:
        if self.kernel is not None:
            return self.kernel(tau)
        return gaussian_kernel(tau, self.correlation_time_s)

    @property
    def gain(self) -> complex:
        """Coefficient of the amplified admixture, g*V."""
        return self.coupling * self.pump


def pair_correlation(a: FieldExpr, b: FieldExpr, model: CovarianceModel) -> complex:
    """<A B> under the vacuum measure.

    Only pairings of a mode amplitude with the conjugate of the same mode
    survive, each worth sigma_sq.  When a plain term pairs with an amplified
    term the pairing is a signal-idler correlation and carries the kernel
    nu evaluated at the emission-time difference (oriented from the plain
    side to the amplified side, conjugated inside conjugated expressions).
    Pairings of like provenance are pinned to their equal-time value.
    """
    total = 0j
    for va, ca in a.terms.items():
        for vb, cb in b.terms.items():
            if va.mode != vb.mode or va.conjugated == vb.conjugated:
                continue
            value = ca * cb * model.sigma_sq
            if va.amplified != vb.amplified:
                if va.amplified:
                    amp_var, amp_event, plain_event = va, a.event, b.event
                else:
                    amp_var, amp_event, plain_event = vb, b.event, a.event
                tau = amp_event.emission_time_s - plain_event.emission_time_s
                factor = complex(model.nu(tau))
                if not amp_var.conjugated:
                    factor = factor.conjugate()
                value *= factor
            total += value
    return total


def isserlis_quadruple(a: FieldExpr, b: FieldExpr, c: FieldExpr, d: FieldExpr,
                       model: CovarianceModel) -> complex:
    """<ABCD> = <AB><CD> + <AC><BD> + <AD><BC> for zero-mean Gaussians."""
    ab = pair_correlation(a, b, model)
    cd = pair_correlation(c, d, model)
    ac = pair_correlation(a, c, model)
    bd = pair_correlation(b, d, model)
    ad = pair_correlation(a, d, model)
    bc = pair_correlation(b, c, model)
    return ab * cd + ac * bd + ad * bc


def gaussian_moment(exprs: Sequence[FieldExpr], model: CovarianceModel) -> complex:
    """Full Wick moment <X1 X2 ... Xn>: sum over complete pairings.

    Odd-order moments vanish.  Cost is (n-1)!! pairings, fine for the
    eighth moments needed by intensity correlators.
    """
    n = len(exprs)
    if n == 0:
        return 1.0 + 0j
    if n % 2:
        return 0j
    pair = [[0j] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            pair[i][j] = pair_correlation(exprs[i], exprs[j], model)

    def match(idx: tuple[int, ...]) -> complex:
        if not idx:
            return 1.0 + 0j
        first, rest = idx[0], idx[1:]
        acc = 0j
        for pos, j in enumerate(rest):
            p = pair[first][j]
            if p != 0:
                acc += p * match(rest[:pos] + rest[pos + 1:])
        return acc

    return match(tuple(range(n)))
