"""Executable convergence-bound machinery.

Given the trade-offs (C, C'), the smoothness exponent p, the feature radius
R and the loss gradient bound A, this module computes the iterate bound M,
the stochastic-gradient bound G, checks the rate condition, and inverts the
condition into the recommended output scale sigma_f or the maximal C'.

Shorthand used throughout: a = C' (2R)^p p and b = C A.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import InfeasibleSigmaError

REASON_P_LT_2 = "p_less_than_2"
REASON_P_EQ_2 = "p_eq_2_a_lt_1"
REASON_P_GT_2 = "p_gt_2_product"
REASON_VIOLATED = "violated"

_EXP_OVERFLOW = 709.0  # log of the largest finite float64


@dataclass(frozen=True)
class BoundsReport:
    R: float
    A: float
    a: float
    b: float
    p: float
    M: float | None
    G: float | None
    condition_holds: bool
    reason: str

    def as_lines(self) -> list[str]:
        """Key-value text rendering used by the CLI."""
        rows = [
            ("R", repr(float(self.R))),
            ("A", repr(float(self.A))),
            ("a", repr(float(self.a))),
            ("b", repr(float(self.b))),
            ("p", repr(float(self.p))),
            ("M", repr(float(self.M)) if self.M is not None else "undefined"),
            ("G", repr(float(self.G)) if self.G is not None else "undefined"),
            ("condition_holds", str(self.condition_holds).lower()),
            ("reason", self.reason),
        ]
        return [f"{k} {v}" for k, v in rows]


def bound_residual(M: float, a: float, b: float, p: float) -> float:
    """a M^(p-1) - M + b: the recursion slack whose non-positivity
    certifies M as an invariant iterate-norm bound."""
    return a * M ** (p - 1.0) - M + b


def _pow_safe(base: float, exponent: float) -> float:
    """base**exponent for base > 0 that saturates to inf instead of raising."""
    if base == 0.0:
        return 0.0
    t = exponent * math.log(base)
    if t > _EXP_OVERFLOW:
        return math.inf
    return math.exp(t)


def product_threshold(p: float) -> float:
    """(p-2)^(p-2) / (p-1)^(p-1), the p > 2 condition threshold."""
    return _pow_safe(p - 2.0, p - 2.0) / _pow_safe(p - 1.0, p - 1.0)


def compute_bounds(C: float, C_prime: float, p: float, R: float, A: float) -> BoundsReport:
    """Evaluate the three-case iterate bound M and gradient bound G.

    Cases: p < 2 always certifies with M = max(1, (a+b)^(1/(2-p)));
    p = 2 needs a < 1 and gives M = b/(1-a); p > 2 needs
    a b^(p-2) <= (p-2)^(p-2)/(p-1)^(p-1) and gives M = (1/((p-1)a))^(1/(p-2)).
    A violated condition is reported, never raised.
    """
    if min(C, C_prime, R, A) <= 0:
        raise ValueError("C, C_prime, R, A must all be positive")
    if p < 1.0:
        raise ValueError("p must be >= 1")
    a = C_prime * (2.0 * R) ** p * p
    b = C * A

    if p < 2.0:
        # exponent 1/(2-p) blows up near p -> 2; evaluate in log space
        M = max(1.0, _pow_safe(a + b, 1.0 / (2.0 - p)))
        reason = REASON_P_LT_2
    elif p == 2.0:
        if a < 1.0:
            M = b / (1.0 - a)
            reason = REASON_P_EQ_2
        else:
            return BoundsReport(R, A, a, b, p, None, None, False, REASON_VIOLATED)
    else:
        if a * _pow_safe(b, p - 2.0) <= product_threshold(p):
            M = _pow_safe(1.0 / ((p - 1.0) * a), 1.0 / (p - 2.0))
            reason = REASON_P_GT_2
        else:
            return BoundsReport(R, A, a, b, p, None, None, False, REASON_VIOLATED)

    G = M + b + a * _pow_safe(M, p - 1.0) if math.isfinite(M) else math.inf
    return BoundsReport(R, A, a, b, p, M, G, True, reason)


def min_iterations(epsilon: float, delta: float, G: float) -> int:
    """T0 = ceil(2 G^2 / (epsilon delta)): iterations for an epsilon-accurate
    objective with probability at least 1 - delta."""
    if epsilon <= 0 or G <= 0:
        raise ValueError("epsilon and G must be positive")
    if not (0.0 < delta <= 1.0):
        raise ValueError("delta must lie in (0, 1]")
    return math.ceil(2.0 * G * G / (epsilon * delta))


def max_cprime(p: float, C: float = 1.0, R: float = 1.0) -> float:
    """Largest smoothness trade-off keeping the rate condition satisfiable.

    For p < 2 there is no constraint (returns inf). For p = 2 the bound is
    strict (C' < 1/(8 R^2)); for p > 2 it is non-strict.
    """
    if C <= 0 or R <= 0:
        raise ValueError("C and R must be positive")
    if p < 1.0:
        raise ValueError("p must be >= 1")
    if p < 2.0:
        return math.inf
    if p == 2.0:
        return 1.0 / ((2.0 * R) ** 2 * 2.0)
    return product_threshold(p) / (2.0**p * p * _pow_safe(C, p - 2.0) * _pow_safe(R, 2.0 * p - 2.0))


def recommended_sigma_f(
    p: float, C: float, C_prime: float, rho: float | None = None
) -> float:
    """Output scale sigma_f = R making the rate condition hold for (C, C', p).

    ``rho`` is the safety margin subtracted from the exact boundary value;
    when omitted it defaults to 1e-3 of that value, which keeps the
    certification strict in floating point.
    """
    if C <= 0 or C_prime <= 0:
        raise ValueError("C and C_prime must be positive")
    if p < 2.0:
        raise ValueError("sigma_f selection applies to p >= 2 only")
    if p == 2.0:
        base = 0.5 * (p * C_prime) ** (-1.0 / p)
    else:
        num = _pow_safe(p - 2.0, p - 2.0)
        den = 2.0**p * _pow_safe(C, p - 2.0) * C_prime * p * _pow_safe(p - 1.0, p - 1.0)
        base = _pow_safe(num / den, 1.0 / (2.0 * p - 2.0))
    if rho is None:
        rho = 1e-3 * base
    sigma = base - rho
    if not sigma > 0.0:
        raise InfeasibleSigmaError(
            f"recommended sigma_f is non-positive (base {base!r}, rho {rho!r})"
        )
    return sigma


def sample_certified_region(p: float, rng: np.random.Generator, size: int):
    """Draw (a, b) pairs satisfying the case condition for exponent p.

    Test helper for the property suites; rejection-samples from U(0, 2]^2
    (with a ~ U(0,1) at p = 2).
    """
    if p < 2.0:
        a = rng.uniform(0.0, 2.0, size)
        b = rng.uniform(0.0, 2.0, size)
    elif p == 2.0:
        a = rng.uniform(0.0, 1.0, size)
        b = rng.uniform(0.0, 2.0, size)
    else:
        thr = product_threshold(p)
        a = np.empty(size)
        b = np.empty(size)
        filled = 0
        while filled < size:
            ca = rng.uniform(0.0, 2.0, size)
            cb = rng.uniform(0.0, 2.0, size)
            ok = ca * cb ** (p - 2.0) <= thr
            take = min(int(ok.sum()), size - filled)
            a[filled : filled + take] = ca[ok][:take]
            b[filled : filled + take] = cb[ok][:take]
            filled += take
    # open intervals: nudge exact zeros away
    a = np.maximum(a, 1e-12)
    b = np.maximum(b, 1e-12)
    return a, b


def case_M(a, b, p: float):
    """Vectorized M for given (a, b) already inside the case-p region."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if p < 2.0:
        return np.maximum(1.0, (a + b) ** (1.0 / (2.0 - p)))
    if p == 2.0:
        return b / (1.0 - a)
    return (1.0 / ((p - 1.0) * a)) ** (1.0 / (p - 2.0))
