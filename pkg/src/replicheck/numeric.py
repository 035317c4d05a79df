"""Scalar special functions and exact binomial tails.

Everything here is a pure function of its arguments. Tail sums are done in
log space relative to the largest term, so N in the thousands never
underflows.
"""

from __future__ import annotations

import math

SQRT2 = math.sqrt(2.0)

# bisection stops once the bracket on the multiplier is this narrow
_BISECT_TOL = 1e-12
# terms this far below the leading term cannot move a double-precision sum
_NEGLIGIBLE_LOG_RATIO = -745.0


class DomainError(ValueError):
    """Argument outside the domain of a numeric routine."""


def check_probability(value: float, name: str = "probability") -> float:
    value = float(value)
    if not math.isfinite(value) or value < 0.0 or value > 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {value!r}")
    return value


def check_count(value: int, name: str = "count", minimum: int = 0) -> int:
    if isinstance(value, bool) or int(value) != value:
        raise DomainError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise DomainError(f"{name} must be >= {minimum}, got {value}")
    return value


def erf(x: float) -> float:
    """Gauss error function.

    Backed by the C library ``erf`` through :mod:`math`, which is accurate
    to a few ulp; odd symmetry is exact.
    """
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"erf requires a finite argument, got {x!r}")
    return math.erf(x)


def confidence_level_for_multiplier(n: float) -> float:
    """Probability mass of a Gaussian within ``n`` standard deviations of its mean."""
    n = float(n)
    if not math.isfinite(n) or n < 0.0:
        raise DomainError(f"multiplier must be finite and >= 0, got {n!r}")
    return erf(n / SQRT2)


def multiplier_for_confidence_level(level: float) -> float:
    """Invert :func:`confidence_level_for_multiplier` by bisection.

    >>> round(multiplier_for_confidence_level(0.95), 6)
    1.959964
    """
    level = float(level)
    if not math.isfinite(level) or level < 0.0 or level >= 1.0:
        raise DomainError(f"confidence level must lie in [0, 1), got {level!r}")
    if level == 0.0:
        return 0.0
    lo, hi = 0.0, 1.0
    while confidence_level_for_multiplier(hi) < level:
        lo, hi = hi, 2.0 * hi
    while hi - lo > _BISECT_TOL:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if confidence_level_for_multiplier(mid) < level:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def log_binomial_coefficient(n: int, k: int) -> float:
    """Natural log of C(n, k).

    Summed as ``log1p((n - k) / i)`` over ``i = 1..min(k, n - k)``; every term
    is at least ``log 2`` so the sum has no cancellation.
    """
    n = check_count(n, "n")
    k = check_count(k, "k")
    if k > n:
        raise DomainError(f"k={k} exceeds n={n}")
    k = min(k, n - k)
    if k == 0:
        return 0.0
    rest = n - k
    return math.fsum(math.log1p(rest / i) for i in range(1, k + 1))


def log_binomial_pmf(n: int, k: int, p: float) -> float:
    """ln P(X = k) for X ~ Binomial(n, p); ``-inf`` for impossible outcomes."""
    n = check_count(n, "n")
    k = check_count(k, "k")
    p = check_probability(p, "p")
    if k > n:
        raise DomainError(f"k={k} exceeds n={n}")
    if p == 0.0:
        return 0.0 if k == 0 else -math.inf
    if p == 1.0:
        return 0.0 if k == n else -math.inf
    return log_binomial_coefficient(n, k) + k * math.log(p) + (n - k) * math.log1p(-p)


def _descending_tail(n: int, start: int, p: float, step: int) -> float:
    """Sum pmf from ``start`` moving by ``step`` (+1 or -1) to the end of support.

    Caller guarantees the terms are nonincreasing along the walk, so the
    first term is the largest and serves as the log-space pivot.
    """
    log_odds = math.log(p) - math.log1p(-p)
    log_first = log_binomial_pmf(n, start, p)
    rel = 0.0
    terms = [1.0]
    j = start
    while 0 <= j + step <= n:
        if step > 0:
            rel += math.log((n - j) / (j + 1)) + log_odds
        else:
            rel += math.log(j / (n - j + 1)) - log_odds
        j += step
        if rel < _NEGLIGIBLE_LOG_RATIO:
            break
        terms.append(math.exp(rel))
    return math.exp(log_first) * math.fsum(terms)


def binomial_upper_tail(n: int, k: int, p: float) -> float:
    """P(X >= k) for X ~ Binomial(n, p).

    The smaller tail is summed directly and the other one obtained by
    complement.

    >>> round(binomial_upper_tail(10, 8, 0.5) * 1024, 9)
    56.0
    """
    n = check_count(n, "n")
    k = check_count(k, "k")
    p = check_probability(p, "p")
    if k > n:
        raise DomainError(f"k={k} exceeds n={n}")
    if k == 0 or p == 1.0:
        return 1.0
    if p == 0.0:
        return 0.0
    mode = math.floor((n + 1) * p)
    if k >= mode:
        return min(1.0, _descending_tail(n, k, p, +1))
    return max(0.0, 1.0 - _descending_tail(n, k - 1, p, -1))


def binomial_lower_tail(n: int, k: int, p: float) -> float:
    """P(X <= k) for X ~ Binomial(n, p), by reflection onto the upper tail."""
    n = check_count(n, "n")
    k = check_count(k, "k")
    p = check_probability(p, "p")
    if k > n:
        raise DomainError(f"k={k} exceeds n={n}")
    return binomial_upper_tail(n, n - k, 1.0 - p)
