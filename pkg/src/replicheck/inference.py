"""Standard error, null-centred confidence intervals and p-values for hit counts.

The per-trial standard deviation is taken under the null (``sqrt(p0 (1 - p0))``),
never from the observed rate. Gaussian p-values use no continuity correction;
the exact binomial p-values are there to measure the gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

from .numeric import (
    SQRT2,
    DomainError,
    binomial_lower_tail,
    binomial_upper_tail,
    check_count,
    check_probability,
    confidence_level_for_multiplier,
    multiplier_for_confidence_level,
)

Tail = Literal["upper", "lower", "two-sided"]
Method = Literal["gaussian", "exact-binomial"]
Classification = Literal["inside", "above", "below"]

TAILS = ("upper", "lower", "two-sided")


@dataclass(frozen=True)
class BernoulliModel:
    """Null success probability of a single binary trial."""

    p0: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "p0", check_probability(self.p0, "p0"))

    @property
    def sigma_b(self) -> float:
        return math.sqrt(self.p0 * (1.0 - self.p0))


@dataclass(frozen=True)
class SampleMeanModel:
    model: BernoulliModel
    n_trials: int

    def __post_init__(self):
        object.__setattr__(self, "n_trials", check_count(self.n_trials, "n_trials", 1))

    @property
    def sem(self) -> float:
        return sem(self.model, self.n_trials)


@dataclass(frozen=True)
class IntervalResult:
    level: float
    multiplier: float
    sem: float
    center: float
    half_width: float

    @property
    def lower(self) -> float:
        return self.center - self.half_width

    @property
    def upper(self) -> float:
        return self.center + self.half_width

    def as_dict(self) -> dict:
        return {
            "level": self.level,
            "multiplier": self.multiplier,
            "sem": self.sem,
            "half_width": self.half_width,
            "lower": self.lower,
            "upper": self.upper,
        }


@dataclass(frozen=True)
class PValueResult:
    method: Method
    tail: Tail
    value: float
    hits: int
    n_trials: int
    z: float | None = None

    def as_dict(self) -> dict:
        out = {"method": self.method, "tail": self.tail, "value": self.value}
        if self.z is not None:
            out["z"] = self.z
        return out


def sem(model: BernoulliModel, n_trials: int) -> float:
    """Standard error of the sample mean of ``n_trials`` trials."""
    n_trials = check_count(n_trials, "n_trials", 1)
    return model.sigma_b / math.sqrt(n_trials)


def confidence_interval(
    model: BernoulliModel,
    n_trials: int,
    level: float | None = None,
    multiplier: float | None = None,
) -> IntervalResult:
    """Interval ``p0 +/- multiplier * sem``.

    Give exactly one of ``level`` (converted through the erf relation) or
    ``multiplier``; the other is derived and reported.
    """
    if (level is None) == (multiplier is None):
        raise ValueError("give exactly one of level or multiplier")
    if level is not None:
        multiplier = multiplier_for_confidence_level(level)
        level = float(level)
    else:
        level = confidence_level_for_multiplier(multiplier)
        multiplier = float(multiplier)
    s = sem(model, n_trials)
    return IntervalResult(
        level=level,
        multiplier=multiplier,
        sem=s,
        center=model.p0,
        half_width=multiplier * s,
    )


def hits_for_rate(rate: float, n_trials: int) -> int:
    """Smallest hit count whose rate meets or exceeds ``rate``.

    The rate is read through its shortest decimal repr, so ``0.5`` with
    ``n_trials=1560`` gives exactly 780 and ``0.531`` gives 829.
    """
    rate = check_probability(rate, "rate")
    n_trials = check_count(n_trials, "n_trials", 1)
    return math.ceil(Fraction(repr(rate)) * n_trials)


def _check_hits(hits: int, n_trials: int) -> tuple[int, int]:
    n_trials = check_count(n_trials, "n_trials", 1)
    hits = check_count(hits, "hits")
    if hits > n_trials:
        raise DomainError(f"hits={hits} exceeds n_trials={n_trials}")
    return hits, n_trials


def _check_tail(tail: str) -> Tail:
    if tail == "two":
        tail = "two-sided"
    if tail not in TAILS:
        raise DomainError(f"tail must be one of {TAILS}, got {tail!r}")
    return tail


def p_value_gaussian(
    hits: int, n_trials: int, model: BernoulliModel, tail: Tail = "upper"
) -> PValueResult:
    hits, n_trials = _check_hits(hits, n_trials)
    tail = _check_tail(tail)
    s = sem(model, n_trials)
    if s == 0.0:
        raise DomainError("gaussian p-value undefined for a degenerate null (p0 of 0 or 1)")
    z = (hits / n_trials - model.p0) / s
    # erfc keeps relative accuracy far into the tails where 1 - erf would not
    if tail == "upper":
        value = 0.5 * math.erfc(z / SQRT2)
    elif tail == "lower":
        value = 0.5 * math.erfc(-z / SQRT2)
    else:
        value = math.erfc(abs(z) / SQRT2)
    return PValueResult("gaussian", tail, value, hits, n_trials, z)


def p_value_exact(
    hits: int, n_trials: int, model: BernoulliModel, tail: Tail = "upper"
) -> PValueResult:
    """Exact binomial p-value; two-sided is ``min(1, 2 * smaller tail)``."""
    hits, n_trials = _check_hits(hits, n_trials)
    tail = _check_tail(tail)
    upper = binomial_upper_tail(n_trials, hits, model.p0)
    lower = binomial_lower_tail(n_trials, hits, model.p0)
    if tail == "upper":
        value = upper
    elif tail == "lower":
        value = lower
    else:
        value = min(1.0, 2.0 * min(upper, lower))
    return PValueResult("exact-binomial", tail, value, hits, n_trials)


def classify_significance(observed_rate: float, interval: IntervalResult) -> Classification:
    # strict exceedance: a rate sitting exactly on a bound counts as inside
    if observed_rate > interval.upper:
        return "above"
    if observed_rate < interval.lower:
        return "below"
    return "inside"
