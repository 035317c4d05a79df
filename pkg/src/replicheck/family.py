"""How likely is it that k of K independent experiments come out significant
when every null hypothesis is true?

Experiments are treated as independent, each significant with the same
per-experiment probability ``alpha``. The tail convention behind ``alpha`` is
whatever the caller declares.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numeric import binomial_upper_tail, check_count, check_probability, log_binomial_pmf
from .simulate import FAMILY_DOMAIN, check_seed, experiment_stream, sample_binomial_fast


@dataclass(frozen=True)
class FamilyQuery:
    total_experiments: int
    significant_count: int
    alpha: float

    def __post_init__(self):
        K = check_count(self.total_experiments, "total_experiments", 1)
        k = check_count(self.significant_count, "significant_count")
        if k > K:
            raise ValueError(f"significant_count={k} exceeds total_experiments={K}")
        alpha = check_probability(self.alpha, "alpha")
        if not 0.0 < alpha < 1.0:
            raise ValueError(f"alpha must lie strictly between 0 and 1, got {alpha}")


@dataclass(frozen=True)
class FamilyResult:
    prob_at_least_k: float
    prob_exactly_k: float

    def as_dict(self) -> dict:
        return {"prob_at_least_k": self.prob_at_least_k, "prob_exactly_k": self.prob_exactly_k}


def family_probability(query: FamilyQuery) -> FamilyResult:
    K, k, alpha = query.total_experiments, query.significant_count, query.alpha
    exactly = math.exp(log_binomial_pmf(K, k, alpha))
    at_least = binomial_upper_tail(K, k, alpha)
    return FamilyResult(prob_at_least_k=max(at_least, exactly), prob_exactly_k=exactly)


def simulate_family(query: FamilyQuery, M: int, seed: int) -> float:
    """Monte Carlo estimate of ``prob_at_least_k``.

    Family ``i`` draws its number of significant experiments from stream
    ``i`` of the family domain, so results never collide with an experiment
    ensemble run under the same seed.
    """
    M = check_count(M, "M", 1)
    seed = check_seed(seed)
    K, k, alpha = query.total_experiments, query.significant_count, query.alpha
    counts = np.fromiter(
        (sample_binomial_fast(K, alpha, experiment_stream(seed, i, FAMILY_DOMAIN)) for i in range(M)),
        dtype=np.int64,
        count=M,
    )
    return int(np.count_nonzero(counts >= k)) / M
