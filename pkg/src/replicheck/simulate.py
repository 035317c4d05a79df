"""Seeded Monte Carlo replication of forced-choice experiments.

Random streams
--------------
Every simulated experiment owns a private numpy ``Philox`` (4x64-10)
counter-based generator. Experiment ``i`` of a run seeded with
``master_seed`` uses::

    key     = (master_seed, domain)
    counter = (0, 0, 0, i)

``domain`` separates unrelated uses of the same seed (0 for experiment
ensembles, 1 for family simulations). Each stream owns 2**192 counter blocks
before it could touch its neighbour, so streams never overlap, and a result
depends only on ``(master_seed, domain, i)``. How experiments are scheduled
across worker threads therefore cannot change any output.
"""

from __future__ import annotations

import csv
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .experiment import ExperimentDesign
from .inference import BernoulliModel, IntervalResult, confidence_interval, hits_for_rate
from .numeric import DomainError, check_count, check_probability

ENSEMBLE_DOMAIN = 0
FAMILY_DOMAIN = 1

_U64 = 2**64
_CHUNK = 4096


def check_seed(seed: int) -> int:
    if isinstance(seed, bool) or int(seed) != seed or not 0 <= int(seed) < _U64:
        raise DomainError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    return int(seed)


def experiment_stream(master_seed: int, index: int, domain: int = ENSEMBLE_DOMAIN) -> np.random.Generator:
    """The private random stream of experiment ``index``."""
    master_seed = check_seed(master_seed)
    key = np.array([master_seed, domain], dtype=np.uint64)
    counter = np.array([0, 0, 0, index], dtype=np.uint64)
    bitgen = np.random.Philox(key=key, counter=counter)
    return np.random.Generator(bitgen)


def sample_binomial_fast(n: int, p: float, stream: np.random.Generator) -> int:
    """One Binomial(n, p) draw using numpy's sampler (inversion / BTPE)."""
    n = check_count(n, "n")
    p = check_probability(p, "p")
    if n == 0:
        return 0
    return int(stream.binomial(n, p))


def sample_binomial_per_trial(n: int, p: float, stream: np.random.Generator) -> int:
    """One Binomial(n, p) draw built from n separate Bernoulli trials."""
    n = check_count(n, "n")
    p = check_probability(p, "p")
    return int(np.count_nonzero(stream.random(n) < p))


def simulate_experiment(
    design: ExperimentDesign,
    true_p: float,
    stream: np.random.Generator,
    per_trial: bool = False,
) -> int:
    """Hit count of one simulated run of ``design`` with hit probability ``true_p``."""
    sampler = sample_binomial_per_trial if per_trial else sample_binomial_fast
    return sampler(design.total_trials, true_p, stream)


def simulate_hits(
    design: ExperimentDesign,
    true_p: float,
    M: int,
    seed: int,
    per_trial: bool = False,
    workers: int = 1,
    domain: int = ENSEMBLE_DOMAIN,
) -> np.ndarray:
    """Hit counts of ``M`` independent experiments, in experiment order."""
    M = check_count(M, "M", 1)
    seed = check_seed(seed)
    true_p = check_probability(true_p, "true_p")
    workers = max(1, int(workers))
    n = design.total_trials
    sampler = sample_binomial_per_trial if per_trial else sample_binomial_fast

    def run_chunk(start: int) -> np.ndarray:
        stop = min(start + _CHUNK, M)
        out = np.empty(stop - start, dtype=np.int64)
        for j, i in enumerate(range(start, stop)):
            out[j] = sampler(n, true_p, experiment_stream(seed, i, domain))
        return out

    starts = range(0, M, _CHUNK)
    if workers == 1:
        chunks = [run_chunk(s) for s in starts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(run_chunk, starts))
    return np.concatenate(chunks)


@dataclass(frozen=True)
class SimulationSummary:
    ensemble_size: int
    n_trials: int
    true_p: float
    level: float
    interval: IntervalResult
    count_above: int
    count_below: int
    mean_of_means: float
    histogram: list[tuple[int, int]] = field(repr=False)
    master_seed: int
    sampler: str

    @property
    def fraction_above(self) -> float:
        return self.count_above / self.ensemble_size

    @property
    def fraction_below(self) -> float:
        return self.count_below / self.ensemble_size

    @property
    def fraction_outside(self) -> float:
        return self.fraction_above + self.fraction_below

    def as_dict(self) -> dict:
        return {
            "ensemble_size": self.ensemble_size,
            "n_trials": self.n_trials,
            "true_p": self.true_p,
            "level": self.level,
            "interval": self.interval.as_dict(),
            "count_above": self.count_above,
            "count_below": self.count_below,
            "fraction_above": self.fraction_above,
            "fraction_below": self.fraction_below,
            "fraction_outside": self.fraction_outside,
            "mean_of_means": self.mean_of_means,
            "histogram": [{"hits": h, "count": c} for h, c in self.histogram],
            "master_seed": self.master_seed,
            "sampler": self.sampler,
        }


def run_ensemble(
    design: ExperimentDesign,
    true_p: float,
    M: int,
    level: float,
    seed: int,
    per_trial: bool = False,
    workers: int = 1,
) -> SimulationSummary:
    """Simulate ``M`` experiments and classify each sample mean against the
    ``level`` interval around the design's null mean."""
    interval = confidence_interval(BernoulliModel(design.null_mean), design.total_trials, level=level)
    hits = simulate_hits(design, true_p, M, seed, per_trial=per_trial, workers=workers)
    n = design.total_trials
    rates = hits / n
    # same strict comparison as classify_significance
    above = int(np.count_nonzero(rates > interval.upper))
    below = int(np.count_nonzero(rates < interval.lower))
    total_hits = int(hits.sum())
    histogram = sorted(Counter(hits.tolist()).items())
    return SimulationSummary(
        ensemble_size=len(hits),
        n_trials=n,
        true_p=float(true_p),
        level=interval.level,
        interval=interval,
        count_above=above,
        count_below=below,
        mean_of_means=total_hits / (n * len(hits)),
        histogram=histogram,
        master_seed=check_seed(seed),
        sampler="per-trial" if per_trial else "fast",
    )


def replication_exceedance(
    design: ExperimentDesign,
    true_p: float,
    observed_rate: float,
    M: int,
    seed: int,
    per_trial: bool = False,
    workers: int = 1,
) -> float:
    """Monte Carlo estimate of P(sample mean >= observed_rate) under ``true_p``.

    The rate is turned into a hit threshold with the ceiling convention of
    :func:`hits_for_rate`.
    """
    threshold = hits_for_rate(observed_rate, design.total_trials)
    hits = simulate_hits(design, true_p, M, seed, per_trial=per_trial, workers=workers)
    return int(np.count_nonzero(hits >= threshold)) / len(hits)


def monte_carlo_se(p: float, M: int) -> float:
    """Standard error of a proportion estimated from ``M`` draws."""
    return math.sqrt(p * (1.0 - p) / M)


def write_histogram_csv(histogram, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["hits", "count"])
        for hits, count in sorted(histogram):
            writer.writerow([hits, count])
