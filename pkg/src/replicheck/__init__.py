"""Statistics for binary forced-choice experiments: standard errors,
null-centred confidence intervals, exact and Gaussian p-values, family-wise
significance and seeded Monte Carlo replication."""

__version__ = "0.1.0"

from .experiment import DesignError, ExperimentDesign, SessionGroup, load_design, parse_design, total_trials
from .family import FamilyQuery, FamilyResult, family_probability
from .inference import (
    BernoulliModel,
    IntervalResult,
    PValueResult,
    SampleMeanModel,
    classify_significance,
    confidence_interval,
    hits_for_rate,
    p_value_exact,
    p_value_gaussian,
    sem,
)
from .numeric import (
    DomainError,
    binomial_lower_tail,
    binomial_upper_tail,
    confidence_level_for_multiplier,
    erf,
    log_binomial_coefficient,
    multiplier_for_confidence_level,
)
from .simulate import SimulationSummary, replication_exceedance, run_ensemble
