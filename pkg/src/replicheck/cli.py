"""Command-line interface.

Every command prints one envelope::

    {"command": ..., "inputs": {...}, "results": {...}, "seed": ...}

``seed`` appears only for stochastic commands. Exit codes: 0 success,
1 runtime or I/O failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import secrets
import sys

from . import __version__
from .experiment import DesignError, ExperimentDesign, load_design
from .family import FamilyQuery, family_probability
from .inference import (
    BernoulliModel,
    classify_significance,
    confidence_interval,
    hits_for_rate,
    p_value_exact,
    p_value_gaussian,
)
from .numeric import DomainError, multiplier_for_confidence_level
from .simulate import run_ensemble, write_histogram_csv

SEED_ENV = "REPLICHECK_SEED"

REPORT_DESIGN = "bem-erotic.json"
REPORT_RATE = 0.531
REPORT_MULTIPLIER = 2.5


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- results
# Shared by the individual commands and by ``report`` so both print the same
# numbers from the same code path.


def ci_results(n_trials: int, null_mean: float, level=None, multiplier=None) -> dict:
    interval = confidence_interval(BernoulliModel(null_mean), n_trials, level=level, multiplier=multiplier)
    return interval.as_dict()


def pvalue_results(n_trials: int, null_mean: float, hits: int, method: str, tail: str) -> dict:
    model = BernoulliModel(null_mean)
    out = {}
    if method in ("gaussian", "both"):
        out["gaussian"] = p_value_gaussian(hits, n_trials, model, tail).as_dict()
    if method in ("exact", "both"):
        out["exact"] = p_value_exact(hits, n_trials, model, tail).as_dict()
    if method == "both":
        out["difference"] = out["exact"]["value"] - out["gaussian"]["value"]
    return out


def family_results(total: int, significant: int, alpha: float) -> dict:
    return family_probability(FamilyQuery(total, significant, alpha)).as_dict()


def report_results() -> dict:
    design = load_design(REPORT_DESIGN)
    n = design.total_trials
    p0 = design.null_mean
    model = BernoulliModel(p0)
    ci95 = ci_results(n, p0, level=0.95)
    ci_mult_2_5 = ci_results(n, p0, multiplier=REPORT_MULTIPLIER)
    hits = hits_for_rate(REPORT_RATE, n)
    interval95 = confidence_interval(model, n, level=0.95)
    interval_mult_2_5 = confidence_interval(model, n, multiplier=REPORT_MULTIPLIER)
    return {
        "n_trials": n,
        "session_groups": [[g.sessions, g.trials_per_session] for g in design.groups],
        "null_mean": p0,
        "sigma_b": model.sigma_b,
        "sem": ci95["sem"],
        "ci_95": ci95,
        "ci_multiplier_2_5": ci_mult_2_5,
        "multiplier_for_99": multiplier_for_confidence_level(0.99),
        "observed_rate": REPORT_RATE,
        "observed_hits": hits,
        "classification_vs_ci_95": classify_significance(REPORT_RATE, interval95),
        "classification_vs_ci_multiplier_2_5": classify_significance(REPORT_RATE, interval_mult_2_5),
        "pvalue_upper": pvalue_results(n, p0, hits, "both", "upper"),
        "pvalue_two_sided": pvalue_results(n, p0, hits, "both", "two-sided"),
        "family_8_of_9": family_results(9, 8, 0.05),
    }


# ---------------------------------------------------------------- rendering


def _flatten(prefix: str, value, rows: list) -> None:
    if isinstance(value, dict):
        for key, sub in value.items():
            _flatten(f"{prefix}.{key}" if prefix else key, sub, rows)
    elif isinstance(value, float):
        rows.append((prefix, f"{value:.10g}"))
    else:
        rows.append((prefix, json.dumps(value)))


def render_markdown(envelope: dict) -> str:
    lines = [f"## {envelope['command']}", ""]
    if "seed" in envelope:
        lines += [f"seed: {envelope['seed']}", ""]
    for title in ("inputs", "results"):
        body = dict(envelope[title])
        hist = body.pop("histogram", None)
        rows: list = []
        _flatten("", body, rows)
        lines += [f"### {title}", "", "| quantity | value |", "|---|---|"]
        lines += [f"| {k} | {v} |" for k, v in rows]
        if hist is not None:
            lines += ["", f"histogram: {len(hist)} occupied bins (use --histogram for CSV)"]
        lines.append("")
    return "\n".join(lines)


def render(envelope: dict, fmt: str) -> str:
    if fmt == "markdown":
        return render_markdown(envelope)
    return json.dumps(envelope, indent=2, allow_nan=False)


# ---------------------------------------------------------------- commands


def _resolve_design(args) -> ExperimentDesign:
    if args.design is not None and args.n is not None:
        raise UsageError("--n and --design are mutually exclusive")
    if args.design is None and args.n is None:
        raise UsageError("one of --n or --design is required")
    if args.design is not None:
        try:
            design = load_design(args.design)
        except OSError as exc:
            raise RuntimeError(f"--design: cannot read {args.design}: {exc.strerror}") from None
        except DesignError as exc:
            raise UsageError(f"--design: {exc}") from None
    else:
        if args.n < 1:
            raise UsageError(f"--n must be >= 1, got {args.n}")
        design = ExperimentDesign.single(args.n)
    if args.null_mean is not None:
        _check_prob(args.null_mean, "--null-mean")
        design = ExperimentDesign(design.groups, args.null_mean)
    return design


def _check_prob(value: float, flag: str, upper_open: bool = False) -> None:
    bad = not math.isfinite(value) or value < 0 or value > 1 or (upper_open and value == 1)
    if bad:
        bound = "[0, 1)" if upper_open else "[0, 1]"
        raise UsageError(f"{flag} must lie in {bound}, got {value}")


def _design_inputs(args, design: ExperimentDesign) -> dict:
    out = {"n_trials": design.total_trials, "null_mean": design.null_mean}
    if args.design is not None:
        out["design"] = args.design
    return out


def cmd_ci(args) -> dict:
    design = _resolve_design(args)
    if (args.level is None) == (args.multiplier is None):
        raise UsageError("exactly one of --level or --multiplier is required")
    inputs = _design_inputs(args, design)
    if args.level is not None:
        _check_prob(args.level, "--level", upper_open=True)
        inputs["level"] = args.level
    else:
        if not math.isfinite(args.multiplier) or args.multiplier < 0:
            raise UsageError(f"--multiplier must be finite and >= 0, got {args.multiplier}")
        inputs["multiplier"] = args.multiplier
    results = ci_results(design.total_trials, design.null_mean, args.level, args.multiplier)
    return {"command": "ci", "inputs": inputs, "results": results}


def cmd_pvalue(args) -> dict:
    design = _resolve_design(args)
    n = design.total_trials
    if (args.hits is None) == (args.rate is None):
        raise UsageError("exactly one of --hits or --rate is required")
    inputs = _design_inputs(args, design)
    if args.rate is not None:
        _check_prob(args.rate, "--rate")
        hits = hits_for_rate(args.rate, n)
        inputs["rate"] = args.rate
    else:
        hits = args.hits
        if not 0 <= hits <= n:
            raise UsageError(f"--hits must lie in [0, {n}], got {hits}")
    tail = "two-sided" if args.tail == "two" else args.tail
    if args.method in ("gaussian", "both") and design.null_mean in (0.0, 1.0):
        raise UsageError("--method gaussian needs --null-mean strictly between 0 and 1")
    inputs.update(hits=hits, method=args.method, tail=tail)
    results = pvalue_results(n, design.null_mean, hits, args.method, tail)
    return {"command": "pvalue", "inputs": inputs, "results": results}


def _resolve_seed(flag_value) -> int:
    if flag_value is not None:
        source, raw = "--seed", flag_value
    elif os.environ.get(SEED_ENV):
        source, raw = SEED_ENV, os.environ[SEED_ENV]
    else:
        return secrets.randbits(64)
    try:
        seed = int(raw)
    except ValueError:
        raise UsageError(f"{source} must be an unsigned 64-bit integer, got {raw!r}") from None
    if not 0 <= seed < 2**64:
        raise UsageError(f"{source} must be an unsigned 64-bit integer, got {raw!r}")
    return seed


def cmd_simulate(args) -> dict:
    design = _resolve_design(args)
    _check_prob(args.true_p, "--true-p")
    _check_prob(args.level, "--level", upper_open=True)
    if args.experiments < 1:
        raise UsageError(f"--experiments must be >= 1, got {args.experiments}")
    if args.workers < 1:
        raise UsageError(f"--workers must be >= 1, got {args.workers}")
    seed = _resolve_seed(args.seed)
    summary = run_ensemble(
        design,
        args.true_p,
        args.experiments,
        args.level,
        seed,
        per_trial=args.per_trial,
        workers=args.workers,
    )
    if args.histogram is not None:
        try:
            write_histogram_csv(summary.histogram, args.histogram)
        except OSError as exc:
            raise RuntimeError(f"--histogram: cannot write {args.histogram}: {exc.strerror}") from None
    # --workers is deliberately not echoed: it cannot change results
    inputs = _design_inputs(args, design)
    inputs.update(
        true_p=args.true_p,
        experiments=args.experiments,
        level=args.level,
        sampler=summary.sampler,
    )
    if args.histogram is not None:
        inputs["histogram"] = args.histogram
    return {"command": "simulate", "inputs": inputs, "results": summary.as_dict(), "seed": seed}


def cmd_family(args) -> dict:
    if args.total < 1:
        raise UsageError(f"--total must be >= 1, got {args.total}")
    if not 0 <= args.significant <= args.total:
        raise UsageError(f"--significant must lie in [0, --total={args.total}], got {args.significant}")
    if not (math.isfinite(args.alpha) and 0 < args.alpha < 1):
        raise UsageError(f"--alpha must lie in (0, 1), got {args.alpha}")
    inputs = {"total": args.total, "significant": args.significant, "alpha": args.alpha}
    results = family_results(args.total, args.significant, args.alpha)
    return {"command": "family", "inputs": inputs, "results": results}


def cmd_report(args) -> dict:
    inputs = {"design": REPORT_DESIGN, "observed_rate": REPORT_RATE, "multiplier": REPORT_MULTIPLIER}
    return {"command": "report", "inputs": inputs, "results": report_results()}


# ---------------------------------------------------------------- parser


def _add_format(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "markdown"), default="json")


def _add_design(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, help="number of pooled trials")
    p.add_argument("--design", help="JSON design file (bem-erotic.json is bundled)")
    p.add_argument("--null-mean", type=float, help="null hit probability (default 0.5 or the design's)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="replicheck",
        description="Confidence intervals, p-values and Monte Carlo replication for forced-choice experiments.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ci", help="confidence interval around the null mean")
    _add_design(p)
    p.add_argument("--level", type=float)
    p.add_argument("--multiplier", type=float, help="number of standard errors")
    _add_format(p)
    p.set_defaults(func=cmd_ci)

    p = sub.add_parser("pvalue", help="gaussian and exact binomial p-values")
    _add_design(p)
    p.add_argument("--hits", type=int)
    p.add_argument("--rate", type=float, help="converted to hits by rounding up")
    p.add_argument("--method", choices=("exact", "gaussian", "both"), default="both")
    p.add_argument("--tail", choices=("upper", "lower", "two"), default="upper")
    _add_format(p)
    p.set_defaults(func=cmd_pvalue)

    p = sub.add_parser("simulate", help="seeded Monte Carlo replication ensemble")
    _add_design(p)
    p.add_argument("--true-p", type=float, default=0.5)
    p.add_argument("--experiments", type=int, default=100_000)
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--seed", help=f"unsigned 64-bit seed (default ${SEED_ENV}, else random)")
    p.add_argument("--histogram", help="write a hits,count CSV here")
    p.add_argument("--per-trial", action="store_true", help="simulate every trial instead of one binomial draw")
    p.add_argument("--workers", type=int, default=1, help="threads; results do not depend on it")
    _add_format(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("family", help="chance of k significant results among K null experiments")
    p.add_argument("--total", type=int, required=True)
    p.add_argument("--significant", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    _add_format(p)
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("report", help="every derived number of the 53.1%% example in one table")
    _add_format(p)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        envelope = args.func(args)
        text = render(envelope, args.format)
    except UsageError as exc:
        parser.exit(2, f"{parser.prog} {args.command}: error: {exc}\n")
    except (DomainError, DesignError) as exc:
        parser.exit(2, f"{parser.prog} {args.command}: error: {exc}\n")
    except RuntimeError as exc:
        parser.exit(1, f"{parser.prog} {args.command}: error: {exc}\n")
    sys.stdout.write(text + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
