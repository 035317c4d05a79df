"""Session structure of a forced-choice experiment and its JSON design format.

A design document looks like::

    {
      "null_mean": 0.5,
      "session_groups": [
        {"sessions": 40, "trials_per_session": 12},
        {"sessions": 60, "trials_per_session": 18}
      ]
    }

``null_mean`` defaults to 0.5. Unknown keys are rejected. All trials are
pooled into one i.i.d. sample; groups only document where N comes from.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

BUNDLED_DESIGNS = ("bem-erotic.json",)

_TOP_KEYS = {"null_mean", "session_groups"}
_GROUP_KEYS = {"sessions", "trials_per_session"}


class DesignError(ValueError):
    """A design document failed to parse or validate.

    ``path`` locates the offending field, e.g. ``session_groups[1].sessions``.
    """

    def __init__(self, path: str, message: str):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}" if path else message)


@dataclass(frozen=True)
class SessionGroup:
    sessions: int
    trials_per_session: int

    def __post_init__(self):
        for name in ("sessions", "trials_per_session"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise DesignError(name, f"must be a positive integer, got {value!r}")

    @property
    def trials(self) -> int:
        return self.sessions * self.trials_per_session


@dataclass(frozen=True)
class ExperimentDesign:
    groups: tuple[SessionGroup, ...]
    null_mean: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "groups", tuple(self.groups))
        if not self.groups:
            raise DesignError("session_groups", "at least one group is required")
        mean = self.null_mean
        if isinstance(mean, bool) or not isinstance(mean, (int, float)):
            raise DesignError("null_mean", f"must be a number, got {mean!r}")
        if not math.isfinite(mean) or not 0.0 <= mean <= 1.0:
            raise DesignError("null_mean", f"must lie in [0, 1], got {mean!r}")
        object.__setattr__(self, "null_mean", float(mean))

    @classmethod
    def single(cls, n_trials: int, null_mean: float = 0.5) -> ExperimentDesign:
        """A design that is just N pooled trials."""
        return cls((SessionGroup(1, n_trials),), null_mean)

    @property
    def total_trials(self) -> int:
        return total_trials(self)


def total_trials(design: ExperimentDesign) -> int:
    return sum(g.trials for g in design.groups)


def design_to_dict(design: ExperimentDesign) -> dict:
    return {
        "null_mean": design.null_mean,
        "session_groups": [
            {"sessions": g.sessions, "trials_per_session": g.trials_per_session}
            for g in design.groups
        ],
    }


def serialize_design(design: ExperimentDesign) -> str:
    return json.dumps(design_to_dict(design), indent=2) + "\n"


def design_from_dict(doc) -> ExperimentDesign:
    if not isinstance(doc, dict):
        raise DesignError("", "design document must be a JSON object")
    unknown = sorted(set(doc) - _TOP_KEYS)
    if unknown:
        raise DesignError(unknown[0], "unknown field")
    if "session_groups" not in doc:
        raise DesignError("session_groups", "required field missing")
    raw_groups = doc["session_groups"]
    if not isinstance(raw_groups, list):
        raise DesignError("session_groups", "must be a list")

    groups = []
    for i, raw in enumerate(raw_groups):
        where = f"session_groups[{i}]"
        if not isinstance(raw, dict):
            raise DesignError(where, "must be an object")
        unknown = sorted(set(raw) - _GROUP_KEYS)
        if unknown:
            raise DesignError(f"{where}.{unknown[0]}", "unknown field")
        for key in ("sessions", "trials_per_session"):
            if key not in raw:
                raise DesignError(f"{where}.{key}", "required field missing")
        try:
            groups.append(SessionGroup(raw["sessions"], raw["trials_per_session"]))
        except DesignError as exc:
            raise DesignError(f"{where}.{exc.path}", exc.message) from None

    return ExperimentDesign(tuple(groups), doc.get("null_mean", 0.5))


def parse_design(document: str) -> ExperimentDesign:
    """Parse and validate a JSON design document."""
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise DesignError("", f"invalid JSON: {exc}") from None
    return design_from_dict(doc)


def load_design(path: str | Path) -> ExperimentDesign:
    """Read a design file; a bare bundled name such as ``bem-erotic.json``
    falls back to the copy shipped with the package when no such file exists."""
    path = Path(path)
    if not path.exists() and path.name in BUNDLED_DESIGNS and path.parent == Path("."):
        text = resources.files("replicheck.data").joinpath(path.name).read_text()
    else:
        text = path.read_text()
    return parse_design(text)
