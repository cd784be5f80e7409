"""Synthetic telecommand (STC) expansion and plan admission.

An STC template is a list of telecommands with offsets from the STC start
date. Expanding a request yields a dated TC sequence; that sequence can be
merged into an already scheduled plan and the result checked by the
verifier before it is accepted for execution.

Template files are JSON lists::

    [{"name": "DELETION", "parameters": ["SIZE"],
      "steps": [{"tc": "CLEARFILE", "offset": 0, "delta_source": "SIZE"}]}]
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Mapping, Optional, Sequence

from .interp import Configuration, TimedTelecommand, Verdict, verify_from
from .model import Model, lookup_tc, total_duration

__all__ = [
    "MAX_STEPS",
    "StcError",
    "StcStep",
    "StcTemplate",
    "StcRequest",
    "load_templates",
    "parse_templates",
    "default_templates",
    "lint_template",
    "expand_stc",
    "merge_plans",
    "admit",
]

MAX_STEPS = 11


class StcError(ValueError):
    pass


@dataclass(frozen=True)
class StcStep:
    tc: str
    offset: int
    delta_source: Optional[str] = None


@dataclass(frozen=True)
class StcTemplate:
    name: str
    steps: tuple[StcStep, ...]
    parameters: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.steps:
            raise StcError(f"template {self.name} has no steps")
        offsets = [s.offset for s in self.steps]
        if any(o < 0 for o in offsets) or offsets != sorted(offsets):
            raise StcError(f"template {self.name}: offsets must be non-negative "
                           "and non-decreasing")
        for s in self.steps:
            if s.delta_source is not None and s.delta_source not in self.parameters:
                raise StcError(f"template {self.name}: step {s.tc} reads undeclared "
                               f"parameter {s.delta_source}")


@dataclass(frozen=True)
class StcRequest:
    template: str
    t0: int
    bindings: Mapping[str, int] = field(default_factory=dict)


def parse_templates(data) -> dict[str, StcTemplate]:
    if not isinstance(data, list):
        raise StcError("template file must hold a JSON list")
    out = {}
    for entry in data:
        try:
            steps = tuple(StcStep(str(s["tc"]), int(s["offset"]), s.get("delta_source"))
                          for s in entry["steps"])
            tpl = StcTemplate(str(entry["name"]), steps,
                              tuple(str(p) for p in entry.get("parameters", [])))
        except (KeyError, TypeError, AttributeError) as exc:
            raise StcError(f"malformed template entry: {exc!r}") from None
        if tpl.name in out:
            raise StcError(f"duplicate template {tpl.name}")
        out[tpl.name] = tpl
    return out


def load_templates(path) -> dict[str, StcTemplate]:
    with open(path, encoding="utf-8") as fh:
        return parse_templates(json.load(fh))


def default_templates() -> dict[str, StcTemplate]:
    """Bundled fixture templates (DOWNLOAD6, DELETION) for the MINISAT model."""
    text = resources.files("csm").joinpath("data/templates.json").read_text("utf-8")
    return parse_templates(json.loads(text))


def lint_template(model: Model, tpl: StcTemplate) -> list[str]:
    """Non-fatal warnings about ``tpl`` against ``model``."""
    warnings = []
    if len(tpl.steps) > MAX_STEPS:
        warnings.append(f"template {tpl.name} has {len(tpl.steps)} steps "
                        f"(more than {MAX_STEPS})")
    for s in tpl.steps:
        if lookup_tc(model, s.tc) is None:
            warnings.append(f"template {tpl.name}: unknown telecommand {s.tc}")
    return warnings


def expand_stc(model: Model, templates: Mapping[str, StcTemplate],
               req: StcRequest) -> list[TimedTelecommand]:
    tpl = templates.get(req.template)
    if tpl is None:
        raise StcError(f"unknown template {req.template}")
    missing = [p for p in tpl.parameters if p not in req.bindings]
    if missing:
        raise StcError(f"unbound parameter(s) of {tpl.name}: {', '.join(missing)}")
    out = []
    for s in tpl.steps:
        hit = lookup_tc(model, s.tc)
        if hit is None:
            raise StcError(f"template {tpl.name}: unknown telecommand {s.tc}")
        _, t = hit
        if t.param is not None:
            if s.delta_source is None:
                raise StcError(f"template {tpl.name}: {s.tc} needs a delta_source")
            delta = req.bindings[s.delta_source]
        elif s.delta_source is not None:
            raise StcError(f"template {tpl.name}: {s.tc} takes no delta")
        else:
            delta = total_duration(model, t)
        out.append(TimedTelecommand(s.tc, req.t0 + s.offset, delta))
    return sorted(out, key=lambda tc: tc.t)


def merge_plans(existing: Sequence[TimedTelecommand],
                addition: Sequence[TimedTelecommand]) -> list[TimedTelecommand]:
    """Date-ordered union; at equal dates ``existing`` items come first."""
    return sorted([*existing, *addition], key=lambda tc: tc.t)


def admit(model: Model, current: Configuration, plan: Sequence[TimedTelecommand],
          engine: str = "cycle") -> Verdict:
    """Admission gate for a plan of untrusted origin."""
    return verify_from(model, current, plan, engine=engine)
