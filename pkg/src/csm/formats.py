"""Text and JSON formats: TC sequence files, configurations and verdicts.

Sequence files hold one telecommand per line::

    # comment
    AMPON t=0
    CLEARFILE t=2 delta=4

Blank lines and ``#`` comments are ignored; line order is dispatch order.
"""

from __future__ import annotations

import json
import re
from importlib import resources

from .interp import Configuration, RejectionCause, Timer, TimedTelecommand, Verdict

__all__ = [
    "SCHEMA_VERSION",
    "SequenceFormatError",
    "parse_sequence",
    "read_sequence",
    "format_sequence",
    "config_to_dict",
    "config_from_dict",
    "cause_to_dict",
    "verdict_to_dict",
    "verdict_schema",
]

SCHEMA_VERSION = "csm-verdict/1"

_LINE = re.compile(
    r"^(?P<name>[A-Za-z_][A-Za-z0-9_]*)\s+t=(?P<t>[0-9]+)(?:\s+delta=(?P<delta>[0-9]+))?$"
)


class SequenceFormatError(ValueError):
    def __init__(self, where: str, line: int, message: str):
        self.line = line
        super().__init__(f"{where}:{line}: {message}")


def parse_sequence(text: str, where: str = "<string>") -> list[TimedTelecommand]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if m is None:
            raise SequenceFormatError(where, lineno,
                                      f"expected 'NAME t=<nat> [delta=<nat>]', got {line!r}")
        delta = m.group("delta")
        try:
            out.append(TimedTelecommand(m.group("name"), int(m.group("t")),
                                        None if delta is None else int(delta)))
        except ValueError as exc:
            raise SequenceFormatError(where, lineno, str(exc)) from None
    return out


def read_sequence(path) -> list[TimedTelecommand]:
    with open(path, encoding="utf-8") as fh:
        return parse_sequence(fh.read(), str(path))


def format_sequence(seq) -> str:
    return "".join(f"{tc}\n" for tc in seq)


def config_to_dict(config: Configuration) -> dict:
    return {
        "now": config.now,
        "states": dict(config.block_states),
        "timers": [
            {"block": tm.block, "fires_at": tm.fires_at,
             "path": list(tm.path), "durations": list(tm.durations)}
            for tm in config.timers.values()
        ],
    }


def config_from_dict(data: dict) -> Configuration:
    """Inverse of :func:`config_to_dict`; raises ``ValueError`` on bad shape."""
    try:
        timers = {}
        for item in data.get("timers", []):
            tm = Timer(str(item["block"]), int(item["fires_at"]),
                       tuple(item["path"]), tuple(int(d) for d in item["durations"]))
            timers[tm.block] = tm
        return Configuration(int(data["now"]), {str(k): str(v) for k, v in data["states"].items()},
                             timers)
    except (KeyError, TypeError, AttributeError) as exc:
        raise ValueError(f"malformed configuration: {exc!r}") from None


def cause_to_dict(cause: RejectionCause) -> dict:
    return {
        "kind": cause.kind.value,
        "tick": cause.tick,
        "tc": cause.tc,
        "block": cause.block,
        "state": cause.state,
        "condition": None if cause.condition is None else str(cause.condition),
    }


def verdict_to_dict(verdict: Verdict) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "verdict": "accepted" if verdict.accepted else "rejected",
        "cause": None if verdict.cause is None else cause_to_dict(verdict.cause),
        "last_safe": config_to_dict(verdict.last_safe),
        "final": None if verdict.final is None else config_to_dict(verdict.final),
        "trace": [{"tick": k, "block": b, "state": s} for k, b, s in verdict.trace],
    }


def verdict_schema() -> dict:
    """JSON Schema of the document produced by :func:`verdict_to_dict`."""
    text = resources.files("csm").joinpath("data/verdict.schema.json").read_text("utf-8")
    return json.loads(text)
