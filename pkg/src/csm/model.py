"""Abstract syntax and semantic analysis for CSM specifications.

A parsed :class:`Model` is a plain, immutable tree. :func:`validate_model`
checks every structural rule of the language and either hands the model back
untouched or raises :class:`ModelError` carrying *all* diagnostics found.

Diagnostic codes are part of the public contract:

====  ==========================================================
E000  model declares no block
E001  duplicate constant
E002  constant value below 1
E003  duplicate block name
E005  initial state is used as a transient state
E010  transient state shared by two paths, or repeated in one
E011  state used both as steady and transient
E012  number of durations differs from number of transient states
E013  unresolved duration term
E015  literal duration below 1
E020  condition atom names an unknown block or state
E021  condition atom names a transient state
E022  duplicate atom inside one condition
E030  telecommand declared more than once
E031  guard names an unknown telecommand
E032  invariant names an unknown state
E040  delta parameter never used in the duration list
E041  delta parameter shadows a constant
E050  guard or invariant names a telecommand/state of another block
====  ==========================================================
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Union

__all__ = [
    "SourceSpan",
    "ConstDecl",
    "StateRef",
    "Condition",
    "TransitionKind",
    "Transition",
    "Guard",
    "StateInvariant",
    "Block",
    "Model",
    "Diagnostic",
    "ModelError",
    "DeltaError",
    "check_model",
    "validate_model",
    "lookup_tc",
    "total_duration",
]


@dataclass(frozen=True, order=True)
class SourceSpan:
    file: str = "<string>"
    line: int = 1
    column: int = 1

    def __str__(self):
        return f"{self.file}:{self.line}:{self.column}"


_NOWHERE = SourceSpan("<generated>", 1, 1)


def _span():
    # spans never take part in structural equality
    return field(default=_NOWHERE, compare=False, repr=False)


@dataclass(frozen=True)
class ConstDecl:
    name: str
    value: int
    span: SourceSpan = _span()


@dataclass(frozen=True)
class StateRef:
    block: str
    state: str
    span: SourceSpan = _span()

    def __str__(self):
        return f"{self.block}:{self.state}"


@dataclass(frozen=True)
class Condition:
    """Conjunction of ``BLOCK:STATE`` atoms."""

    atoms: tuple[StateRef, ...]
    span: SourceSpan = _span()

    def __str__(self):
        return "[" + ", ".join(str(a) for a in self.atoms) + "]"


class TransitionKind(str, enum.Enum):
    FIXED = "fixed"
    DELTA = "delta"


Duration = Union[str, int]


@dataclass(frozen=True)
class Transition:
    tc_name: str
    path: tuple[str, ...]
    durations: tuple[Duration, ...]
    param: Optional[str] = None
    requirement_tags: tuple[str, ...] = ()
    span: SourceSpan = _span()

    @property
    def kind(self) -> TransitionKind:
        return TransitionKind.DELTA if self.param is not None else TransitionKind.FIXED

    @property
    def source(self) -> str:
        return self.path[0]

    @property
    def destination(self) -> str:
        return self.path[-1]

    @property
    def transients(self) -> tuple[str, ...]:
        return self.path[1:-1]


@dataclass(frozen=True)
class Guard:
    tc_name: str
    condition: Condition
    block: str = ""  # enclosing block in the source text
    span: SourceSpan = _span()


@dataclass(frozen=True)
class StateInvariant:
    block: str
    state: str
    condition: Condition
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Block:
    name: str
    initial: str
    transitions: tuple[Transition, ...] = ()
    requirement_tags: tuple[str, ...] = ()
    span: SourceSpan = _span()
    init_span: SourceSpan = _span()

    @cached_property
    def steady_states(self) -> tuple[str, ...]:
        """Initial state and transition end points, in order of first use."""
        seen = {self.initial: None}
        for t in self.transitions:
            seen.setdefault(t.source)
            seen.setdefault(t.destination)
        return tuple(seen)

    @cached_property
    def transient_states(self) -> tuple[str, ...]:
        seen = {}
        for t in self.transitions:
            for s in t.transients:
                seen.setdefault(s)
        return tuple(seen)

    @cached_property
    def states(self) -> tuple[str, ...]:
        """All states in order of first appearance in the source."""
        seen = {self.initial: None}
        for t in self.transitions:
            for s in t.path:
                seen.setdefault(s)
        return tuple(seen)

    def is_transient(self, state: str) -> bool:
        return state in self.transient_states


@dataclass(frozen=True)
class Model:
    consts: tuple[ConstDecl, ...] = ()
    blocks: tuple[Block, ...] = ()
    guards: tuple[Guard, ...] = ()
    invariants: tuple[StateInvariant, ...] = ()

    @cached_property
    def const_values(self) -> dict[str, int]:
        return {c.name: c.value for c in self.consts}

    @cached_property
    def block_map(self) -> dict[str, Block]:
        return {b.name: b for b in self.blocks}

    @cached_property
    def tc_map(self) -> dict[str, tuple[Block, Transition]]:
        out = {}
        for b in self.blocks:
            for t in b.transitions:
                out.setdefault(t.tc_name, (b, t))
        return out

    def guards_for(self, tc_name: str) -> tuple[Guard, ...]:
        return tuple(g for g in self.guards if g.tc_name == tc_name)

    def invariants_for(self, block: str, state: str) -> tuple[StateInvariant, ...]:
        return tuple(i for i in self.invariants if i.block == block and i.state == state)


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    span: SourceSpan = _NOWHERE

    def __str__(self):
        return f"{self.span}: {self.code} {self.message}"


class ModelError(Exception):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


class DeltaError(ValueError):
    pass


def check_model(model: Model) -> list[Diagnostic]:
    """Return every diagnostic for ``model``, sorted by source location."""
    diags: list[Diagnostic] = []

    def report(code, span, message):
        diags.append(Diagnostic(code, message, span))

    if not model.blocks:
        report("E000", SourceSpan("<model>", 1, 1), "empty model: at least one block is required")

    consts = {}
    for c in model.consts:
        if c.name in consts:
            report("E001", c.span, f"duplicate constant {c.name!r}")
        else:
            consts[c.name] = c.value
        if c.value < 1:
            report("E002", c.span, f"constant {c.name!r} must be at least 1, got {c.value}")

    blocks: dict[str, Block] = {}
    for b in model.blocks:
        if b.name in blocks:
            report("E003", b.span, f"duplicate block {b.name!r}")
        else:
            blocks[b.name] = b

    tcs: dict[str, tuple[Block, Transition]] = {}
    for b in model.blocks:
        _check_block(b, consts, report)
        for t in b.transitions:
            if t.tc_name in tcs:
                report("E030", t.span, f"telecommand {t.tc_name!r} already declared "
                       f"in block {tcs[t.tc_name][0].name}")
            else:
                tcs[t.tc_name] = (b, t)

    for g in model.guards:
        hit = tcs.get(g.tc_name)
        if hit is None:
            report("E031", g.span, f"guard on unknown telecommand {g.tc_name!r}")
        elif g.block and hit[0].name != g.block:
            report("E050", g.span, f"guard on {g.tc_name!r} declared in block {g.block}, "
                   f"but the telecommand belongs to {hit[0].name}")
        _check_condition(g.condition, blocks, report)

    for inv in model.invariants:
        owner = blocks.get(inv.block)
        if owner is None or inv.state not in owner.states:
            others = [b.name for b in model.blocks if inv.state in b.states]
            if others:
                report("E050", inv.span, f"invariant on state {inv.state!r} declared in block "
                       f"{inv.block}, but the state belongs to {others[0]}")
            else:
                report("E032", inv.span, f"invariant on unknown state {inv.block}.{inv.state}")
        _check_condition(inv.condition, blocks, report)

    diags.sort(key=lambda d: (d.span.file, d.span.line, d.span.column, d.code))
    return diags


def _check_block(b: Block, consts, report):
    steady_use = {b.initial: b.init_span}
    transient_use: dict[str, Transition] = {}
    for t in b.transitions:
        for s in (t.source, t.destination):
            steady_use.setdefault(s, t.span)
        for s in t.transients:
            if s in transient_use:
                report("E010", t.span, f"transient state {b.name}.{s} already used by "
                       f"telecommand {transient_use[s].tc_name}; a transient state "
                       "has exactly one timeout")
            else:
                transient_use[s] = t
        if len(t.durations) != len(t.transients):
            report("E012", t.span, f"telecommand {t.tc_name} has {len(t.transients)} transient "
                   f"state(s) but {len(t.durations)} duration(s)")
        param_used = False
        for d in t.durations:
            if isinstance(d, int):
                if d < 1:
                    report("E015", t.span, f"duration literal in {t.tc_name} must be at least 1")
            elif t.param is not None and d == t.param:
                param_used = True
            elif d not in consts:
                report("E013", t.span, f"unresolved duration {d!r} in telecommand {t.tc_name}")
        if t.param is not None:
            if not param_used:
                report("E040", t.span, f"delta parameter {t.param!r} of {t.tc_name} is never used")
            if t.param in consts:
                report("E041", t.span, f"delta parameter {t.param!r} of {t.tc_name} "
                       "shadows a constant")
    for s, t in transient_use.items():
        if s in steady_use:
            if s == b.initial:
                report("E005", b.init_span, f"initial state {b.name}.{s} must be steady")
            else:
                report("E011", t.span, f"state {b.name}.{s} is both steady and transient")


def _check_condition(cond: Condition, blocks: dict[str, Block], report):
    seen = set()
    for atom in cond.atoms:
        key = (atom.block, atom.state)
        if key in seen:
            report("E022", atom.span, f"duplicate atom {atom} in condition")
        seen.add(key)
        b = blocks.get(atom.block)
        if b is None:
            report("E020", atom.span, f"unknown block {atom.block!r} in condition atom {atom}")
        elif atom.state not in b.states:
            report("E020", atom.span, f"unknown state {atom.state!r} in condition atom {atom}")
        elif b.is_transient(atom.state):
            report("E021", atom.span, f"condition atom {atom} names a transient state")


def validate_model(model: Model) -> Model:
    """Return ``model`` unchanged if it is well formed, else raise :class:`ModelError`."""
    diags = check_model(model)
    if diags:
        raise ModelError(diags)
    return model


def lookup_tc(model: Model, tc_name: str) -> Optional[tuple[Block, Transition]]:
    return model.tc_map.get(tc_name)


def resolve_durations(model: Model, t: Transition, delta: Optional[int] = None) -> tuple[int, ...]:
    """Per-transient durations in ticks, with the delta parameter substituted."""
    if t.param is not None and delta is None:
        raise DeltaError(f"telecommand {t.tc_name} requires a delta value")
    if t.param is None and delta is not None:
        raise DeltaError(f"telecommand {t.tc_name} takes no delta value")
    out = []
    for d in t.durations:
        if isinstance(d, int):
            out.append(d)
        elif d == t.param:
            out.append(delta)
        else:
            out.append(model.const_values[d])
    return tuple(out)


def total_duration(model: Model, t: Transition, delta: Optional[int] = None) -> int:
    """Ticks between dispatch of ``t`` and arrival in its destination state."""
    return sum(resolve_durations(model, t, delta))
