"""Synchronous-dataflow (Lustre v6) program for a CSM model.

One node per block reads a boolean signal per telecommand (plus an integer
per delta parameter) and returns its current state and an error flag. Local
timers are countdowns armed on TC receipt; the state advances when the
countdown reaches zero. The ``OBSW`` node instantiates every block, checks
the cross-block guards and state invariants over the block state outputs,
and disjoins everything into ``global_error``.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..model import Block, Condition, Model, Transition

__all__ = ["CodegenError", "SyncProgram", "emit_sync_program"]

_RESERVED = frozenset({"prev", "count", "settled", "timer", "state", "error", "global_error"})


class CodegenError(ValueError):
    pass


@dataclass(frozen=True)
class SyncProgram:
    nodes: tuple[str, ...]
    text: str


def _signal(t: Transition) -> str:
    return t.tc_name.lower()


def _delta_input(t: Transition) -> str:
    return f"{_signal(t)}_{t.param.lower()}"


def _literal(block: str, state: str) -> str:
    return f"{block}_{state}"


def _type(block: str) -> str:
    return f"t_{block}"


def _check_names(model: Model):
    seen = {}

    def claim(name, what):
        if name in seen or name in _RESERVED:
            raise CodegenError(f"identifier clash after mangling: {what} -> {name!r} "
                               f"(also {seen.get(name, 'a reserved name')})")
        seen[name] = what

    for c in model.consts:
        claim(c.name, f"constant {c.name}")
    for b in model.blocks:
        claim(b.name, f"block {b.name}")
        claim(_type(b.name), f"type of block {b.name}")
        for s in b.states:
            claim(_literal(b.name, s), f"state {b.name}.{s}")
        for t in b.transitions:
            claim(_signal(t), f"telecommand {t.tc_name}")
            if t.param is not None:
                claim(_delta_input(t), f"delta of {t.tc_name}")
                claim(f"{_signal(t)}_held", f"held delta of {t.tc_name}")
    for b in model.blocks:
        claim(f"s_{b.name}", f"state flow of {b.name}")
        claim(f"e_{b.name}", f"error flow of {b.name}")
    for i in range(1, len(model.guards) + 1):
        claim(f"guard_{i}", f"guard flow {i}")
    for i in range(1, len(model.invariants) + 1):
        claim(f"inv_{i}", f"invariant flow {i}")


def _term(t: Transition, d, index: int) -> str:
    if d == t.param:
        # first timeout uses the fresh input, later ones the sampled value
        return _delta_input(t) if index == 0 else f"{_signal(t)}_held"
    return str(d)


def _ite(cases, default, indent):
    if not cases:
        return default
    pad = " " * indent
    lines = [f"if {cases[0][0]} then {cases[0][1]}"]
    for cond, val in cases[1:]:
        lines.append(f"{pad}else if {cond} then {val}")
    lines.append(f"{pad}else {default}")
    return "\n".join(lines)


def _block_node(b: Block) -> list[str]:
    lit = lambda s: _literal(b.name, s)  # noqa: E731
    ins = []
    for t in b.transitions:
        ins.append(f"{_signal(t)}: bool")
        if t.param is not None:
            ins.append(f"{_delta_input(t)}: int")
    out = [f"node {b.name}({'; '.join(ins)})",
           f"returns (state: {_type(b.name)}; error: bool);"]
    if not b.transitions:
        out += ["let", f"  state = {lit(b.initial)};", "  error = false;", "tel"]
        return out

    local = [f"prev: {_type(b.name)}", "count: int", f"settled: {_type(b.name)}", "timer: int"]
    local += [f"{_signal(t)}_held: int" for t in b.transitions if t.param is not None]
    out.append("var")
    out += [f"  {v};" for v in local]
    out.append("let")
    out.append(f"  prev = {lit(b.initial)} -> pre state;")
    out.append("  count = (0 -> pre timer) - 1;")

    timeouts = []  # (transient state, next state, next duration or None)
    for t in b.transitions:
        for i, s in enumerate(t.transients):
            nxt = t.path[i + 2]
            rearm = _term(t, t.durations[i + 1], i + 1) if i + 1 < len(t.transients) else None
            timeouts.append((s, nxt, rearm))
    advance = _ite([(f"prev = {lit(s)}", lit(n)) for s, n, _ in timeouts], "prev", 16)
    out.append(f"  settled = if count = 0 then\n"
               f"               ({advance})\n"
               f"             else prev;")

    fire = [(f"{_signal(t)} and settled = {lit(t.source)}", t) for t in b.transitions]
    out.append("  state = " + _ite([(c, lit(t.path[1])) for c, t in fire], "settled", 10) + ";")
    arm = [(c, _term(t, t.durations[0], 0)) for c, t in fire]
    arm += [(f"count = 0 and prev = {lit(s)}", d) for s, _, d in timeouts if d is not None]
    arm.append(("count > 0", "count"))
    out.append("  timer = " + _ite(arm, "0", 10) + ";")
    for t in b.transitions:
        if t.param is not None:
            sig = _signal(t)
            out.append(f"  {sig}_held = if {sig} then {_delta_input(t)} "
                       f"else (0 -> pre {sig}_held);")

    errs = [f"({_signal(t)} and settled <> {lit(t.source)})" for t in b.transitions]
    sigs = [_signal(t) for t in b.transitions]
    errs += [f"({a} and {c})" for i, a in enumerate(sigs) for c in sigs[i + 1:]]
    out.append("  error = " + "\n       or ".join(errs) + ";")
    out.append("tel")
    return out


def _cond(cond: Condition) -> str:
    return " and ".join(f"s_{a.block} = {_literal(a.block, a.state)}" for a in cond.atoms)


def emit_sync_program(model: Model) -> SyncProgram:
    _check_names(model)
    out = ["-- Generated from a CSM model. Do not edit.", ""]
    for c in model.consts:
        out.append(f"const {c.name}: int = {c.value};")
    if model.consts:
        out.append("")
    for b in model.blocks:
        lits = ", ".join(_literal(b.name, s) for s in b.states)
        out.append(f"type {_type(b.name)} = enum {{ {lits} }};")
    if model.blocks:
        out.append("")
    for b in model.blocks:
        out += [f"-- block {b.name}"
                + (f" ({', '.join(b.requirement_tags)})" if b.requirement_tags else "")]
        out += _block_node(b)
        out.append("")

    ins, args = [], {}
    for b in model.blocks:
        args[b.name] = []
        for t in b.transitions:
            ins.append(f"{_signal(t)}: bool")
            args[b.name].append(_signal(t))
            if t.param is not None:
                ins.append(f"{_delta_input(t)}: int")
                args[b.name].append(_delta_input(t))
    out.append(f"node OBSW({'; '.join(ins)})")
    out.append("returns (global_error: bool);")
    local = []
    for b in model.blocks:
        local += [f"s_{b.name}: {_type(b.name)}", f"e_{b.name}: bool"]
    local += [f"guard_{i}: bool" for i in range(1, len(model.guards) + 1)]
    local += [f"inv_{i}: bool" for i in range(1, len(model.invariants) + 1)]
    if local:
        out.append("var")
        out += [f"  {v};" for v in local]
    out.append("let")
    for b in model.blocks:
        out.append(f"  (s_{b.name}, e_{b.name}) = {b.name}({', '.join(args[b.name])});")
    for i, g in enumerate(model.guards, 1):
        out.append(f"  -- guard ({g.tc_name}) {g.condition}")
        out.append(f"  guard_{i} = not {g.tc_name.lower()} or ({_cond(g.condition)});")
    for i, inv in enumerate(model.invariants, 1):
        out.append(f"  -- inv ({inv.block}.{inv.state}) {inv.condition}")
        out.append(f"  inv_{i} = not (s_{inv.block} = {_literal(inv.block, inv.state)}) "
                   f"or ({_cond(inv.condition)});")
    flows = [f"e_{b.name}" for b in model.blocks]
    flows += [f"not guard_{i}" for i in range(1, len(model.guards) + 1)]
    flows += [f"not inv_{i}" for i in range(1, len(model.invariants) + 1)]
    out.append("  global_error = " + ("\n    or ".join(flows) if flows else "false") + ";")
    out.append("tel")
    nodes = tuple(b.name for b in model.blocks) + ("OBSW",)
    return SyncProgram(nodes, "\n".join(out) + "\n")
