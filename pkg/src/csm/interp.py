"""Timed-word acceptance for CSM models.

A telecommand sequence is accepted when running it against the composed
block machines dispatches every TC without error and the system then
settles in a quiescent configuration (no pending timers).

Every tick ``k`` is processed in three phases:

1. timers due at ``k`` fire, moving their block one step along its path;
2. the TCs dated ``k`` are dispatched in sequence order;
3. state invariants of every block are checked against the resulting states.

Two engines implement this: :func:`verify` walks every tick, while
:func:`verify_event` jumps between instants where a TC is dated or a timer
expires. Both return identical :class:`Verdict` objects.

``Configuration.now`` is the next tick to be processed, so the configuration
"at the end of tick k" has ``now == k + 1``.
"""

from __future__ import annotations

import enum
import heapq
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .model import Condition, Model, StateRef, Transition

__all__ = [
    "MAX_TICK",
    "TimedTelecommand",
    "Timer",
    "Configuration",
    "CauseKind",
    "RejectionCause",
    "Verdict",
    "ConfigurationError",
    "TickOverflowError",
    "SearchOverflowError",
    "initial_configuration",
    "check_configuration",
    "step_tick",
    "dispatch_tc",
    "verify",
    "verify_event",
    "verify_from",
    "verify_event_from",
    "enumerate_min_errors",
]

MAX_TICK = 2**63 - 1


@dataclass(frozen=True)
class TimedTelecommand:
    name: str
    t: int
    delta: Optional[int] = None

    def __post_init__(self):
        if not 0 <= self.t <= MAX_TICK:
            raise ValueError(f"date of {self.name} out of range: {self.t}")
        if self.delta is not None and self.delta < 1:
            raise ValueError(f"delta of {self.name} must be at least 1, got {self.delta}")

    def __str__(self):
        if self.delta is None:
            return f"{self.name} t={self.t}"
        return f"{self.name} t={self.t} delta={self.delta}"


@dataclass(frozen=True)
class Timer:
    """Pending timeout of a block sitting in a transient state.

    ``path`` lists the states still to be entered (the next one first, the
    destination steady state last); ``durations`` holds the resolved timeout
    of each transient state in ``path``, so ``len(durations) == len(path) - 1``.
    """

    block: str
    fires_at: int
    path: tuple[str, ...]
    durations: tuple[int, ...]


@dataclass(frozen=True)
class Configuration:
    now: int
    block_states: dict
    timers: dict = field(default_factory=dict)

    @property
    def quiescent(self) -> bool:
        return not self.timers


class CauseKind(str, enum.Enum):
    UNKNOWN_TC = "UnknownTc"
    UNEXPECTED_TC = "UnexpectedTc"
    GUARD_VIOLATION = "GuardViolation"
    INVARIANT_VIOLATION = "InvariantViolation"
    DELTA_ARITY = "DeltaArityError"
    NON_MONOTONIC_DATES = "NonMonotonicDates"
    DURATION_MISMATCH = "DurationMismatch"


@dataclass(frozen=True)
class RejectionCause:
    """Why a sequence was rejected.

    Populated fields per kind:

    ===================  ==================================
    UnknownTc            tc
    UnexpectedTc         tc, block, state (current state)
    GuardViolation       tc, block, condition (failed guard)
    InvariantViolation   block, state, condition
    DeltaArityError      tc, block
    DurationMismatch     tc, block
    NonMonotonicDates    tc (first out-of-order TC)
    ===================  ==================================
    """

    kind: CauseKind
    tick: int
    tc: Optional[str] = None
    block: Optional[str] = None
    state: Optional[str] = None
    condition: Optional[Condition] = None

    def describe(self) -> str:
        k = self.kind
        if k is CauseKind.UNKNOWN_TC:
            what = f"unknown telecommand {self.tc}"
        elif k is CauseKind.UNEXPECTED_TC:
            what = f"unexpected telecommand {self.tc} in {self.block}.{self.state}"
        elif k is CauseKind.GUARD_VIOLATION:
            what = f"guard {self.condition} of {self.tc} violated"
        elif k is CauseKind.INVARIANT_VIOLATION:
            what = f"invariant {self.condition} violated in {self.block}.{self.state}"
        elif k is CauseKind.DELTA_ARITY:
            what = f"delta arity mismatch for {self.tc}"
        elif k is CauseKind.DURATION_MISMATCH:
            what = f"delta of {self.tc} does not match its fixed duration"
        else:
            what = f"dates not non-decreasing at {self.tc}"
        return f"tick {self.tick}: {what}"


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    last_safe: Configuration
    cause: Optional[RejectionCause] = None
    final: Optional[Configuration] = None
    trace: tuple = ()  # (tick, block, state) for every state change

    @property
    def last_safe_tick(self) -> int:
        """Last fully processed tick before the failure (-1 if none)."""
        return self.last_safe.now - 1

    @property
    def quiescent_tick(self) -> Optional[int]:
        if self.final is None:
            return None
        return max(self.final.now - 1, 0)

    def summary(self) -> str:
        if self.accepted:
            return f"accepted, quiescent at tick {self.quiescent_tick}"
        return f"rejected\n{self.cause.describe()}"


class ConfigurationError(ValueError):
    pass


class TickOverflowError(OverflowError):
    pass


class SearchOverflowError(RuntimeError):
    def __init__(self, frontier_size: int, limit: int):
        self.frontier_size = frontier_size
        self.limit = limit
        super().__init__(f"bounded search overflow: frontier of {frontier_size} "
                         f"sequences exceeds the limit of {limit}")


@dataclass(frozen=True)
class _Tc:
    name: str
    block: str
    transition: Transition
    slots: tuple  # resolved duration per transient, None where delta goes
    guards: tuple[Condition, ...]

    def durations(self, delta):
        return tuple(delta if d is None else d for d in self.slots)


class _Index:
    """Lookup tables derived once per model."""

    def __init__(self, model: Model):
        consts = model.const_values
        self.blocks = tuple(b.name for b in model.blocks)
        self.order = {name: i for i, name in enumerate(self.blocks)}
        self.tcs = {}
        for b in model.blocks:
            for t in b.transitions:
                slots = tuple(
                    d if isinstance(d, int) else (None if d == t.param else consts[d])
                    for d in t.durations
                )
                guards = tuple(g.condition for g in model.guards if g.tc_name == t.tc_name)
                self.tcs[t.tc_name] = _Tc(t.tc_name, b.name, t, slots, guards)
        self.invs = {}
        for inv in model.invariants:
            self.invs.setdefault((inv.block, inv.state), []).append(inv.condition)
        self.inv_blocks = tuple(b for b in self.blocks
                                if any(k[0] == b for k in self.invs))
        self.states = {b.name: set(b.states) for b in model.blocks}
        self.transient = {b.name: set(b.transient_states) for b in model.blocks}
        self.initial = {b.name: b.initial for b in model.blocks}


def _index(model: Model) -> _Index:
    idx = model.__dict__.get("_csm_index")
    if idx is None:
        idx = _Index(model)
        # frozen dataclass: cache through __dict__ like functools.cached_property
        model.__dict__["_csm_index"] = idx
    return idx


def _holds(cond: Condition, states) -> Optional[StateRef]:
    """Return the first false atom of ``cond``, or None if it holds."""
    for atom in cond.atoms:
        if states.get(atom.block) != atom.state:
            return atom
    return None


class _Machine:
    """Mutable working copy of a configuration, one phase at a time."""

    def __init__(self, idx: _Index, config: Configuration):
        self.idx = idx
        self.states = dict(config.block_states)
        self.timers = dict(config.timers)
        self.trace = []

    def snapshot(self, now: int) -> Configuration:
        timers = {b: self.timers[b] for b in self.idx.blocks if b in self.timers}
        return Configuration(now, dict(self.states), timers)

    def arm(self, block, tick, path, durations):
        fires = tick + durations[0]
        if fires > MAX_TICK:
            raise TickOverflowError(f"timer of {block} would fire after tick {MAX_TICK}")
        tm = Timer(block, fires, path, durations[1:])
        self.timers[block] = tm
        return tm

    def fire(self, block, tick):
        """Phase 1 for one block; returns the newly armed timer if any."""
        tm = self.timers.pop(block)
        nxt = tm.path[0]
        self.states[block] = nxt
        self.trace.append((tick, block, nxt))
        if len(tm.path) > 1:
            return self.arm(block, tick, tm.path[1:], tm.durations)
        return None

    def dispatch(self, tc: TimedTelecommand, tick):
        """Phase 2 for one TC; returns (cause, armed timer)."""
        info = self.idx.tcs.get(tc.name)
        if info is None:
            return RejectionCause(CauseKind.UNKNOWN_TC, tick, tc=tc.name), None
        t = info.transition
        if t.param is not None:
            if tc.delta is None:
                return RejectionCause(CauseKind.DELTA_ARITY, tick, tc=tc.name,
                                      block=info.block), None
        elif tc.delta is not None and tc.delta != sum(info.slots):
            return RejectionCause(CauseKind.DURATION_MISMATCH, tick, tc=tc.name,
                                  block=info.block), None
        current = self.states[info.block]
        if current != t.source:
            return RejectionCause(CauseKind.UNEXPECTED_TC, tick, tc=tc.name,
                                  block=info.block, state=current), None
        for cond in info.guards:
            if _holds(cond, self.states) is not None:
                return RejectionCause(CauseKind.GUARD_VIOLATION, tick, tc=tc.name,
                                      block=info.block, condition=cond), None
        first = t.path[1]
        self.states[info.block] = first
        self.trace.append((tick, info.block, first))
        return None, self.arm(info.block, tick, t.path[2:], info.durations(tc.delta))

    def check_invariants(self, tick) -> Optional[RejectionCause]:
        """Phase 3."""
        invs = self.idx.invs
        for b in self.idx.inv_blocks:
            st = self.states[b]
            for cond in invs.get((b, st), ()):
                if _holds(cond, self.states) is not None:
                    return RejectionCause(CauseKind.INVARIANT_VIOLATION, tick,
                                          block=b, state=st, condition=cond)
        return None


def initial_configuration(model: Model) -> Configuration:
    return Configuration(0, {b.name: b.initial for b in model.blocks}, {})


def check_configuration(model: Model, config: Configuration) -> None:
    """Raise :class:`ConfigurationError` unless ``config`` is consistent with ``model``."""
    idx = _index(model)
    if not 0 <= config.now <= MAX_TICK:
        raise ConfigurationError(f"tick out of range: {config.now}")
    if set(config.block_states) != set(idx.blocks):
        missing = set(idx.blocks) - set(config.block_states)
        extra = set(config.block_states) - set(idx.blocks)
        raise ConfigurationError(f"block set mismatch: missing {sorted(missing)}, "
                                 f"unknown {sorted(extra)}")
    for b, st in config.block_states.items():
        if st not in idx.states[b]:
            raise ConfigurationError(f"unknown state {b}.{st}")
        tm = config.timers.get(b)
        if st in idx.transient[b]:
            if tm is None:
                raise ConfigurationError(f"{b} is in transient state {st} without a timer")
            if tm.block != b:
                raise ConfigurationError(f"timer for {tm.block} filed under {b}")
            if tm.fires_at < config.now:
                raise ConfigurationError(f"timer of {b} expired at {tm.fires_at} "
                                         f"before tick {config.now}")
            t = next(tr for tr in _transitions_of(model, b) if st in tr.transients)
            pos = t.path.index(st)
            if tuple(tm.path) != t.path[pos + 1:]:
                raise ConfigurationError(f"timer path of {b} does not continue {t.tc_name}")
            if len(tm.durations) != len(tm.path) - 1 or any(d < 1 for d in tm.durations):
                raise ConfigurationError(f"bad timer durations for {b}")
        elif tm is not None:
            raise ConfigurationError(f"{b} is in steady state {st} but has a timer")
    for b in config.timers:
        if b not in config.block_states:
            raise ConfigurationError(f"timer for unknown block {b}")


def _transitions_of(model, block):
    return model.block_map[block].transitions


def step_tick(model: Model, config: Configuration):
    """Advance ``config`` through one tick without dispatching any TC.

    Returns the next configuration, or a :class:`RejectionCause` if a state
    invariant fails at the end of the tick.
    """
    m = _Machine(_index(model), config)
    k = config.now
    for b in m.idx.blocks:
        tm = m.timers.get(b)
        if tm is not None and tm.fires_at == k:
            m.fire(b, k)
    cause = m.check_invariants(k)
    if cause is not None:
        return cause
    return m.snapshot(k + 1)


def dispatch_tc(model: Model, config: Configuration, tc: TimedTelecommand):
    """Phase 2 of tick ``tc.t`` for one TC; ``config.now`` must equal ``tc.t``."""
    if config.now != tc.t:
        raise ValueError(f"dispatch of {tc.name}@{tc.t} in configuration at tick {config.now}")
    m = _Machine(_index(model), config)
    cause, _ = m.dispatch(tc, tc.t)
    if cause is not None:
        return cause
    return m.snapshot(config.now)


def _check_dates(seq, start) -> Optional[RejectionCause]:
    prev = start.now
    for tc in seq:
        if tc.t < prev:
            return RejectionCause(CauseKind.NON_MONOTONIC_DATES, start.now, tc=tc.name)
        prev = tc.t
    return None


def _reject(m: _Machine, cause, safe_states, safe_timers, now):
    cfg = Configuration(now, safe_states, safe_timers)
    return Verdict(False, cfg, cause, None, tuple(m.trace))


def _ordered_timers(idx, timers):
    return {b: timers[b] for b in idx.blocks if b in timers}


def verify(model: Model, seq: Sequence[TimedTelecommand]) -> Verdict:
    """Cycle-accurate acceptance of ``seq`` from the initial configuration."""
    return _cycle(model, initial_configuration(model), list(seq))


def verify_from(model: Model, start: Configuration,
                seq: Sequence[TimedTelecommand], engine: str = "cycle") -> Verdict:
    """Acceptance of ``seq`` starting from an arbitrary reachable configuration."""
    check_configuration(model, start)
    seq = list(seq)
    if engine == "cycle":
        return _cycle(model, start, seq)
    if engine == "event":
        return _event(model, start, seq)
    raise ValueError(f"unknown engine {engine!r}")


def _cycle(model, start, seq):
    bad = _check_dates(seq, start)
    if bad is not None:
        return Verdict(False, start, bad)
    idx = _index(model)
    m = _Machine(idx, start)
    blocks = idx.blocks
    # end-of-previous-tick snapshot, refreshed only when something changed
    safe_states, safe_timers = dict(m.states), _ordered_timers(idx, m.timers)
    i, n = 0, len(seq)
    k = start.now
    while True:
        if i == n and not m.timers:
            return Verdict(True, Configuration(k, safe_states, safe_timers), None,
                           Configuration(k, dict(m.states), {}), tuple(m.trace))
        changed = False
        if m.timers:
            for b in blocks:
                tm = m.timers.get(b)
                if tm is not None and tm.fires_at == k:
                    m.fire(b, k)
                    changed = True
        while i < n and seq[i].t == k:
            cause, _ = m.dispatch(seq[i], k)
            if cause is not None:
                return _reject(m, cause, safe_states, safe_timers, k)
            changed = True
            i += 1
        cause = m.check_invariants(k)
        if cause is not None:
            return _reject(m, cause, safe_states, safe_timers, k)
        if changed:
            safe_states, safe_timers = dict(m.states), _ordered_timers(idx, m.timers)
        k += 1


def verify_event(model: Model, seq: Sequence[TimedTelecommand]) -> Verdict:
    """Discrete-event acceptance of ``seq``; same contract as :func:`verify`."""
    return _event(model, initial_configuration(model), list(seq))


def verify_event_from(model: Model, start: Configuration,
                      seq: Sequence[TimedTelecommand]) -> Verdict:
    return verify_from(model, start, seq, engine="event")


def _event(model, start, seq):
    bad = _check_dates(seq, start)
    if bad is not None:
        return Verdict(False, start, bad)
    idx = _index(model)
    order = idx.order
    m = _Machine(idx, start)
    queue = [(tm.fires_at, order[b], tm) for b, tm in m.timers.items()]
    heapq.heapify(queue)
    safe_states, safe_timers = dict(m.states), _ordered_timers(idx, m.timers)
    i, n = 0, len(seq)
    now = start.now
    if i == n and not m.timers:
        return Verdict(True, start, None, Configuration(now, dict(m.states), {}), ())
    k = now  # the starting tick is always an instant: invariants are checked there
    while True:
        while queue and queue[0][0] == k:
            _, _, tm = heapq.heappop(queue)
            armed = m.fire(tm.block, k)
            if armed is not None:
                heapq.heappush(queue, (armed.fires_at, order[armed.block], armed))
        while i < n and seq[i].t == k:
            cause, armed = m.dispatch(seq[i], k)
            if cause is not None:
                return _reject(m, cause, safe_states, safe_timers, k)
            heapq.heappush(queue, (armed.fires_at, order[armed.block], armed))
            i += 1
        # states are constant until the next instant, so checking here covers
        # every tick up to it
        cause = m.check_invariants(k)
        if cause is not None:
            return _reject(m, cause, safe_states, safe_timers, k)
        safe_states, safe_timers = dict(m.states), _ordered_timers(idx, m.timers)
        if i == n and not m.timers:
            return Verdict(True, Configuration(k + 1, safe_states, safe_timers), None,
                           Configuration(k + 1, dict(m.states), {}), tuple(m.trace))
        nxt = queue[0][0] if queue else MAX_TICK + 1
        if i < n:
            nxt = min(nxt, seq[i].t)
        k = nxt


def _tc_alphabet(model: Model, deltas):
    out = []
    for name in sorted(model.tc_map):
        _, t = model.tc_map[name]
        if t.param is None:
            out.append((name, None))
        else:
            out.extend((name, d) for d in sorted(set(deltas)))
    return out


def _seq_key(item):
    seq, _ = item
    return (len(seq), tuple(tc.t for tc in seq), tuple(tc.name for tc in seq),
            tuple(tc.delta or 0 for tc in seq))


def enumerate_min_errors(model: Model, max_tcs: int, max_gap: int,
                         deltas: Iterable[int], limit: int = 200_000):
    """All minimal rejected sequences within the given bounds.

    Sequences start at tick 0, consecutive dates differ by at most ``max_gap``
    and delta TCs take their value from ``deltas``. A rejected sequence is
    minimal when dropping its last TC yields an accepted sequence.

    Acceptance is not prefix-closed: a TC dispatched at tick ``j`` can arm a
    timer that satisfies an invariant failing at some tick ``k >= j``. The
    search therefore also extends sequences rejected by an invariant at a
    tick ``k`` no earlier than their last date, with TCs dated up to ``k``.
    Any other failure is permanent for every extension.

    Raises :class:`SearchOverflowError` when the next level would hold more
    than ``limit`` candidate sequences.
    """
    deltas = list(deltas)
    if not deltas:
        raise ValueError("at least one delta value is required")
    if max_tcs < 1:
        return []
    alphabet = _tc_alphabet(model, deltas)
    found = []
    frontier = [((), True, 0)]  # (sequence, accepted, latest useful date)
    for depth in range(max_tcs):
        dates_of = []
        for prefix, _, latest in frontier:
            lo = prefix[-1].t if prefix else 0
            hi = min(lo + max_gap, latest) if prefix else 0
            dates_of.append(range(lo, hi + 1))
        width = sum(len(d) for d in dates_of) * len(alphabet)
        if width > limit:
            raise SearchOverflowError(width, limit)
        nxt = []
        for (prefix, accepted, _), dates in zip(frontier, dates_of):
            for t, (name, delta) in itertools.product(dates, alphabet):
                seq = prefix + (TimedTelecommand(name, t, delta),)
                v = verify_event(model, seq)
                if v.accepted:
                    nxt.append((seq, True, MAX_TICK))
                    continue
                if accepted:
                    found.append((seq, v.cause))
                cause = v.cause
                if cause.kind is CauseKind.INVARIANT_VIOLATION and cause.tick >= t:
                    nxt.append((seq, False, cause.tick))
        frontier = nxt
        if not frontier:
            break
    found.sort(key=_seq_key)
    return found
