"""Property tests over random well-formed models and sequences."""

import random

from hypothesis import given, settings
from hypothesis import strategies as st

from csm.interp import (
    TimedTelecommand,
    check_configuration,
    initial_configuration,
    verify,
    verify_event,
    verify_from,
)
from csm.parser import parse_csm, print_csm

from oracle import simulate
from randmodels import random_model, random_sequence

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def case(seed):
    rng = random.Random(seed)
    model = random_model(rng)
    return model, random_sequence(rng, model)


@settings(max_examples=300, deadline=None)
@given(seeds)
def test_engines_agree_with_oracle(seed):
    model, s = case(seed)
    v = verify(model, s)
    assert verify_event(model, s) == v
    accepted, kind, tick, states, quiescent = simulate(model, s)
    assert v.accepted == accepted
    if accepted:
        assert v.final.block_states == states and v.quiescent_tick == quiescent
    else:
        assert (v.cause.kind.value, v.cause.tick) == (kind, tick)


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_verdict_configurations_are_consistent(seed):
    model, s = case(seed)
    v = verify(model, s)
    assert verify(model, s) == v
    assert verify_from(model, initial_configuration(model), s) == v
    check_configuration(model, v.last_safe)
    if v.accepted:
        check_configuration(model, v.final)
        assert v.final.quiescent and v.final == v.last_safe
    else:
        assert v.final is None and v.last_safe.now == v.cause.tick
    # trace entries are time-ordered and name real states
    assert [e[0] for e in v.trace] == sorted(e[0] for e in v.trace)
    for _, block, state in v.trace:
        assert state in model.block_map[block].states


@settings(max_examples=200, deadline=None)
@given(seeds, st.integers(min_value=1, max_value=30))
def test_rejection_ignores_later_tcs(seed, gap):
    model, s = case(seed)
    v = verify(model, s)
    if v.accepted or not model.blocks[0].transitions:
        return
    t = model.blocks[0].transitions[0]
    extra = TimedTelecommand(t.tc_name, max(v.cause.tick, s[-1].t if s else 0) + gap,
                             1 if t.param else None)
    assert verify(model, [*s, extra]) == v


@settings(max_examples=200, deadline=None)
@given(seeds, st.integers(min_value=0, max_value=20))
def test_resume_from_quiescent_prefix(seed, cut):
    model, s = case(seed)
    if not s:
        return
    i = cut % (len(s) + 1)
    head = verify(model, s[:i])
    if not head.accepted or (i < len(s) and head.final.now > s[i].t):
        return
    whole = verify(model, s)
    tail = verify_from(model, head.final, s[i:])
    assert tail.accepted == whole.accepted
    if whole.accepted:
        assert tail.final == whole.final
    else:
        assert tail.cause == whole.cause and tail.last_safe == whole.last_safe


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_print_parse_roundtrip(seed):
    model, _ = case(seed)
    text = print_csm(model)
    assert parse_csm(text) == model
    assert print_csm(parse_csm(text)) == text
