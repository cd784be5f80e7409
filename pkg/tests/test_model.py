import pytest

from csm.model import (
    DeltaError,
    ModelError,
    TransitionKind,
    check_model,
    lookup_tc,
    total_duration,
    validate_model,
)
from csm.parser import parse_csm


def codes(text):
    return [d.code for d in check_model(parse_csm(text))]


def test_minisat_shape(minisat):
    assert [b.name for b in minisat.blocks] == ["MODULATOR", "ERASE", "AMPLIFIER", "MEMORY"]
    assert len(minisat.consts) >= 6
    assert len(minisat.guards) == 2
    assert len(minisat.invariants) == 1


def test_validation_is_idempotent(minisat, fullsat):
    for m in (minisat, fullsat):
        assert validate_model(m) is m
        assert check_model(m) == []


def test_steady_and_transient_partition(minisat):
    erase = minisat.block_map["ERASE"]
    assert erase.steady_states == ("IDLE",)
    assert erase.transient_states == ("DEL", "WAIT", "CLEAR")
    for b in minisat.blocks:
        assert not set(b.steady_states) & set(b.transient_states)


def test_empty_model_is_a_diagnostic():
    with pytest.raises(ModelError) as exc:
        validate_model(parse_csm(""))
    assert [d.code for d in exc.value.diagnostics] == ["E000"]


def test_shared_transient_state(listing1_text):
    text = listing1_text.replace(
        "  tc MODULOFF", "  tc MODULON2 (OFF,WAITON,ON) {DURATION_MODULON}\n  tc MODULOFF")
    assert "E010" in codes(text)


def test_all_diagnostics_reported_sorted():
    text = """
const A 1
const A 0
block X :=
  init (S)
  tc GO (S,W,S) {NOPE}
  tc GO (S,V,S) {1}
  tcd (D) RUN (S,U,S) {2}
  guard (GO) [Y:ON]
  inv (MISSING) [X:S]
"""
    diags = check_model(parse_csm(text))
    got = [d.code for d in diags]
    assert set(got) == {"E001", "E002", "E013", "E030", "E040", "E020", "E032"}
    lines = [(d.span.line, d.span.column) for d in diags]
    assert lines == sorted(lines)


@pytest.mark.parametrize("text, code", [
    ("block X := init (S) tc A (S,W,S) {1,1}", "E012"),
    ("block X := init (S) tc A (S,W,S) {0}", "E015"),
    ("block X := init (W) tc A (S,W,S) {1}", "E005"),
    ("block X := init (S) tc A (S,W,T) {1} tc B (W,U,S) {1}", "E011"),
    ("block X := init (S) tc A (S,W,W,S) {1,1}", "E010"),
    ("block X := init (S) tc A (S,W,S) {1} guard (A) [X:W]", "E021"),
    ("block X := init (S) tc A (S,W,S) {1} guard (A) [X:S, X:S]", "E022"),
    ("block X := init (S) tc A (S,W,S) {1} guard (B) [X:S]", "E031"),
    ("const D 1 block X := init (S) tcd (D) A (S,W,S) {D}", "E041"),
    ("block X := init (S) tc A (S,W,S) {1} block Y := init (S) guard (A) [X:S]", "E050"),
    ("block X := init (S) tc A (S,W,S) {1} block Y := init (S) inv (W) [X:S]", "E050"),
    ("block X := init (S) block X := init (T)", "E003"),
])
def test_single_rule(text, code):
    assert code in codes(text)


def test_lookup_tc(minisat):
    block, t = lookup_tc(minisat, "MODULON")
    assert block.name == "MODULATOR"
    assert t.kind is TransitionKind.FIXED and t.path == ("OFF", "WAITON", "ON")
    block, t = lookup_tc(minisat, "CLEARFILE")
    assert block.name == "ERASE"
    assert t.kind is TransitionKind.DELTA and t.param == "DELTA"
    assert lookup_tc(minisat, "NOSUCHTC") is None


def test_total_duration(minisat):
    _, modulon = lookup_tc(minisat, "MODULON")
    _, clearfile = lookup_tc(minisat, "CLEARFILE")
    assert total_duration(minisat, modulon) == 2
    assert total_duration(minisat, clearfile, 4) == 5
    assert total_duration(minisat, clearfile, 1) == 2
    with pytest.raises(DeltaError):
        total_duration(minisat, clearfile)
    with pytest.raises(DeltaError):
        total_duration(minisat, modulon, 3)


def test_total_duration_lower_bound(fullsat):
    for b in fullsat.blocks:
        for t in b.transitions:
            delta = 1 if t.param else None
            assert total_duration(fullsat, t, delta) >= len(t.path) - 2


def test_fullsat_fixture(fullsat):
    assert {b.name for b in fullsat.blocks} == {
        "INSTRUMENT", "COMPRESSOR", "MODULATOR", "AMPLIFIER", "MEMORY",
        "RECORD", "DOWNLOAD", "ERASE", "AOCS"}
    assert set(fullsat.block_map["AOCS"].steady_states) == {"GAP", "CAP", "SUP"}
    names = [t.tc_name for b in fullsat.blocks for t in b.transitions]
    assert len(names) == len(set(names))
