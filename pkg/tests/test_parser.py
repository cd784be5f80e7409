import pytest
from hypothesis import given, settings

from csm.model import Block, Model
from csm.parser import ParseError, parse_csm, print_csm, tokenize

from conftest import fixture_text
from randmodels import random_model


def test_listing1(listing1_text):
    m = parse_csm(listing1_text)
    assert {c.name: c.value for c in m.consts} == {
        "DURATION_MODULON": 2, "DURATION_MODULOFF": 3,
        "DURATION_DELFILE": 1, "DURATION_CLEARFILE": 1}
    mod, erase = m.blocks
    assert (mod.name, mod.initial, len(mod.transitions)) == ("MODULATOR", "OFF", 2)
    assert (erase.name, erase.initial) == ("ERASE", "IDLE")
    assert [t.param for t in erase.transitions] == [None, "DELTA"]
    assert erase.transitions[1].durations == ("DURATION_CLEARFILE", "DELTA")
    assert [(g.tc_name, str(g.condition)) for g in m.guards] == [
        ("MODULON", "[AMPLIFIER:ON]"), ("DELFILE", "[MEMORY:ON]")]
    assert [(i.block, i.state, str(i.condition)) for i in m.invariants] == [
        ("ERASE", "CLEAR", "[MEMORY:ON]")]
    assert mod.requirement_tags == ("REQ_DOWN_02", "REQ_DOWN_06")
    assert erase.requirement_tags == ("REQ_DEL_01", "REQ_DEL_02")


def test_empty_input():
    assert parse_csm("") == Model()
    assert parse_csm("  # only a comment\n\n") == Model()


def test_short_path_is_a_parse_error():
    with pytest.raises(ParseError) as exc:
        parse_csm("block X := tc FOO (A,B) {1}")
    # init is mandatory before any item
    assert exc.value.span.column == 12


def test_two_state_path_rejected_at_closing_paren():
    with pytest.raises(ParseError) as exc:
        parse_csm("block X := init (A) tc FOO (A,B) {1}")
    err = exc.value
    assert (err.span.line, err.span.column) == (1, 32)
    assert "')'" in err.found and "three states" in err.expected


def test_parse_error_location():
    with pytest.raises(ParseError) as exc:
        parse_csm("const A 1\nblock X :=\n  init (S)\n  tc A (S,W,S) {1\n")
    assert exc.value.span.line == 5
    assert "end of input" in str(exc.value)


def test_nat_overflow():
    parse_csm(f"const A {2**32 - 1}")
    with pytest.raises(ParseError):
        parse_csm(f"const A {2**32}")


def test_bad_character():
    with pytest.raises(ParseError) as exc:
        parse_csm("const A 1\nconst B $")
    assert (exc.value.span.line, exc.value.span.column) == (2, 9)


def test_keywords_are_case_sensitive():
    with pytest.raises(ParseError):
        parse_csm("Block X := init (S)")


def test_only_req_tags_kept():
    m = parse_csm("# owner: ops\n# REQ_A_1, see REQ_B2 too\nblock X := init (S)")
    assert m.blocks[0].requirement_tags == ("REQ_A_1", "REQ_B2")


def test_spans_point_inside_input(listing1_text):
    lines = listing1_text.splitlines()
    m = parse_csm(listing1_text)
    nodes = [*m.consts, *m.blocks, *m.guards, *m.invariants]
    nodes += [t for b in m.blocks for t in b.transitions]
    for node in nodes:
        line = lines[node.span.line - 1]
        assert 1 <= node.span.column <= len(line)


def test_parse_is_deterministic(listing1_text):
    assert parse_csm(listing1_text) == parse_csm(listing1_text)


@pytest.mark.parametrize("name", ["listing1.csm", "minisat.csm", "fullsat.csm"])
def test_roundtrip_fixtures(name):
    m = parse_csm(fixture_text(name))
    text = print_csm(m)
    assert parse_csm(text) == m
    assert print_csm(parse_csm(text)) == text


def test_print_empty():
    assert print_csm(Model()) == ""


def test_print_modulator_block(minisat):
    mod = minisat.block_map["MODULATOR"]
    alone = Model(blocks=(mod,), guards=minisat.guards_for("MODULON"))
    lines = [ln for ln in print_csm(alone).splitlines() if ln and not ln.startswith("#")]
    assert lines == [
        "block MODULATOR :=",
        "  init (OFF)",
        "  tc MODULON (OFF,WAITON,ON) {DURATION_MODULON}",
        "  tc MODULOFF (ON,WAITOFF,OFF) {DURATION_MODULOFF}",
        "  guard (MODULON) [AMPLIFIER:ON]",
    ]


def test_tokenize_keeps_comments():
    kinds = [t.kind for t in tokenize("# hi\nconst")]
    assert kinds == ["COMMENT", "const", "EOF"]


@settings(max_examples=200, deadline=None)
@given(seed=...)
def test_roundtrip_random_models(seed: int):
    import random
    m = random_model(random.Random(seed))
    assert parse_csm(print_csm(m)) == m


def test_block_without_items():
    m = parse_csm("block X := init (S)")
    assert m.blocks == (Block("X", "S"),)
