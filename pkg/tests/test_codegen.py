import re
from pathlib import Path

import pytest

from csm.codegen import CodegenError, emit_graph, emit_sync_program
from csm.model import Model
from csm.parser import parse_csm

GOLDEN = Path(__file__).parent / "golden"


def cluster(doc, name):
    m = re.search(r"subgraph cluster_%s \{\n(.*?)\n  \}" % name, doc, re.S)
    return m.group(1).splitlines()


def node_lines(lines):
    return [ln for ln in lines if "->" not in ln and ln.strip().startswith('"')]


def edge_lines(lines):
    return [ln for ln in lines if "->" in ln]


@pytest.mark.parametrize("name", ["minisat", "fullsat"])
def test_golden_files(name, request):
    model = request.getfixturevalue(name)
    assert emit_graph(model) == (GOLDEN / f"{name}.dot").read_text()
    assert emit_sync_program(model).text == (GOLDEN / f"{name}.lus").read_text()


def test_modulator_cluster(minisat):
    lines = cluster(emit_graph(minisat), "MODULATOR")
    nodes = node_lines(lines)
    assert [re.search(r'label="(\w+)', n).group(1) for n in nodes] == [
        "OFF", "WAITON", "ON", "WAITOFF"]
    assert "bold" in nodes[0] and all("bold" not in n for n in nodes[1:])
    assert all("dashed" in n for n in nodes if "WAIT" in n)
    edges = edge_lines(lines)
    assert sum("style=solid" in e for e in edges) == 2
    assert sum("style=dotted" in e for e in edges) == 2
    assert 'label="MODULON [AMPLIFIER:ON]"' in edges[0]


def test_erase_cluster(minisat):
    lines = cluster(emit_graph(minisat), "ERASE")
    assert len(node_lines(lines)) == 4
    edges = edge_lines(lines)
    assert edges[2:] == [
        '    "ERASE.IDLE" -> "ERASE.WAIT" [label="CLEARFILE(DELTA)", style=solid];',
        '    "ERASE.WAIT" -> "ERASE.CLEAR" [label="DURATION_CLEARFILE", style=dotted];',
        '    "ERASE.CLEAR" -> "ERASE.IDLE" [label="DELTA", style=dotted];',
    ]
    assert any('"ERASE.CLEAR" [label="CLEAR\\n[MEMORY:ON]"' in ln for ln in lines)
    assert "REQ_DEL_01, REQ_DEL_02" in lines[0]


def test_empty_graph():
    doc = emit_graph(Model())
    assert doc.startswith("digraph CSM {") and doc.rstrip().endswith("}")
    assert "cluster" not in doc


@pytest.mark.parametrize("name", ["minisat", "fullsat"])
def test_graph_counts(name, request):
    model = request.getfixturevalue(name)
    doc = emit_graph(model)
    n_nodes = sum(len(b.steady_states) + len(b.transient_states) for b in model.blocks)
    transitions = [t for b in model.blocks for t in b.transitions]
    all_lines = doc.splitlines()
    assert len(node_lines(all_lines)) == n_nodes
    assert sum("style=solid];" in ln for ln in all_lines) == len(transitions)
    assert sum("style=dotted" in ln for ln in all_lines) == sum(
        len(t.path) - 2 for t in transitions)
    assert doc.count("subgraph cluster_") == len(model.blocks)


def test_sync_structure(minisat):
    prog = emit_sync_program(minisat)
    assert prog.nodes == ("MODULATOR", "ERASE", "AMPLIFIER", "MEMORY", "OBSW")
    assert ("node MODULATOR(modulon: bool; moduloff: bool)\n"
            "returns (state: t_MODULATOR; error: bool);") in prog.text
    assert "node ERASE(delfile: bool; clearfile: bool; clearfile_delta: int)" in prog.text
    assert "clearfile_held = if clearfile then clearfile_delta" in prog.text


@pytest.mark.parametrize("name", ["minisat", "fullsat"])
def test_sync_every_tc_is_one_input(name, request):
    model = request.getfixturevalue(name)
    text = emit_sync_program(model).text
    headers = re.findall(r"^node (\w+)\((.*)\)$", text, re.M)
    block_inputs = [h for h in headers if h[0] != "OBSW"]
    assert [h[0] for h in block_inputs] == [b.name for b in model.blocks]
    for b in model.blocks:
        for t in b.transitions:
            owners = [n for n, ins in block_inputs if f"{t.tc_name.lower()}: bool" in ins.split("; ")]
            assert owners == [b.name]
    obsw = text[text.index("node OBSW"):]
    for g in model.guards:
        assert f"guard ({g.tc_name}) {g.condition}" in obsw
    for inv in model.invariants:
        assert f"inv ({inv.block}.{inv.state}) {inv.condition}" in obsw


def test_sync_empty_model():
    prog = emit_sync_program(Model())
    assert prog.nodes == ("OBSW",)
    assert "global_error = false;" in prog.text


def test_deterministic(fullsat):
    assert emit_graph(fullsat) == emit_graph(fullsat)
    assert emit_sync_program(fullsat) == emit_sync_program(fullsat)


def test_mangling_collision():
    model = parse_csm("block X := init (S) tc Go (S,W,S) {1} tc GO (S,V,S) {1}")
    with pytest.raises(CodegenError):
        emit_sync_program(model)
    model = parse_csm("block X := init (S) tc TIMER (S,W,S) {1}")
    with pytest.raises(CodegenError):
        emit_sync_program(model)
