"""Graphviz rendering of a CSM model, one cluster per block.

Steady states are solid ellipses, transient states dashed, the initial state
bold. Telecommand edges are solid and labelled with the TC name and its
guards; timeout edges are dotted and labelled with their duration term.
"""

from __future__ import annotations

from ..model import Model

__all__ = ["emit_graph"]


def _q(s):
    # labels are built from identifiers and brackets; "\\n" is a Graphviz line break
    return '"' + str(s).replace('"', '\\"') + '"'


def _node(block, state):
    return _q(f"{block}.{state}")


def emit_graph(model: Model) -> str:
    out = ["digraph CSM {", "  compound=true;", "  node [shape=ellipse];"]
    for b in model.blocks:
        label = b.name
        if b.requirement_tags:
            label += "\\n" + ", ".join(b.requirement_tags)
        out.append(f"  subgraph cluster_{b.name} {{")
        out.append(f"    label={_q(label)};")
        for state in b.states:
            attrs = []
            text = state
            for inv in model.invariants_for(b.name, state):
                text += "\\n" + str(inv.condition)
            attrs.append(f"label={_q(text)}")
            style = "dashed" if b.is_transient(state) else "solid"
            if state == b.initial:
                style += ",bold"
                attrs.append("penwidth=3")
            attrs.append(f'style="{style}"')
            out.append(f"    {_node(b.name, state)} [{', '.join(attrs)}];")
        for t in b.transitions:
            label = t.tc_name
            if t.param is not None:
                label += f"({t.param})"
            for g in model.guards_for(t.tc_name):
                label += f" {g.condition}"
            out.append(f"    {_node(b.name, t.source)} -> {_node(b.name, t.path[1])} "
                       f"[label={_q(label)}, style=solid];")
            for src, dst, dur in zip(t.path[1:-1], t.path[2:], t.durations):
                out.append(f"    {_node(b.name, src)} -> {_node(b.name, dst)} "
                           f"[label={_q(dur)}, style=dotted];")
        out.append("  }")
    out.append("}")
    return "\n".join(out) + "\n"
