"""Command-line interface: ``csm check|verify|dot|sync|expand|enum-errors``.

Exit status: 0 success/accepted, 1 sequence rejected, 2 model validation
failed, 3 parse error, 4 I/O or usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .codegen import CodegenError, emit_graph, emit_sync_program
from .formats import (
    SequenceFormatError,
    config_from_dict,
    cause_to_dict,
    format_sequence,
    read_sequence,
    verdict_to_dict,
)
from .interp import (
    ConfigurationError,
    SearchOverflowError,
    TickOverflowError,
    enumerate_min_errors,
    initial_configuration,
    verify_from,
)
from .model import Model, check_model
from .parser import ParseError, parse_file
from .stc import StcError, StcRequest, admit, expand_stc, load_templates, merge_plans

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_INVALID = 2
EXIT_PARSE = 3
EXIT_USAGE = 4


class _Exit(Exception):
    def __init__(self, code, message=None):
        self.code = code
        self.message = message


def _err(msg):
    print(msg, file=sys.stderr)


def _load_model(path, allow_empty=False) -> Model:
    try:
        model = parse_file(path)
    except OSError as exc:
        raise _Exit(EXIT_USAGE, f"cannot read {path}: {exc.strerror}") from None
    except UnicodeDecodeError as exc:
        raise _Exit(EXIT_PARSE, f"{path}: not UTF-8 text ({exc.reason})") from None
    except ParseError as exc:
        raise _Exit(EXIT_PARSE, str(exc)) from None
    diags = check_model(model)
    if allow_empty:
        diags = [d for d in diags if d.code != "E000"]
    if diags:
        for d in diags:
            _err(str(d))
        raise _Exit(EXIT_INVALID, f"{path}: {len(diags)} error(s)")
    return model


def _load_sequence(path):
    try:
        return read_sequence(path)
    except OSError as exc:
        raise _Exit(EXIT_USAGE, f"cannot read {path}: {exc.strerror}") from None
    except SequenceFormatError as exc:
        raise _Exit(EXIT_USAGE, str(exc)) from None


def _load_config(model, path):
    if path is None:
        return initial_configuration(model)
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        # accept a whole verdict document and pick its final configuration
        if isinstance(data, dict) and "schema" in data and "final" in data:
            data = data["final"] or data["last_safe"]
        return config_from_dict(data)
    except OSError as exc:
        raise _Exit(EXIT_USAGE, f"cannot read {path}: {exc.strerror}") from None
    except ValueError as exc:
        raise _Exit(EXIT_USAGE, f"{path}: {exc}") from None


def _plural(n, word):
    return f"{n} {word}" if n == 1 else f"{n} {word}s"


def cmd_check(args):
    model = _load_model(args.model)
    transitions = [t for b in model.blocks for t in b.transitions]
    n_tcd = sum(t.param is not None for t in transitions)
    print(f"{_plural(len(model.blocks), 'block')}, {len(transitions) - n_tcd} TCs+{n_tcd} TCD, "
          f"{_plural(len(model.guards), 'guard')}, "
          f"{_plural(len(model.invariants), 'invariant')}")
    return EXIT_OK


def _run_verify(model, start, seq, engine):
    try:
        return verify_from(model, start, seq, engine=engine)
    except ConfigurationError as exc:
        raise _Exit(EXIT_USAGE, f"inconsistent start configuration: {exc}") from None
    except TickOverflowError as exc:
        raise _Exit(EXIT_USAGE, str(exc)) from None


def _report(verdict, as_json, stream=None):
    stream = stream or sys.stdout
    if as_json:
        print(json.dumps(verdict_to_dict(verdict), indent=2), file=stream)
    else:
        print(verdict.summary(), file=stream)
    return EXIT_OK if verdict.accepted else EXIT_REJECTED


def cmd_verify(args):
    model = _load_model(args.model)
    seq = _load_sequence(args.sequence)
    start = _load_config(model, args.start)
    return _report(_run_verify(model, start, seq, args.engine), args.json)


def _write(out_path, text):
    if out_path is None or out_path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise _Exit(EXIT_USAGE, f"cannot write {out_path}: {exc.strerror}") from None


def cmd_dot(args):
    model = _load_model(args.model, allow_empty=True)
    _write(args.output, emit_graph(model))
    return EXIT_OK


def cmd_sync(args):
    model = _load_model(args.model, allow_empty=True)
    try:
        program = emit_sync_program(model)
    except CodegenError as exc:
        raise _Exit(EXIT_INVALID, str(exc)) from None
    _write(args.output, program.text)
    return EXIT_OK


def _bindings(items):
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep or not value.isdigit():
            raise _Exit(EXIT_USAGE, f"bad binding {item!r}, expected NAME=<nat>")
        out[key] = int(value)
    return out


def cmd_expand(args):
    model = _load_model(args.model)
    try:
        templates = load_templates(args.templates)
        seq = expand_stc(model, templates, StcRequest(args.stc, args.t0, _bindings(args.bind)))
    except OSError as exc:
        raise _Exit(EXIT_USAGE, f"cannot read {args.templates}: {exc.strerror}") from None
    except (StcError, json.JSONDecodeError) as exc:
        raise _Exit(EXIT_USAGE, str(exc)) from None
    if args.merge:
        seq = merge_plans(_load_sequence(args.merge), seq)
    sys.stdout.write(format_sequence(seq))
    if not args.admit:
        return EXIT_OK
    start = _load_config(model, args.start)
    try:
        verdict = admit(model, start, seq)
    except ConfigurationError as exc:
        raise _Exit(EXIT_USAGE, f"inconsistent start configuration: {exc}") from None
    return _report(verdict, False, sys.stderr)


def _deltas(text):
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated naturals, got {text!r}")
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("deltas must be a non-empty list of values >= 1")
    return values


def cmd_enum_errors(args):
    model = _load_model(args.model)
    try:
        found = enumerate_min_errors(model, args.max_tcs, args.max_gap, args.deltas,
                                     limit=args.limit)
    except SearchOverflowError as exc:
        _err(f"frontier size: {exc.frontier_size}, limit: {exc.limit}")
        raise _Exit(EXIT_USAGE, str(exc)) from None
    if args.json:
        doc = [{"sequence": [str(tc) for tc in seq], "cause": cause_to_dict(cause)}
               for seq, cause in found]
        print(json.dumps(doc, indent=2))
    else:
        for seq, cause in found:
            print("; ".join(str(tc) for tc in seq) + " -> " + cause.describe())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="csm", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="parse and validate a model")
    c.add_argument("model")
    c.set_defaults(func=cmd_check)

    c = sub.add_parser("verify", help="verify a TC sequence against a model")
    c.add_argument("model")
    c.add_argument("sequence")
    c.add_argument("--engine", choices=("cycle", "event"), default="cycle")
    c.add_argument("--from", dest="start", metavar="CONFIG",
                   help="start configuration (JSON, as in a verdict's final field)")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_verify)

    for name, func, what in (("dot", cmd_dot, "Graphviz graph"),
                             ("sync", cmd_sync, "Lustre program")):
        c = sub.add_parser(name, help=f"emit the {what} of a model")
        c.add_argument("model")
        c.add_argument("-o", "--output", help="output file (default: stdout)")
        c.set_defaults(func=func)

    c = sub.add_parser("expand", help="expand an STC request into a TC sequence")
    c.add_argument("model")
    c.add_argument("templates")
    c.add_argument("--stc", required=True)
    c.add_argument("--t0", type=int, required=True)
    c.add_argument("--bind", action="append", metavar="NAME=VALUE")
    c.add_argument("--merge", metavar="PLAN", help="existing plan to merge into")
    c.add_argument("--admit", action="store_true", help="verify the resulting plan")
    c.add_argument("--from", dest="start", metavar="CONFIG")
    c.set_defaults(func=cmd_expand)

    c = sub.add_parser("enum-errors", help="enumerate minimal error sequences")
    c.add_argument("model")
    c.add_argument("--max-tcs", type=int, default=1)
    c.add_argument("--max-gap", type=int, default=0)
    c.add_argument("--deltas", type=_deltas, default=[1])
    c.add_argument("--limit", type=int, default=200_000,
                   help="maximum candidate sequences per search level")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_enum_errors)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, which would read as "invalid model"
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except _Exit as exc:
        if exc.message:
            _err(exc.message)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
