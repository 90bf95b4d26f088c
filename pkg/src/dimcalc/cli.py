"""Command-line interface.

Subcommands: check (static verification), eval (compute and export CSV),
diagram (DOT dependency graph), explain (describe one variable).

Exit codes: 0 success, 1 parse or check errors, 2 evaluation error,
3 usage error. Diagnostics go to stderr; results go to stdout or files.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .checker import CheckedModel, CheckFailure, check_model
from .diagram import DiagramConfig, emit_dot
from .evaluator import EvalError, InputOverride, evaluate, tensor_to_rows
from .model import Expr, ModelError, ValueTable, VariableKind, iter_dependencies
from .parser import ParseFailure, format_expr, format_number, parse_model

_KIND_LABEL = {
    VariableKind.INPUT: "Input",
    VariableKind.DATA: "Data",
    VariableKind.CALCULATED: "Calculated",
    VariableKind.OUTPUT: "Output",
}


class _Usage(Exception):
    """Bad invocation; maps to exit code 3."""


class _Failed(Exception):
    def __init__(self, code: int):
        self.code = code


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(f"{self.prog}: {message}")


def _print_diagnostics(diagnostics, as_json: bool):
    if as_json:
        print(json.dumps([d.as_json() for d in diagnostics], indent=2),
              file=sys.stderr)
    else:
        for d in diagnostics:
            print(d.render(), file=sys.stderr)


def _load_checked(path: str, as_json: bool) -> CheckedModel:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise _Usage(f"cannot read {path}: {e.strerror or e}") from None
    try:
        model = parse_model(text, path)
        checked = check_model(model)
    except (ParseFailure, CheckFailure) as e:
        _print_diagnostics(e.diagnostics, as_json)
        raise _Failed(1) from None
    if checked.warnings:
        _print_diagnostics(checked.warnings, as_json)
    return checked


def _cmd_check(args) -> int:
    checked = _load_checked(args.model, args.json)
    model = checked.model
    for dim in model.dimensions:
        print(f"dimension {dim.name}: {len(dim.instances)} instances")
    print(f"{len(model.variables)} variables, {len(model.dimensions)} "
          f"dimensions, OK")
    return 0


def _parse_set(text: str) -> InputOverride:
    head, eq, raw_value = text.partition("=")
    if not eq:
        raise _Usage(f"--set takes NAME=value or NAME[labels]=value, "
                     f"got {text!r}")
    head = head.strip()
    labels = None
    if head.endswith("]"):
        name, bracket, rest = head.partition("[")
        if not bracket:
            raise _Usage(f"--set: malformed cell address {head!r}")
        labels = tuple(part.strip() for part in rest[:-1].split(","))
        head = name.strip()
    try:
        value = float(raw_value)
    except ValueError:
        raise _Usage(f"--set {head}: {raw_value!r} is not a number") from None
    return InputOverride(head, labels, value)


def _write_csv(directory: Path, name: str, tensor, model) -> None:
    with open(directory / f"{name}.csv", "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow([*tensor.dims.names, "value"])
        for labels, value in tensor_to_rows(tensor, model):
            writer.writerow([*labels, format_number(value)])


def _cmd_eval(args) -> int:
    checked = _load_checked(args.model, args.json)
    model = checked.model
    overrides = [_parse_set(s) for s in args.set or []]
    selected = args.var or []
    for name in selected:
        if not model.has_variable(name):
            raise _Usage(f"no variable named {name}")
    try:
        result = evaluate(checked, overrides)
    except (ValueError, ModelError) as e:
        # bad override target or label: an invocation problem
        raise _Usage(str(e)) from None
    except EvalError as e:
        print(str(e), file=sys.stderr)
        return 2

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if selected:
        for name in selected:
            tensor = result[name]
            _write_csv(out_dir, name, tensor, model)
            if not tensor.dims.names:
                print(f"{name} = {format_number(tensor.values[0])}")
    else:
        for var in model.variables:
            if var.kind is not VariableKind.OUTPUT:
                continue
            tensor = result[var.name]
            if tensor.dims.names:
                _write_csv(out_dir, var.name, tensor, model)
            else:
                print(f"{var.name} = {format_number(tensor.values[0])}")
    return 0


def _cmd_diagram(args) -> int:
    checked = _load_checked(args.model, args.json)
    config = DiagramConfig(group_by_dimension_set=not args.no_group,
                           include_data_values=args.data_values)
    dot = emit_dot(checked.model, config)
    if args.out == "-":
        print(dot, end="")
    else:
        Path(args.out).write_text(dot, encoding="utf-8")
    return 0


def _cmd_explain(args) -> int:
    checked = _load_checked(args.model, args.json)
    model = checked.model
    if not model.has_variable(args.variable):
        raise _Usage(f"no variable named {args.variable}")
    var = model.variable(args.variable)

    line = _KIND_LABEL[var.kind]
    line += f" over {var.dims}" if var.dims.names else ", dimensionless"
    if var.payload is None:
        line += ", no default value"
    elif isinstance(var.payload, ValueTable):
        if var.dims.names:
            line += f", {len(var.payload.entries)} values"
        else:
            line += f", value {format_number(var.payload.scalar)}"
    else:
        line += f" = {format_expr(var.payload)}"

    uses = _direct_deps(var)
    if uses:
        line += f"; uses: {', '.join(uses)}"
    used_by = [w.name for w in model.variables if var.name in _direct_deps(w)]
    if used_by:
        line += f"; used by: {', '.join(used_by)}"
    print(line)
    return 0


def _direct_deps(var) -> list:
    deps: list = []
    if isinstance(var.payload, Expr):
        for name, _ in iter_dependencies(var.payload):
            if name not in deps:
                deps.append(name)
    return deps


def _build_parser() -> _ArgumentParser:
    parser = _ArgumentParser(
        prog="dimcalc",
        description="Check, evaluate, and diagram multidimensional "
                    "calculation models (.dml files).")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="verify a model and report diagnostics")
    p.add_argument("model", help="path to a .dml file")
    p.add_argument("--json", action="store_true",
                   help="render diagnostics as a JSON array")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("eval", help="evaluate a model and export CSV tables")
    p.add_argument("model", help="path to a .dml file")
    p.add_argument("--set", action="append", metavar="NAME=VALUE",
                   help="override an input (NAME=value or NAME[labels]=value); "
                        "repeatable")
    p.add_argument("--var", action="append", metavar="NAME",
                   help="variable to export (default: every output variable)")
    p.add_argument("-o", "--out-dir", default=".",
                   help="directory for CSV files (default: current)")
    p.add_argument("--json", action="store_true",
                   help="render diagnostics as a JSON array")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("diagram", help="emit a DOT dependency diagram")
    p.add_argument("model", help="path to a .dml file")
    p.add_argument("-o", "--out", default="-",
                   help="output file, or - for stdout (default)")
    p.add_argument("--no-group", action="store_true",
                   help="do not cluster variables by dimension set")
    p.add_argument("--data-values", action="store_true",
                   help="append literal values to data-node labels")
    p.add_argument("--json", action="store_true",
                   help="render diagnostics as a JSON array")
    p.set_defaults(func=_cmd_diagram)

    p = sub.add_parser("explain", help="describe one variable")
    p.add_argument("model", help="path to a .dml file")
    p.add_argument("variable", help="variable name")
    p.add_argument("--json", action="store_true",
                   help="render diagnostics as a JSON array")
    p.set_defaults(func=_cmd_explain)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _Usage as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except _Failed as e:
        return e.code


if __name__ == "__main__":
    sys.exit(main())
