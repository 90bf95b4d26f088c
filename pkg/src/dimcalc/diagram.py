"""Formula Diagram rendering as DOT text.

One node per variable: triangles are data, boxes are inputs, circles are
calculated variables, ellipses are outputs. Arrows run from operand to
the variable it helps define; an arrow carrying a SUM aggregation is
labeled. Variables sharing a non-empty dimension set sit in one
dash-bordered cluster whose label names the dimensions; dimensionless
variables sit outside all clusters.

Output is byte-deterministic for a given model and config.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import EMPTY_DIMS, Expr, Model, Variable, VariableKind, \
    ValueTable, iter_dependencies
from .parser import format_number

_SHAPE = {
    VariableKind.DATA: "triangle",
    VariableKind.INPUT: "box",
    VariableKind.CALCULATED: "circle",
    VariableKind.OUTPUT: "ellipse",
}


@dataclass(frozen=True)
class DiagramConfig:
    group_by_dimension_set: bool = True
    include_data_values: bool = False


def _quote(text: str) -> str:
    escaped = text.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def _node_line(var: Variable, config: DiagramConfig) -> str:
    attrs = [f"shape={_SHAPE[var.kind]}"]
    if (config.include_data_values and var.kind is VariableKind.DATA
            and isinstance(var.payload, ValueTable)):
        values = ", ".join(format_number(v) for _, v in var.payload.entries)
        name = var.name.replace("\\", "\\\\").replace('"', '\\"')
        attrs.append(f'label="{name}\\n{values}"')
    return f"{_quote(var.name)} [{', '.join(attrs)}];"


def emit_dot(model: Model, config: DiagramConfig = DiagramConfig()) -> str:
    lines = ["digraph model {"]

    if config.group_by_dimension_set:
        groups: dict = {}
        for var in model.variables:
            groups.setdefault(var.dims, []).append(var)
        clustered = sorted(
            (dims for dims in groups if len(dims) > 0),
            key=lambda d: (len(d.order), d.order))
        for number, dims in enumerate(clustered):
            lines.append(f"  subgraph cluster_{number} {{")
            lines.append(f"    label = {_quote(str(dims))};")
            lines.append("    style = dashed;")
            for var in groups[dims]:
                lines.append("    " + _node_line(var, config))
            lines.append("  }")
        top_level = groups.get(EMPTY_DIMS, [])
    else:
        top_level = list(model.variables)
    for var in top_level:
        lines.append("  " + _node_line(var, config))

    edges = []  # (source, target) in first-appearance order
    sum_edges = set()
    seen = set()
    for var in model.variables:
        if isinstance(var.payload, Expr):
            for name, via_sum in iter_dependencies(var.payload):
                key = (name, var.name)
                if key not in seen:
                    seen.add(key)
                    edges.append(key)
                if via_sum:
                    sum_edges.add(key)
    for source, target in edges:
        label = ' [label="SUM"]' if (source, target) in sum_edges else ""
        lines.append(f"  {_quote(source)} -> {_quote(target)}{label};")

    lines.append("}")
    return "\n".join(lines) + "\n"
