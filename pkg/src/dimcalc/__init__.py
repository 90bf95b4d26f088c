"""Engine for multidimensional calculation models.

Parse a Formula List (.dml), verify its dimension-set rules, evaluate
every variable, and render results as CSV tables or a DOT dependency
diagram.
"""

from .model import (
    Aggregate,
    Binary,
    Dimension,
    DimensionSet,
    EMPTY_DIMS,
    Expr,
    Literal,
    Model,
    ModelError,
    Ref,
    SourceSpan,
    Tensor,
    Unary,
    UnknownInstanceError,
    ValueTable,
    Variable,
    VariableKind,
    difference,
    enumerate_dimension_sets,
    intersect,
    is_subset,
    union,
)
from .parser import (
    ParseDiagnostic,
    ParseFailure,
    format_expr,
    format_number,
    parse_model,
    pretty_print,
)
from .checker import (
    CheckDiagnostic,
    CheckFailure,
    CheckedModel,
    check_model,
    infer_dims,
)
from .evaluator import (
    EvalError,
    EvaluationResult,
    InputOverride,
    broadcast_lookup,
    evaluate,
    tensor_to_rows,
)
from .diagram import DiagramConfig, emit_dot

__all__ = [
    "Aggregate", "Binary", "Dimension", "DimensionSet", "EMPTY_DIMS", "Expr",
    "Literal", "Model", "ModelError", "Ref", "SourceSpan", "Tensor", "Unary",
    "UnknownInstanceError", "ValueTable", "Variable", "VariableKind",
    "difference", "enumerate_dimension_sets", "intersect", "is_subset", "union",
    "ParseDiagnostic", "ParseFailure", "format_expr", "format_number",
    "parse_model", "pretty_print",
    "CheckDiagnostic", "CheckFailure", "CheckedModel", "check_model",
    "infer_dims",
    "EvalError", "EvaluationResult", "InputOverride", "broadcast_lookup",
    "evaluate", "tensor_to_rows",
    "DiagramConfig", "emit_dot",
]
