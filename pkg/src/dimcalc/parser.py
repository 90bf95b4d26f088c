"""Formula List DSL: tokenizer, parser, and pretty printer.

The DSL is line-oriented: one declaration per line, `#` starts a comment
that runs to end of line. Newlines inside (), [], {} groups do not end the
statement, so large value tables can be written one entry per line. The
full grammar is documented in README.md.

Parsing is total: any input text yields either a Model or a list of
ParseDiagnostic values carried by ParseFailure, never an exception from
the guts of the parser.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass

from .model import (
    Aggregate,
    Binary,
    Dimension,
    DimensionSet,
    Expr,
    Literal,
    Model,
    Ref,
    SourceSpan,
    Unary,
    ValueTable,
    Variable,
    VariableKind,
    _from_pairs,
)

KEYWORDS = frozenset({"dimension", "input", "data", "calc", "output", "over", "SUM"})

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUMBER_RE = re.compile(
    r"(?:[0-9]+(?:\.[0-9]*)?|\.[0-9]+)(?:[eE][+-]?[0-9]+)?")
_PUNCT = frozenset("=,:()[]{}+-*/^")


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: str  # "error" or "warning"
    code: str  # P-SYNTAX, P-TOKEN, P-NUMBER, P-DUPLICATE, P-UNDECLARED, P-TABLE
    message: str
    span: SourceSpan

    def render(self) -> str:
        return (f"{self.span.file}:{self.span.start_line}:{self.span.start_col}: "
                f"{self.severity}[{self.code}]: {self.message}")

    def as_json(self) -> dict:
        return {
            "severity": self.severity,
            "code": self.code,
            "message": self.message,
            "span": {
                "file": self.span.file,
                "start_line": self.span.start_line,
                "start_col": self.span.start_col,
                "end_line": self.span.end_line,
                "end_col": self.span.end_col,
            },
        }


class ParseFailure(Exception):
    """Raised by parse_model when the source contains errors."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(d.render() for d in self.diagnostics))


@dataclass(frozen=True)
class _Token:
    kind: str  # name, qname, number, punct, newline, eof
    text: str
    value: object
    line: int
    col: int
    end_line: int
    end_col: int


def _span(file: str, tok: _Token, end: _Token | None = None) -> SourceSpan:
    last = end or tok
    return SourceSpan(file, tok.line, tok.col, last.end_line, last.end_col)


def _tokenize(text: str, file: str, diags: list[ParseDiagnostic]) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    i, n = 0, len(text)
    depth = 0  # bracket depth; newlines inside groups are plain whitespace

    def emit(kind, text_, value, l0, c0):
        tokens.append(_Token(kind, text_, value, l0, c0, line, col))

    def err(code, msg, l0, c0):
        diags.append(ParseDiagnostic(
            "error", code, msg, SourceSpan(file, l0, c0, line, col)))

    while i < n:
        c = text[i]
        l0, c0 = line, col
        if c == "\n":
            i += 1
            line += 1
            col = 1
            if depth == 0:
                emit("newline", "\n", None, l0, c0)
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
                col += 1
            continue
        if c == '"':
            i += 1
            col += 1
            out = []
            closed = False
            while i < n and text[i] != "\n":
                ch = text[i]
                if ch == '"':
                    i += 1
                    col += 1
                    closed = True
                    break
                if ch == "\\":
                    if i + 1 < n and text[i + 1] in ('"', "\\"):
                        out.append(text[i + 1])
                        i += 2
                        col += 2
                        continue
                    err("P-TOKEN", "unsupported escape in quoted identifier "
                        "(only \\\" and \\\\ are recognized)", l0, c0)
                    i += 1
                    col += 1
                    continue
                out.append(ch)
                i += 1
                col += 1
            name = "".join(out)
            if not closed:
                err("P-TOKEN", "unterminated quoted identifier", l0, c0)
            elif not name:
                err("P-TOKEN", "empty quoted identifier", l0, c0)
            emit("qname", name, name, l0, c0)
            continue
        m = _IDENT_RE.match(text, i)
        if m:
            word = m.group()
            i = m.end()
            col += len(word)
            emit("name", word, word, l0, c0)
            continue
        m = _NUMBER_RE.match(text, i)
        if m:
            word = m.group()
            i = m.end()
            col += len(word)
            if i < n and text[i] == "%":
                i += 1
                col += 1
                err("P-NUMBER", f"percent literals are not supported; write the "
                    f"fraction instead ({word}% is {float(word) / 100})", l0, c0)
                emit("number", word, float(word), l0, c0)
                continue
            if i < n and (text[i].isalnum() or text[i] in "._"):
                bad = word
                while i < n and (text[i].isalnum() or text[i] in "._"):
                    bad += text[i]
                    i += 1
                    col += 1
                err("P-NUMBER", f"malformed number {bad!r}", l0, c0)
                continue
            emit("number", word, float(word), l0, c0)
            continue
        if c in _PUNCT:
            i += 1
            col += 1
            if c in "([{":
                depth += 1
            elif c in ")]}":
                depth = max(0, depth - 1)
            emit("punct", c, c, l0, c0)
            continue
        bad = ""
        while i < n and text[i] not in " \t\r\n#\"" and text[i] not in _PUNCT \
                and not _IDENT_RE.match(text, i) and not _NUMBER_RE.match(text, i):
            bad += text[i]
            i += 1
            col += 1
        err("P-TOKEN", f"unexpected character{'s' if len(bad) > 1 else ''} {bad!r}",
            l0, c0)
    tokens.append(_Token("eof", "", None, line, col, line, col))
    return tokens


class _StatementError(Exception):
    def __init__(self, diag: ParseDiagnostic):
        self.diag = diag


@dataclass
class _DimStmt:
    name: _Token
    labels: list[_Token]
    span: SourceSpan


@dataclass
class _VarStmt:
    kind: VariableKind
    name: _Token
    over: list[_Token] | None
    rhs_kind: str  # "expr", "table", "list", "none"
    rhs: object
    span: SourceSpan


class _Parser:
    def __init__(self, tokens: list[_Token], file: str, diags: list[ParseDiagnostic]):
        self.tokens = tokens
        self.file = file
        self.diags = diags
        self.pos = 0
        # names of variables whose declarations failed after the name was
        # read; kept so references to them do not cascade into P-UNDECLARED
        self.failed_names: set[str] = set()

    def _peek(self) -> _Token:
        return self.tokens[self.pos]

    def _next(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def _at_punct(self, *chars: str) -> bool:
        tok = self._peek()
        return tok.kind == "punct" and tok.text in chars

    def _fail(self, code: str, message: str, tok: _Token):
        raise _StatementError(ParseDiagnostic(
            "error", code, message, _span(self.file, tok)))

    def _expect_punct(self, char: str) -> _Token:
        tok = self._peek()
        if tok.kind == "punct" and tok.text == char:
            return self._next()
        self._fail("P-SYNTAX", f"expected {char!r}, got {_describe(tok)}", tok)

    def _expect_name(self, what: str) -> _Token:
        tok = self._peek()
        if tok.kind == "qname":
            return self._next()
        if tok.kind == "name":
            if tok.text in KEYWORDS:
                self._fail("P-SYNTAX",
                           f"{tok.text!r} is a reserved keyword and cannot be "
                           f"used as {what}", tok)
            return self._next()
        self._fail("P-SYNTAX", f"expected {what}, got {_describe(tok)}", tok)

    def _skip_line(self):
        while self._peek().kind not in ("newline", "eof"):
            self._next()

    def _end_statement(self):
        tok = self._peek()
        if tok.kind in ("newline", "eof"):
            return
        self._fail("P-SYNTAX", f"unexpected {_describe(tok)} after declaration", tok)

    def parse_statements(self) -> list:
        stmts = []
        while True:
            while self._peek().kind == "newline":
                self._next()
            if self._peek().kind == "eof":
                return stmts
            try:
                stmts.append(self._parse_statement())
            except _StatementError as e:
                self.diags.append(e.diag)
                self._skip_line()

    def _parse_statement(self):
        tok = self._peek()
        if tok.kind == "name" and tok.text == "dimension":
            return self._parse_dimension()
        if tok.kind == "name" and tok.text in ("input", "data", "calc", "output"):
            return self._parse_variable(VariableKind(tok.text))
        self._fail("P-SYNTAX",
                   "expected a declaration (dimension, input, data, calc, "
                   f"output), got {_describe(tok)}", tok)

    def _parse_dimension(self) -> _DimStmt:
        first = self._next()
        name = self._expect_name("a dimension name")
        self._expect_punct("=")
        self._expect_punct("[")
        labels = [self._expect_name("an instance label")]
        while self._at_punct(","):
            self._next()
            if self._at_punct("]"):
                break
            labels.append(self._expect_name("an instance label"))
        last = self._expect_punct("]")
        self._end_statement()
        return _DimStmt(name, labels, _span(self.file, first, last))

    def _parse_variable(self, kind: VariableKind) -> _VarStmt:
        first = self._next()
        name = self._expect_name("a variable name")
        try:
            over = None
            if self._peek().kind == "name" and self._peek().text == "over":
                self._next()
                self._expect_punct("(")
                over = [self._expect_name("a dimension name")]
                while self._at_punct(","):
                    self._next()
                    over.append(self._expect_name("a dimension name"))
                self._expect_punct(")")
            if not self._at_punct("="):
                if kind is VariableKind.INPUT:
                    self._end_statement()
                    return _VarStmt(kind, name, over, "none", None,
                                    _span(self.file, first, name))
                self._fail("P-SYNTAX",
                           f"{kind.value} {name.text} needs '=' and a "
                           f"{'formula' if kind.carries_formula else 'value'}",
                           self._peek())
            self._next()  # consume '='
            if self._at_punct("{"):
                rhs_kind, rhs = "table", self._parse_keyed_table()
            elif self._at_punct("["):
                rhs_kind, rhs = "list", self._parse_positional_list()
            else:
                rhs_kind, rhs = "expr", self._parse_expr()
            last = self.tokens[self.pos - 1]
            self._end_statement()
            return _VarStmt(kind, name, over, rhs_kind, rhs,
                            _span(self.file, first, last))
        except _StatementError:
            self.failed_names.add(name.text)
            raise

    def _parse_signed_number(self) -> tuple[float, SourceSpan]:
        first = self._peek()
        negate = False
        while self._at_punct("-"):
            self._next()
            negate = not negate
        tok = self._peek()
        if tok.kind != "number":
            self._fail("P-SYNTAX", f"expected a number, got {_describe(tok)}", tok)
        self._next()
        value = -tok.value if negate else tok.value
        return value, _span(self.file, first, tok)

    def _parse_keyed_table(self):
        self._expect_punct("{")
        if self._at_punct("}"):
            tok = self._next()
            self._fail("P-TABLE", "value table has no entries", tok)
        entries = []
        while True:
            key = [self._expect_name("an instance label")]
            while self._at_punct(","):
                self._next()
                key.append(self._expect_name("an instance label"))
            self._expect_punct(":")
            value, _ = self._parse_signed_number()
            entries.append((key, value))
            if self._at_punct(","):
                self._next()
                if not self._at_punct("}"):
                    continue
            self._expect_punct("}")
            return entries

    def _parse_positional_list(self):
        self._expect_punct("[")
        values = [self._parse_signed_number()]
        while self._at_punct(","):
            self._next()
            if self._at_punct("]"):
                break
            values.append(self._parse_signed_number())
        self._expect_punct("]")
        return values

    # Expression grammar, loosest to tightest:
    #   expr     := term (('+' | '-') term)*
    #   term     := unary (('*' | '/') unary)*
    #   unary    := '-' unary | power
    #   power    := atom ('^' exponent)*          left-associative
    #   exponent := '-' exponent | atom           a ^ -b means a^(-b)
    #   atom     := NUMBER | NAME | 'SUM' '(' NAME ')' | '(' expr ')'
    def _parse_expr(self) -> Expr:
        left = self._parse_term()
        while self._at_punct("+", "-"):
            op = self._next()
            right = self._parse_term()
            left = Binary(op.text, left, right, span=_merge(left.span, right.span))
        return left

    def _parse_term(self) -> Expr:
        left = self._parse_unary()
        while self._at_punct("*", "/"):
            op = self._next()
            right = self._parse_unary()
            left = Binary(op.text, left, right, span=_merge(left.span, right.span))
        return left

    def _parse_unary(self) -> Expr:
        if self._at_punct("-"):
            tok = self._next()
            operand = self._parse_unary()
            return _negate(operand, _merge(_span(self.file, tok), operand.span))
        return self._parse_power()

    def _parse_power(self) -> Expr:
        left = self._parse_atom()
        while self._at_punct("^"):
            self._next()
            right = self._parse_exponent()
            left = Binary("^", left, right, span=_merge(left.span, right.span))
        return left

    def _parse_exponent(self) -> Expr:
        if self._at_punct("-"):
            tok = self._next()
            operand = self._parse_exponent()
            return _negate(operand, _merge(_span(self.file, tok), operand.span))
        return self._parse_atom()

    def _parse_atom(self) -> Expr:
        tok = self._peek()
        if tok.kind == "number":
            self._next()
            return Literal(tok.value, span=_span(self.file, tok))
        if tok.kind == "punct" and tok.text == "(":
            self._next()
            inner = self._parse_expr()
            last = self._expect_punct(")")
            return _respan(inner, _merge(_span(self.file, tok), _span(self.file, last)))
        if tok.kind == "name" and tok.text == "SUM":
            self._next()
            self._expect_punct("(")
            arg = self._peek()
            if arg.kind == "name" and arg.text == "SUM":
                self._fail("P-SYNTAX", "SUM cannot be nested; aggregate the "
                           "inner variable in its own declaration", arg)
            source = self._expect_name("a variable name inside SUM(...)")
            if not self._at_punct(")"):
                self._fail("P-SYNTAX", "SUM takes a single variable name",
                           self._peek())
            last = self._next()
            return Aggregate("SUM", source.text,
                             span=_merge(_span(self.file, tok), _span(self.file, last)))
        if tok.kind in ("name", "qname"):
            name = self._expect_name("a variable name")
            return Ref(name.text, span=_span(self.file, name))
        self._fail("P-SYNTAX",
                   f"expected a number, variable, or '(', got {_describe(tok)}", tok)


def _describe(tok: _Token) -> str:
    if tok.kind == "eof":
        return "end of file"
    if tok.kind == "newline":
        return "end of line"
    return repr(tok.text)


def _merge(a: SourceSpan | None, b: SourceSpan | None) -> SourceSpan | None:
    if a is None or b is None:
        return a or b
    return SourceSpan(a.file, a.start_line, a.start_col, b.end_line, b.end_col)


def _negate(operand: Expr, span: SourceSpan | None) -> Expr:
    # fold '-' on a literal so that -5 round-trips as the literal -5
    if isinstance(operand, Literal):
        return Literal(-operand.value, span=span)
    return Unary("-", operand, span=span)


def _respan(expr: Expr, span: SourceSpan | None) -> Expr:
    cls = type(expr)
    fields = {f: getattr(expr, f) for f in expr.__dataclass_fields__}
    fields["span"] = span
    return cls(**fields)


def parse_model(text: str, file: str = "<input>") -> Model:
    """Parse DSL source into a Model.

    Raises ParseFailure carrying every diagnostic found; the parser
    recovers at statement boundaries so one bad line does not hide errors
    in the rest of the file.
    """
    diags: list[ParseDiagnostic] = []
    tokens = _tokenize(text, file, diags)
    parser = _Parser(tokens, file, diags)
    stmts = parser.parse_statements()

    dimensions: list[Dimension] = []
    dim_index: dict[str, int] = {}
    for stmt in stmts:
        if not isinstance(stmt, _DimStmt):
            continue
        name = stmt.name.text
        if name in dim_index:
            diags.append(ParseDiagnostic(
                "error", "P-DUPLICATE", f"dimension {name} is already declared",
                _span(file, stmt.name)))
            continue
        labels = []
        seen = set()
        for tok in stmt.labels:
            if tok.text in seen:
                diags.append(ParseDiagnostic(
                    "error", "P-DUPLICATE",
                    f"dimension {name} repeats instance label {tok.text}",
                    _span(file, tok)))
                continue
            seen.add(tok.text)
            labels.append(tok.text)
        dim_index[name] = len(dimensions)
        dimensions.append(Dimension(name, tuple(labels), span=stmt.span))

    var_stmts: list[_VarStmt] = []
    var_names: set[str] = set()
    for stmt in stmts:
        if not isinstance(stmt, _VarStmt):
            continue
        name = stmt.name.text
        if name in var_names:
            diags.append(ParseDiagnostic(
                "error", "P-DUPLICATE", f"variable {name} is already declared",
                _span(file, stmt.name)))
            continue
        if name in dim_index:
            diags.append(ParseDiagnostic(
                "error", "P-DUPLICATE",
                f"{name} is already declared as a dimension", _span(file, stmt.name)))
            continue
        var_names.add(name)
        var_stmts.append(stmt)
    known_names = var_names | parser.failed_names

    variables = []
    for stmt in var_stmts:
        dims = _resolve_dims(stmt, dimensions, dim_index, file, diags)
        payload = _resolve_payload(stmt, dims, dimensions, known_names, file, diags)
        variables.append(Variable(stmt.name.text, stmt.kind, dims, payload,
                                  span=stmt.span))

    errors = [d for d in diags if d.severity == "error"]
    if errors:
        raise ParseFailure(sorted(
            diags, key=lambda d: (d.span.start_line, d.span.start_col, d.code)))
    return Model(tuple(dimensions), tuple(variables))


def _resolve_dims(stmt: _VarStmt, dimensions, dim_index, file, diags) -> DimensionSet:
    if stmt.over is None:
        return DimensionSet((), ())
    pairs = set()
    names_seen = set()
    for tok in stmt.over:
        if tok.text not in dim_index:
            diags.append(ParseDiagnostic(
                "error", "P-UNDECLARED", f"no dimension named {tok.text}",
                _span(file, tok)))
            continue
        if tok.text in names_seen:
            diags.append(ParseDiagnostic(
                "error", "P-DUPLICATE",
                f"dimension {tok.text} appears twice in the over clause",
                _span(file, tok)))
            continue
        names_seen.add(tok.text)
        pairs.add((dim_index[tok.text], tok.text))
    return _from_pairs(pairs)


def _resolve_payload(stmt: _VarStmt, dims: DimensionSet, dimensions, known_names,
                     file, diags):
    if stmt.rhs_kind == "none":
        return None
    if stmt.rhs_kind == "expr":
        expr = stmt.rhs
        # a bare number is a scalar value, not a formula
        if isinstance(expr, Literal) and not stmt.kind.carries_formula:
            if len(dims) > 0:
                diags.append(ParseDiagnostic(
                    "error", "P-TABLE",
                    f"{stmt.name.text} is over {dims}; a single number is only "
                    f"valid for a dimensionless variable", stmt.span))
                return None
            return ValueTable((((), expr.value),))
        for node_name, node_span in _expr_names(expr):
            if node_name not in known_names:
                dim_names = {d.name for d in dimensions}
                extra = (" (it is a dimension, not a variable)"
                         if node_name in dim_names else "")
                diags.append(ParseDiagnostic(
                    "error", "P-UNDECLARED",
                    f"no variable named {node_name}{extra}",
                    node_span or stmt.span))
        return expr
    by_name = {d.name: d for d in dimensions}
    axes = [by_name[n] for n in dims if n in by_name]
    if stmt.rhs_kind == "list":
        values = stmt.rhs
        if len(axes) != 1:
            diags.append(ParseDiagnostic(
                "error", "P-TABLE",
                f"a positional list needs exactly one dimension; "
                f"{stmt.name.text} is over {dims}", stmt.span))
            return None
        axis = axes[0]
        if len(values) != len(axis.instances):
            diags.append(ParseDiagnostic(
                "error", "P-TABLE",
                f"{stmt.name.text} needs {len(axis.instances)} values for "
                f"{axis.name}, got {len(values)}", stmt.span))
            return None
        return ValueTable(tuple(
            ((label,), value)
            for label, (value, _) in zip(axis.instances, values)))
    # keyed table
    if len(axes) != len(dims):
        return None  # over clause already failed; skip follow-on noise
    if not axes:
        diags.append(ParseDiagnostic(
            "error", "P-TABLE",
            f"{stmt.name.text} is dimensionless; write a single number, "
            f"not a table", stmt.span))
        return None
    table: dict[tuple[str, ...], float] = {}
    ok = True
    for key_toks, value in stmt.rhs:
        if len(key_toks) != len(axes):
            diags.append(ParseDiagnostic(
                "error", "P-TABLE",
                f"table key {','.join(t.text for t in key_toks)} has "
                f"{len(key_toks)} labels; {stmt.name.text} is over {dims}",
                _span(file, key_toks[0], key_toks[-1])))
            ok = False
            continue
        key = []
        for tok, axis in zip(key_toks, axes):
            if tok.text not in axis.instances:
                diags.append(ParseDiagnostic(
                    "error", "P-TABLE",
                    f"{tok.text} is not an instance of {axis.name} (table keys "
                    f"follow the dimension order {dims})", _span(file, tok)))
                ok = False
                break
            key.append(tok.text)
        else:
            key = tuple(key)
            if key in table:
                diags.append(ParseDiagnostic(
                    "error", "P-DUPLICATE",
                    f"table entry {','.join(key)} is already defined",
                    _span(file, key_toks[0], key_toks[-1])))
                ok = False
            else:
                table[key] = value
    if not ok:
        return None
    want = list(itertools.product(*(axis.instances for axis in axes)))
    missing = [k for k in want if k not in table]
    if missing:
        diags.append(ParseDiagnostic(
            "error", "P-TABLE",
            f"value table for {stmt.name.text} has {len(table)} of "
            f"{len(want)} entries (first missing: {','.join(missing[0])})",
            stmt.span))
        return None
    return ValueTable(tuple((k, table[k]) for k in want))


def _expr_names(expr: Expr):
    """Yield (referenced name, span) for every Ref and Aggregate in expr."""
    if isinstance(expr, Ref):
        yield expr.name, expr.span
    elif isinstance(expr, Aggregate):
        yield expr.source, expr.span
    elif isinstance(expr, Unary):
        yield from _expr_names(expr.operand)
    elif isinstance(expr, Binary):
        yield from _expr_names(expr.left)
        yield from _expr_names(expr.right)


def format_number(value: float) -> str:
    """Shortest lossless rendering; integral floats print without a point."""
    if math.isfinite(value) and value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def format_ident(name: str) -> str:
    if _IDENT_RE.fullmatch(name) and name not in KEYWORDS:
        return name
    escaped = name.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}
_UNARY_PREC = 3
_ATOM_PREC = 5


def _expr_prec(expr: Expr) -> int:
    if isinstance(expr, Binary):
        return _PREC[expr.op]
    if isinstance(expr, Unary):
        return _UNARY_PREC
    if isinstance(expr, Literal) and expr.value < 0:
        return _UNARY_PREC  # -5 reads like a negation
    return _ATOM_PREC


def format_expr(expr: Expr) -> str:
    """Render a formula with the fewest parentheses that re-parse identically."""
    return _fmt(expr, 0)


def _fmt(expr: Expr, min_prec: int) -> str:
    if isinstance(expr, Literal):
        text = format_number(expr.value)
    elif isinstance(expr, Ref):
        text = format_ident(expr.name)
    elif isinstance(expr, Aggregate):
        text = f"SUM({format_ident(expr.source)})"
    elif isinstance(expr, Unary):
        text = "-" + _fmt(expr.operand, _UNARY_PREC)
    elif isinstance(expr, Binary):
        prec = _PREC[expr.op]
        if expr.op == "^":
            text = f"{_fmt(expr.left, prec)} ^ {_fmt_exponent(expr.right)}"
        else:
            text = f"{_fmt(expr.left, prec)} {expr.op} {_fmt(expr.right, prec + 1)}"
    else:
        raise TypeError(f"not an expression: {expr!r}")
    if _expr_prec(expr) < min_prec:
        return f"({text})"
    return text


def _fmt_exponent(expr: Expr) -> str:
    # the grammar lets an exponent start with '-' without parentheses
    if isinstance(expr, Unary):
        return "-" + _fmt_exponent(expr.operand)
    if isinstance(expr, Literal) and expr.value < 0:
        return format_number(expr.value)
    return _fmt(expr, _ATOM_PREC)


def format_payload(variable: Variable) -> str | None:
    """The text after '=' in a declaration, or None for a defaultless input."""
    payload = variable.payload
    if payload is None:
        return None
    if isinstance(payload, ValueTable):
        if len(variable.dims) == 0:
            return format_number(payload.scalar)
        entries = ", ".join(
            f"{','.join(format_ident(l) for l in key)}: {format_number(v)}"
            for key, v in payload.entries)
        return "{" + entries + "}"
    return format_expr(payload)


def pretty_print(model: Model) -> str:
    """Render a Model as DSL source that parses back to an equal Model."""
    lines = []
    for dim in model.dimensions:
        labels = ", ".join(format_ident(l) for l in dim.instances)
        lines.append(f"dimension {format_ident(dim.name)} = [{labels}]")
    for v in model.variables:
        head = f"{v.kind.value} {format_ident(v.name)}"
        if len(v.dims) > 0:
            head += f" over {v.dims}"
        payload = format_payload(v)
        lines.append(head if payload is None else f"{head} = {payload}")
    return "\n".join(lines) + ("\n" if lines else "")
