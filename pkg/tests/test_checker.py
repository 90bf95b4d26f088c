import itertools

import pytest

from conftest import load_checked, load_model
from dimcalc.checker import (CheckFailure, check_model, infer_dims)
from dimcalc.model import Aggregate, Binary, EMPTY_DIMS, Literal, Ref
from dimcalc.parser import parse_model

DIMS = ("A", "B", "C", "D")
SUBSETS = [tuple(DIMS[i] for i in combo)
           for k in range(5)
           for combo in itertools.combinations(range(4), k)]


def table_text(names):
    """Complete keyed-table literal for a set of 2-instance dimensions."""
    if not names:
        return "1"
    keys = itertools.product(*((f"{n}1", f"{n}2") for n in names))
    entries = ", ".join(f"{','.join(key)}: 1" for key in keys)
    return "{" + entries + "}"


def over_clause(names):
    return f" over ({', '.join(names)})" if names else ""


def lattice_model(target, operand, aggregate=False):
    lines = [f"dimension {n} = [{n}1, {n}2]" for n in DIMS]
    lines.append(f"data Anchor{over_clause(target)} = " + table_text(target))
    lines.append(f"data Probe{over_clause(operand)} = " + table_text(operand))
    probe = "SUM(Probe)" if aggregate else "Probe"
    lines.append(f"calc X{over_clause(target)} = Anchor * {probe}")
    return parse_model("\n".join(lines) + "\n")


def check_codes(model):
    try:
        checked = check_model(model)
    except CheckFailure as err:
        return [d.code for d in err.diagnostics]
    return [d.code for d in checked.warnings]


FIXTURE_CODES = [
    ("bad_rule1_overspan.dml", "R1-MISMATCH"),
    ("bad_rule1_underspan.dml", "R1-MISMATCH"),
    ("bad_rule2.dml", "R2-NOT-SUBSET"),
    ("bad_rule3.dml", "R3-NOT-SUPERSET"),
    ("bad_kind.dml", "K-KIND"),
    ("bad_cycle.dml", "C-CYCLE"),
]


@pytest.mark.parametrize("fixture,code", FIXTURE_CODES)
def test_negative_fixture_single_diagnostic(fixture, code):
    with pytest.raises(CheckFailure) as info:
        check_model(load_model(fixture))
    diags = info.value.diagnostics
    assert len(diags) == 1
    assert diags[0].code == code
    assert diags[0].severity == "error"
    assert diags[0].span is not None


def test_rule1_overspan_message():
    with pytest.raises(CheckFailure) as info:
        check_model(load_model("bad_rule1_overspan.dml"))
    message = info.value.diagnostics[0].message
    assert "(Month, Sector)" in message and "(Month)" in message
    assert "extra" in message


def test_rule1_underspan_message():
    with pytest.raises(CheckFailure) as info:
        check_model(load_model("bad_rule1_underspan.dml"))
    message = info.value.diagnostics[0].message
    assert "missing" in message and "(Sector)" in message


def test_rule2_names_offending_dimension():
    with pytest.raises(CheckFailure) as info:
        check_model(load_model("bad_rule2.dml"))
    message = info.value.diagnostics[0].message
    assert "Load" in message and "(Region)" in message


def test_cycle_message_shows_path():
    with pytest.raises(CheckFailure) as info:
        check_model(load_model("bad_cycle.dml"))
    message = info.value.diagnostics[0].message
    assert "A -> B -> A" in message or "B -> A -> B" in message


class TestInferDims:
    def test_literal_is_dimensionless(self, acme_model):
        target = acme_model.variable("Total_Profit")
        assert infer_dims(Literal(3.0), target, acme_model) == EMPTY_DIMS

    def test_ref_carries_declared_set(self, acme_model):
        target = acme_model.variable("MSP_Unit_Sales")
        got = infer_dims(Ref("Monthly_Sales_Distribution_per_Sector"),
                         target, acme_model)
        assert got.names == ("Month", "Sector")

    def test_binary_takes_union(self, acme_model):
        target = acme_model.variable("MSP_Unit_Sales")
        expr = Binary("*", Ref("Annual_Sector_Product_Unit_Sales"),
                      Ref("Monthly_Sales_Distribution_per_Sector"))
        assert infer_dims(expr, target, acme_model).names == (
            "Month", "Sector", "Product")

    def test_sum_intersects_with_target(self, acme_model):
        target = acme_model.variable("Monthly_Unit_Sales")
        expr = Aggregate("SUM", "MSPR_Unit_Sales")
        assert infer_dims(expr, target, acme_model).names == ("Month",)

    def test_sum_then_divide(self, acme_model):
        target = acme_model.variable("Monthly_Unit_Sales")
        expr = Binary("/", Aggregate("SUM", "MSPR_Unit_Sales"), Literal(2.0))
        assert infer_dims(expr, target, acme_model).names == ("Month",)


class TestRule2Lattice:
    @pytest.mark.parametrize("target", SUBSETS)
    @pytest.mark.parametrize("operand", SUBSETS)
    def test_r2_fires_iff_not_subset(self, target, operand):
        codes = check_codes(lattice_model(target, operand))
        if set(operand) <= set(target):
            assert codes == []
        else:
            assert codes == ["R2-NOT-SUBSET"]


class TestRule3Lattice:
    @pytest.mark.parametrize("target", SUBSETS)
    @pytest.mark.parametrize("source", SUBSETS)
    def test_r3_fires_iff_not_superset(self, target, source):
        codes = check_codes(lattice_model(target, source, aggregate=True))
        if set(source) > set(target):
            assert codes == []
        elif set(source) == set(target):
            assert codes == ["R3-DEGENERATE"]
        else:
            assert codes == ["R3-NOT-SUPERSET"]


class TestKind:
    def test_constant_calc_formula(self):
        model = parse_model("calc X = 1 + 2\n")
        assert check_codes(model) == ["K-KIND"]

    def test_output_with_table(self):
        model = parse_model("output X = 5\n")
        assert check_codes(model) == ["K-KIND"]

    def test_input_with_formula(self):
        model = parse_model("input A = 1\ninput X = A * 2\n")
        assert check_codes(model) == ["K-KIND"]

    def test_kind_reported_before_rule1(self):
        # Discounted breaks both kind (data with formula) and nothing else;
        # the kind problem must be the one reported
        with pytest.raises(CheckFailure) as info:
            check_model(load_model("bad_kind.dml"))
        assert [d.code for d in info.value.diagnostics] == ["K-KIND"]


class TestOrder:
    def test_acme_checks_clean(self, acme_checked):
        assert acme_checked.warnings == ()
        assert len(acme_checked.order) == 31

    def test_pricing_checks_clean(self, pricing_checked):
        assert pricing_checked.warnings == ()
        assert len(pricing_checked.order) == 16

    def test_order_respects_dependencies(self, acme_checked):
        position = {name: i for i, name in enumerate(acme_checked.order)}
        model = acme_checked.model
        from dimcalc.model import Expr, iter_dependencies
        for var in model.variables:
            if isinstance(var.payload, Expr):
                for dep, _ in iter_dependencies(var.payload):
                    assert position[dep] < position[var.name]

    def test_order_is_deterministic(self):
        first = load_checked("acme.dml").order
        second = load_checked("acme.dml").order
        assert first == second

    def test_order_prefers_declaration_order(self):
        model = parse_model(
            "input A = 1\ninput B = 2\ncalc Z = A + B\ncalc Y = B + A\n")
        checked = check_model(model)
        assert checked.order == ("A", "B", "Z", "Y")

    def test_forward_references_allowed(self, pricing_checked):
        order = pricing_checked.order
        assert order.index("Revenue") < order.index("Profit")


class TestDegenerateSum:
    def test_warning_not_error(self):
        model = parse_model(
            "dimension M = [Jan, Feb]\n"
            "data Sales over (M) = [1, 2]\n"
            "calc Echo over (M) = SUM(Sales)\n")
        checked = check_model(model)
        assert [w.code for w in checked.warnings] == ["R3-DEGENERATE"]
        assert checked.order == ("Sales", "Echo")


def test_diagnostics_sorted_by_position():
    model = parse_model(
        "dimension M = [Jan]\n"
        "data Later over (M) = {Jan: 1}\n"
        "calc Bad2 = Later\n"        # R1 at line 3
        "data Bad1 over (M) = 1 - 0\n")  # K-KIND at line 4
    with pytest.raises(CheckFailure) as info:
        check_model(model)
    codes = [d.code for d in info.value.diagnostics]
    assert codes == ["R1-MISMATCH", "K-KIND"]
    lines = [d.span.start_line for d in info.value.diagnostics]
    assert lines == sorted(lines)
