from __future__ import annotations

from methodmover import filters, model

from conftest import FIXTURES
from test_model import write_project


def verdict_map(cls):
    return {v.method.signature: v for v in filters.sanity_filter(cls)}


def test_getter_fails_with_getter_setter_code(bank_index):
    acc = bank_index.classes["bank.Account"]
    v = verdict_map(acc)["getBalance()"]
    assert not v.passed
    assert v.reasons == [filters.GETTER_SETTER]


def test_constructor_fails_with_constructor_code(bank_index):
    acc = bank_index.classes["bank.Account"]
    v = verdict_map(acc)["Account(Customer,TransactionLog)"]
    assert not v.passed
    assert filters.CONSTRUCTOR in v.reasons


def test_plain_computation_passes(bank_index):
    acc = bank_index.classes["bank.Account"]
    v = verdict_map(acc)["computeInterest(RatePlan)"]
    assert v.passed and v.reasons == []


def test_verdict_order_matches_declaration_order(bank_index):
    acc = bank_index.classes["bank.Account"]
    names = [v.method.name for v in filters.sanity_filter(acc)]
    assert names == ["Account", "getBalance", "setBalance", "deposit", "withdraw", "computeInterest"]


def test_no_constructor_ever_passes(bank_index, esql_index, warehouse_index):
    for idx in (bank_index, esql_index, warehouse_index):
        for cls in idx.classes.values():
            for v in filters.sanity_filter(cls):
                if v.method.is_constructor:
                    assert not v.passed


def test_override_and_test_and_empty_codes(tmp_path):
    root = write_project(
        tmp_path,
        {
            "Base.java": "package p; class Base { void run() { int i = 0; } }",
            "Sub.java": (
                "package p; class Sub extends Base {"
                " void run() { int j = 1; }"
                " @Test void probe() { int x = 1; }"
                " void nothing() {}"
                " int ok() { return 1; } }"
            ),
        },
    )
    idx = model.build_index(root)
    vm = verdict_map(idx.classes["p.Sub"])
    assert vm["run()"].reasons == [filters.OVERRIDE]
    assert vm["probe()"].reasons == [filters.TEST]
    assert vm["nothing()"].reasons == [filters.EMPTY_BODY]
    assert vm["ok()"].passed


# ---------------------------------------------------------------------------
# Instance feasibility


def test_resolve_policy_to_field_type_is_feasible(esql_index):
    session = esql_index.classes["esql.session.EsqlSession"]
    m = session.method("resolvePolicy(String)")
    v = filters.check_instance_feasibility(
        esql_index, m, session, "esql.enrich.EnrichPolicyResolver"
    )
    assert v.feasible, v.reasons


def test_compute_interest_to_param_type_is_feasible(bank_index):
    acc = bank_index.classes["bank.Account"]
    m = acc.method("computeInterest(RatePlan)")
    v = filters.check_instance_feasibility(bank_index, m, acc, "bank.RatePlan")
    assert v.feasible, v.reasons


def test_absent_target_is_target_not_found(bank_index):
    acc = bank_index.classes["bank.Account"]
    m = acc.method("computeInterest(RatePlan)")
    v = filters.check_instance_feasibility(bank_index, m, acc, "bank.PolicyUtils")
    assert not v.feasible
    assert v.reasons == [filters.TARGET_NOT_FOUND]


def test_existing_but_unrelated_target_is_not_reachable(bank_index):
    acc = bank_index.classes["bank.Account"]
    m = acc.method("computeInterest(RatePlan)")
    v = filters.check_instance_feasibility(bank_index, m, acc, "bank.StatementPrinter")
    assert not v.feasible
    assert filters.TARGET_NOT_REACHABLE in v.reasons


def test_private_reference_loses_references(tmp_path):
    root = write_project(
        tmp_path,
        {
            "A.java": (
                "package p; class A {"
                " private int secret;"
                " int f(B b) { return b.getV() + secret; } }"
            ),
            "B.java": "package p; class B { int v; int getV() { return v; } }",
        },
    )
    idx = model.build_index(root)
    a = idx.classes["p.A"]
    v = filters.check_instance_feasibility(idx, a.method("f(B)"), a, "p.B")
    assert not v.feasible
    assert filters.LOSES_REFERENCES in v.reasons


def test_package_visible_reference_is_kept_same_package(bank_index):
    printer = bank_index.classes["bank.StatementPrinter"]
    m = printer.method("printHeader(Customer)")
    v = filters.check_instance_feasibility(bank_index, m, printer, "bank.Customer")
    assert v.feasible, v.reasons


def test_target_equal_to_host_is_not_a_move(bank_index):
    acc = bank_index.classes["bank.Account"]
    m = acc.method("computeInterest(RatePlan)")
    v = filters.check_instance_feasibility(bank_index, m, acc, "bank.Account")
    assert not v.feasible
    assert filters.TARGET_NOT_REACHABLE in v.reasons


def test_interface_and_enum_targets_rejected_for_instance_moves(tmp_path):
    root = write_project(
        tmp_path,
        {
            "A.java": "package p; class A { int f(I i, E e) { return 1; } }",
            "I.java": "package p; interface I { void x(); }",
            "E.java": "package p; enum E { ONE, TWO; }",
        },
    )
    idx = model.build_index(root)
    a = idx.classes["p.A"]
    m = a.method("f(I,E)")
    for target in ("p.I", "p.E"):
        v = filters.check_instance_feasibility(idx, m, a, target)
        assert not v.feasible
        assert filters.TARGET_NOT_REACHABLE in v.reasons


def test_duplicate_signature_in_target(tmp_path):
    root = write_project(
        tmp_path,
        {
            "A.java": "package p; class A { String label(B b) { return b.tag(); } }",
            "B.java": (
                "package p; class B {"
                " String tag() { return \"b\"; }"
                " String label(B b) { return \"dup\"; } }"
            ),
        },
    )
    idx = model.build_index(root)
    a = idx.classes["p.A"]
    v = filters.check_instance_feasibility(idx, a.method("label(B)"), a, "p.B")
    assert not v.feasible
    assert filters.DUPLICATE_SIGNATURE in v.reasons


def test_override_method_gets_hierarchy_conflict(tmp_path):
    root = write_project(
        tmp_path,
        {
            "Base.java": "package p; class Base { int f(B b) { return 0; } }",
            "Sub.java": "package p; class Sub extends Base { int f(B b) { return b.v(); } }",
            "B.java": "package p; class B { int v() { return 1; } }",
        },
    )
    idx = model.build_index(root)
    sub = idx.classes["p.Sub"]
    v = filters.check_instance_feasibility(idx, sub.method("f(B)"), sub, "p.B")
    assert not v.feasible
    assert filters.HIERARCHY_CONFLICT in v.reasons


# ---------------------------------------------------------------------------
# Static feasibility


def test_pure_static_function_moves_anywhere(staticmove_index):
    ops = staticmove_index.classes["calc.MathOps"]
    clamp = ops.method("clamp(int,int,int)")
    for target in ("calc.util.NumberUtils", "calc.Meter", "calc.Gauge"):
        v = filters.check_static_feasibility(staticmove_index, clamp, ops, target)
        assert v.feasible, (target, v.reasons)


def test_static_move_to_self_rejected(staticmove_index):
    ops = staticmove_index.classes["calc.MathOps"]
    clamp = ops.method("clamp(int,int,int)")
    v = filters.check_static_feasibility(staticmove_index, clamp, ops, "calc.MathOps")
    assert not v.feasible
    assert filters.TARGET_NOT_REACHABLE in v.reasons


def test_static_private_field_reference_loses_references(tmp_path):
    root = write_project(
        tmp_path,
        {
            "A.java": (
                "package p; class A {"
                " private static int seed = 7;"
                " static int next() { return seed + 1; } }"
            ),
            "B.java": "package p; class B { }",
        },
    )
    idx = model.build_index(root)
    a = idx.classes["p.A"]
    v = filters.check_static_feasibility(idx, a.method("next()"), a, "p.B")
    assert not v.feasible
    assert filters.LOSES_REFERENCES in v.reasons


def test_static_move_to_enum_allowed_interface_rejected(tmp_path):
    root = write_project(
        tmp_path,
        {
            "A.java": "package p; class A { static int f(int x) { return x; } }",
            "E.java": "package p; enum E { ONE; }",
            "I.java": "package p; interface I { }",
        },
    )
    idx = model.build_index(root)
    a = idx.classes["p.A"]
    f = a.method("f(int)")
    assert filters.check_static_feasibility(idx, f, a, "p.E").feasible
    v = filters.check_static_feasibility(idx, f, a, "p.I")
    assert not v.feasible


def test_adding_unrelated_class_never_flips_feasibility(tmp_path, bank_index):
    import shutil

    acc = bank_index.classes["bank.Account"]
    m = acc.method("computeInterest(RatePlan)")
    before = filters.check_instance_feasibility(bank_index, m, acc, "bank.RatePlan")

    grown = tmp_path / "grown"
    shutil.copytree(FIXTURES / "bank", grown)
    (grown / "bank" / "Unrelated.java").write_text(
        "package bank;\n\npublic class Unrelated {\n    public int nothing() {\n        return 0;\n    }\n}\n"
    )
    idx2 = model.build_index(grown)
    acc2 = idx2.classes["bank.Account"]
    m2 = acc2.method("computeInterest(RatePlan)")
    after = filters.check_instance_feasibility(idx2, m2, acc2, "bank.RatePlan")
    assert before.feasible and after.feasible


# ---------------------------------------------------------------------------
# Call sites


def test_clamp_call_sites_found(staticmove_index):
    ops = staticmove_index.classes["calc.MathOps"]
    clamp = ops.method("clamp(int,int,int)")
    sites = filters.find_call_sites(staticmove_index, ops, clamp)
    by_class = sorted((s.enclosing_class, s.receiver_kind) for s in sites)
    assert by_class == [
        ("calc.Gauge", "static"),
        ("calc.MathOps", "none"),
        ("calc.Meter", "static"),
    ]
    for s in sites:
        assert len(s.args) == 3


def test_internal_unqualified_call_site_found(esql_index):
    session = esql_index.classes["esql.session.EsqlSession"]
    m = session.method("resolvePolicy(String)")
    sites = filters.find_call_sites(esql_index, session, m)
    assert len(sites) == 1
    assert sites[0].receiver_kind == "none"
    assert sites[0].enclosing_class == "esql.session.EsqlSession"


def test_method_with_no_call_sites(bank_index):
    printer = bank_index.classes["bank.StatementPrinter"]
    m = printer.method("printHeader(Customer)")
    assert filters.find_call_sites(bank_index, printer, m) == []


def test_var_receiver_call_site(tmp_path):
    root = write_project(
        tmp_path,
        {
            "A.java": "package p; class A { int go(B b) { return b.calc(1, 2); } }",
            "B.java": "package p; class B { int calc(int x, int y) { return x + y; } }",
        },
    )
    idx = model.build_index(root)
    b = idx.classes["p.B"]
    sites = filters.find_call_sites(idx, b, b.method("calc(int,int)"))
    assert len(sites) == 1
    s = sites[0]
    assert s.receiver_kind == "var"
    assert s.receiver_text == "b"
    assert s.enclosing_class == "p.A"
    data = idx.file_bytes(s.file)
    assert data[s.full_span[0] : s.full_span[1]].decode() == "b.calc(1, 2)"
    assert [data[a:bnd].decode() for a, bnd in s.args] == ["1", "2"]


def test_field_route_refuses_bare_this(tmp_path):
    root = write_project(
        tmp_path,
        {
            "p/Host.java": """package p;

public class Host {
    private Sink sink;

    public void push() {
        sink.accept(this);
    }
}
""",
            "p/Sink.java": """package p;

public class Sink {
    public void accept(Object o) { }

    public void acceptNothing() { }
}
""",
        },
    )
    idx = model.build_index(root)
    host = idx.classes["p.Host"]
    m = host.method("push()")
    assert m.uses_this
    verdict = filters.check_instance_feasibility(idx, m, host, "p.Sink")
    assert not verdict.feasible
    assert filters.LOSES_REFERENCES in verdict.reasons
