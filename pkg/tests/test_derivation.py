import random

import pytest

from support import FIXTURES
from tptp_ntf.derivation import (
    FAIL, NOT_APPLICABLE, PASS, File, Inference, build_dag, verify_structure,
)
from tptp_ntf.errors import DerivationError
from tptp_ntf.syntax import ast as A
from tptp_ntf.syntax import load_problem, parse_problem, print_problem


def cantor():
    return load_problem(FIXTURES / "cantor_derivation.s", relaxed=True)


def dag(p):
    return build_dag(p, allow_elided=True)


def without(p, name):
    return A.Problem(p.includes, tuple(s for s in p.statements if s.name != name))


def test_sources():
    d = dag(cantor())
    assert d.nodes["1"].source == File("SET557^1.p", "surjectiveCantorThm")
    src = d.nodes["2"].source
    assert isinstance(src, Inference) and src.rule == "neg_conjecture"
    assert src.parents == ("1",) and src.status == "cth"
    assert "sk1_type" not in d.nodes


def test_elided_parents_need_permission():
    with pytest.raises(DerivationError, match="unknown node"):
        build_dag(cantor())
    d = dag(cantor())
    assert {"18", "272"} <= set(d.nodes)
    assert len(d.warnings) == 2


def test_cantor_passes():
    report = verify_structure(dag(cantor()))
    assert (report.acyclicity, report.completeness) == (PASS, PASS)
    assert report.passed and report.lines()[-1] == "PASS"


def test_cantor_origin_against_problem():
    problem = load_problem(FIXTURES / "cantor.p", relaxed=True)
    report = verify_structure(dag(cantor()), problem)
    assert report.origin == PASS and report.passed


def test_missing_original_name():
    problem = parse_problem("thf(other,conjecture, $true ).", relaxed=True)
    report = verify_structure(dag(cantor()), problem)
    assert report.origin == FAIL
    assert any("surjectiveCantorThm not found" in v for v in report.violations)


def test_deleting_false_root_fails_completeness():
    report = verify_structure(dag(without(cantor(), "381")))
    assert report.completeness == FAIL and not report.passed


def test_self_parent_fails_acyclicity():
    p = cantor()
    stmts = []
    for s in p.statements:
        if s.name == "32":
            src = A.GeneralApp("inference", (A.GeneralWord("pre_uni"), A.GeneralList(()),
                                             A.GeneralList((A.GeneralWord("32"),))))
            s = A.AnnotatedFormula(s.language, s.name, s.role, s.body, src)
        stmts.append(s)
    report = verify_structure(dag(A.Problem((), tuple(stmts))))
    assert report.acyclicity == FAIL
    assert "cycle through 32" in report.violations


def test_duplicate_names_rejected():
    p = parse_problem("thf(a,plain, $true ). thf(a,plain, $false ).", relaxed=True)
    with pytest.raises(DerivationError, match="duplicate"):
        build_dag(p)


def test_nested_inference_becomes_node():
    text = ("tff(a,axiom, p, file('x.p',a) ). "
            "tff(b,plain, $false, inference(r1,[],[inference(r2,[],[a])]) ).")
    d = build_dag(parse_problem(text))
    (synthetic,) = [n for n in d.nodes.values() if n.synthetic]
    assert d.nodes["b"].parents == (synthetic.name,)
    assert synthetic.parents == ("a",)
    assert verify_structure(d).passed


def test_not_applicable_without_refutation():
    d = build_dag(parse_problem("tff(a,axiom, p, file('x.p',a) ). "
                                "tff(b,plain, p, inference(r,[],[a]) )."))
    assert verify_structure(d).completeness == NOT_APPLICABLE


def test_leo_proof_fragment():
    d = dag(load_problem(FIXTURES / "leo_workers_proof.s", relaxed=True))
    assert d.nodes["m_reflexive"].source == File("LeoWorkers.p", "mrel_reflexive")
    report = verify_structure(d)
    assert report.passed and "772" in d.sinks()


def test_order_insensitive():
    p = cantor()
    base = verify_structure(dag(p))
    rng = random.Random(3)
    for _ in range(10):
        stmts = list(p.statements)
        rng.shuffle(stmts)
        assert verify_structure(dag(A.Problem((), tuple(stmts)))) == base


def test_print_parse_preserves_graph():
    for name in ("cantor_derivation.s", "leo_workers_proof.s"):
        p = load_problem(FIXTURES / name, relaxed=True)
        again = parse_problem(print_problem(p), relaxed=True)
        a, b = dag(p), dag(again)
        assert set(a.nodes) == set(b.nodes) and a.edges() == b.edges()
