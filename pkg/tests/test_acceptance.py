"""Acceptance suite: one PASS/FAIL line per criterion, with runtime against its limit.

Run with ``pytest tests/test_acceptance.py -s`` or ``python tests/test_acceptance.py``.
"""
from __future__ import annotations

import itertools
import random
import re
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from support import (  # noqa: E402
    FIXTURES, REGIMES, direct_truth, fidelity_cases, fuzz_problem, induced_structure, samples,
    scheme_valid,
)
from tptp_ntf.derivation import PASS, build_dag, verify_structure  # noqa: E402
from tptp_ntf.embedding import FRAME, LIFTED, embed  # noqa: E402
from tptp_ntf.errors import LogicSpecError  # noqa: E402
from tptp_ntf.kripke import check_model, evaluate, search_countermodel  # noqa: E402
from tptp_ntf.kripke.check import COUNTER_SATISFIABLE  # noqa: E402
from tptp_ntf.kripke.search import FOUND, NOT_FOUND  # noqa: E402
from tptp_ntf.logics import (  # noqa: E402
    ModalAxiom, enumerate_relations, format_axioms, logic_of, normalize_spec, system_axioms,
)
from tptp_ntf.syntax import ast as A  # noqa: E402
from tptp_ntf.syntax import census, load_problem, parse_problem, print_problem, resolve_defaults  # noqa: E402

RELAXED = {"cantor.p", "cantor_derivation.s", "leo_workers_proof.s"}
REFERENCE_FIXTURES = [
    "leo_workers.p", "birds_defaults.p", "multimodal_spec.p", "cantor_derivation.s",
    "leo_workers_proof.s", "leo_workers_tarski.p", "leo_workers_kripke.p",
]


def _load(name):
    return load_problem(FIXTURES / name, relaxed=name in RELAXED)


def _leo(name="leo_workers.p"):
    tp = resolve_defaults(load_problem(FIXTURES / name))
    return tp, logic_of(tp.problem)


# -- criteria: each returns (ok, detail) ------------------------------------------------

def fixture_parsing():
    for name in REFERENCE_FIXTURES:
        _load(name)
    stats = census(_load("leo_workers.p"))
    split = (stats.nonclassical_plain, stats.nonclassical_indexed)
    return split == (4, 0), f"{len(REFERENCE_FIXTURES)} fixtures parsed; census {split[0]} {{.}}; {split[1]} {{#}}"


def round_trip():
    bad = [n for n in sorted(p.name for p in FIXTURES.iterdir())
           if parse_problem(print_problem(_load(n)), relaxed=n in RELAXED) != _load(n)]
    rng = random.Random(20261018)
    fuzzed = 0
    for _ in range(200):
        p = parse_problem(fuzz_problem(rng))
        fuzzed += parse_problem(print_problem(p)) == p
    return not bad and fuzzed == 200, f"fixture mismatches {bad or 'none'}; fuzzed {fuzzed}/200 equal"


TABLE = {
    "K": "{K}", "KB": "{K,B}", "K4": "{K,4}", "K5": "{K,5}", "K45": "{K,4,5}",
    "KB5": "{K,B,5}", "D": "{K,D}", "DB": "{K,B,D}", "D4": "{K,D,4}", "D5": "{K,D,5}",
    "D45": "{K,D,4,5}", "M": "{K,M}", "B": "{K,B}", "S4": "{K,M,4}", "S5": "{K,M,B,5}",
}


def spec_resolution():
    table_ok = all(format_axioms(system_axioms(f"$modal_system_{n}")) == v for n, v in TABLE.items())
    logic = logic_of(load_problem(FIXTURES / "multimodal_spec.p"))
    multi_ok = (format_axioms(logic.default) == "{K}"
                and format_axioms(logic.axioms_for("#1")) == "{K,M,B,5}"
                and format_axioms(logic.axioms_for("#2")) == "{K,D,C4}")
    source = (FIXTURES / "leo_workers.p").read_text()
    spec_text = source[:source.index(").") + 2]
    missing = 0
    for prop in ("$domains", "$designation", "$terms", "$modalities"):
        text = re.sub(re.escape(prop) + r" == [^,\]]+,?\s*", "", spec_text)
        text = re.sub(r",\s*\]", " ]", text)
        try:
            normalize_spec(parse_problem(text).logic_statement.body)
        except LogicSpecError as e:
            missing += f"missing {prop}" in str(e)
    ok = table_ok and multi_ok and missing == 4
    return ok, f"15 systems {'match' if table_ok else 'DIFFER'}; multimodal {'ok' if multi_ok else 'wrong'}; missing-property errors {missing}/4"


def frame_oracle():
    mismatches = 0
    frames = 0
    for ax in ModalAxiom:
        if ax is ModalAxiom.K:
            continue
        for n in (1, 2, 3):
            for rel in enumerate_relations(n):
                frames += 1
                mismatches += scheme_valid(ax.scheme, n, rel) != ax.frame_condition.holds(range(n), rel)
    return mismatches == 0, f"9 axioms x {frames // 9} frames; {mismatches} mismatches"


def embedding_fidelity():
    cases = discrepancies = statements = 0
    for i, regime in enumerate(REGIMES):
        for tp, logic, m in fidelity_cases(regime, 40, i):
            cases += 1
            out = embed(tp, logic)
            structure = induced_structure(m, out)
            originals = {s.name: s for s in tp.problem.statements}
            for s in out.problem.statements:
                if s.role.base == "type":
                    continue
                classical = structure.holds(s.body)
                if out.provenance[s.name] == LIFTED:
                    statements += 1
                    discrepancies += classical != direct_truth(m, originals[s.name], logic)
                else:
                    discrepancies += not classical
    ok = cases >= 500 and discrepancies == 0
    return ok, f"{cases} cases over {len(REGIMES)} regimes, {statements} statements; {discrepancies} discrepancies"


def search_reproduction():
    parts = []
    tp, logic = _leo("leo_workers_k.p")
    r = search_countermodel(tp, logic, max_worlds=3, max_elems=3)
    a = (r.status == FOUND and check_model(r.model, tp, logic).classification == COUNTER_SATISFIABLE
         and len(r.model.worlds) <= 3 and len(r.model.union_domain("person")) <= 3
         and len(r.model.union_domain("product")) <= 1)
    parts.append(f"K: {r.status}")
    tp, logic = _leo("leo_workers_varying.p")
    r = search_countermodel(tp, logic, max_worlds=3, max_elems=3)
    b = r.status == FOUND and check_model(r.model, tp, logic).classification == COUNTER_SATISFIABLE
    parts.append(f"varying: {r.status}")
    tp, logic = _leo()
    r = search_countermodel(tp, logic, max_worlds=3, max_elems=3)
    c = r.status == NOT_FOUND
    parts.append(f"unchanged: {r.status}")
    return a and b and c, "; ".join(parts)


def embedding_shape():
    tp, logic = _leo()
    out = embed(tp, logic)
    by_name = {s.name: s for s in out.problem.statements}
    frames = [n for n, c in out.provenance.items() if c == FRAME]
    refl = by_name["acc_reflexive"].body
    refl_ok = (frames == ["acc_reflexive"] and isinstance(refl, A.Forall)
               and refl.body == A.Atom("acc", (A.Variable(refl.variables[0].name),) * 2))
    rich = by_name["work_hard_to_get_rich"].body.body.body.right
    dia_ok = (isinstance(rich, A.Exists) and isinstance(rich.body, A.And)
              and rich.body.args[0].predicate == "acc"
              and rich.body.args[1] == A.Atom("gets_rich", (A.Variable(rich.variables[0].name), A.Variable("P"))))
    here = A.FunctionApp("local_world")
    hyp_ok = all(by_name[n].body.args[0] == here
                 for n in ("alex_works_on_leo_here", "alex_advisor_works_on_leo_here"))
    return refl_ok and dia_ok and hyp_ok, f"reflexivity {refl_ok}; dia shape {dia_ok}; local hypotheses {hyp_ok}"


def derivation_checks():
    p = load_problem(FIXTURES / "cantor_derivation.s", relaxed=True)
    full = verify_structure(build_dag(p, allow_elided=True))
    full_ok = full.acyclicity == PASS and full.completeness == PASS and full.passed
    cut = A.Problem((), tuple(s for s in p.statements if s.name != "381"))
    cut_ok = not verify_structure(build_dag(cut, allow_elided=True)).passed
    looped = []
    for s in p.statements:
        if s.name == "32":
            src = A.GeneralApp("inference", (A.GeneralWord("r"), A.GeneralList(()),
                                             A.GeneralList((A.GeneralWord("32"),))))
            s = A.AnnotatedFormula(s.language, s.name, s.role, s.body, src)
        looped.append(s)
    loop = verify_structure(build_dag(A.Problem((), tuple(looped)), allow_elided=True))
    loop_ok = loop.acyclicity != PASS
    return full_ok and cut_ok and loop_ok, f"full {full.lines()[-1]}; without 381 fails {cut_ok}; self-parent fails {loop_ok}"


def duality_suites():
    modal = quant = 0
    for m, logic, w, phi in itertools.islice(samples(1, 1000), 1000):
        for idx in {None, *m.accessibility}:
            box = A.NonClassicalApp(A.NCConnective("$box", idx), (phi,))
            dia = A.NonClassicalApp(A.NCConnective("$dia", idx), (A.Not(phi),))
            modal += evaluate(m, w, box, logic=logic) == evaluate(m, w, dia, logic=logic)
    for m, logic, w, phi in itertools.islice(samples(2, 1000), 1000):
        for sort in ("$i", "s"):
            x = (A.TypedVariable("Q", A.BaseType(sort)),)
            body = A.Or((phi, A.Atom("p", (A.Variable("Q"),)))) if sort == "$i" else phi
            quant += (evaluate(m, w, A.Forall(x, body), logic=logic)
                      != evaluate(m, w, A.Not(A.Exists(x, A.Not(body))), logic=logic))
    return modal == 0 and quant == 0, f"1000 + 1000 samples; {modal} modal and {quant} quantifier violations"


CRITERIA = [
    (1, "fixture parsing and census", fixture_parsing, 1.0),
    (2, "print/parse round trip", round_trip, 10.0),
    (3, "logic specification resolution", spec_resolution, 1.0),
    (4, "frame correspondence oracle", frame_oracle, 30.0),
    (5, "embedding fidelity", embedding_fidelity, 60.0),
    (6, "countermodel search reproduction", search_reproduction, 120.0),
    (7, "embedding shape", embedding_shape, 1.0),
    (8, "derivation checks", derivation_checks, 1.0),
    (9, "duality suites", duality_suites, 30.0),
]


def run_criterion(number, title, check, limit):
    start = time.perf_counter()
    ok, detail = check()
    elapsed = time.perf_counter() - start
    timely = elapsed < limit
    status = "PASS" if ok and timely else "FAIL"
    line = f"criterion {number} ({title}): {status} in {elapsed:.2f}s (limit {limit:g}s); {detail}"
    return ok and timely, line


@pytest.mark.parametrize("number, title, check, limit", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(number, title, check, limit, capsys):
    ok, line = run_criterion(number, title, check, limit)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [run_criterion(*c) for c in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
