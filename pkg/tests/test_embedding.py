import pytest

from support import FIXTURES, REGIMES, Structure, direct_truth, fidelity_cases, induced_structure
from tptp_ntf.embedding import (
    DOMAIN, DOMAIN_COVER, FRAME, LIFTED, NONEMPTINESS, TERM_LOCALITY, embed, frame_axiom, ledger,
    render,
)
from tptp_ntf.errors import EmbeddingError, UnsupportedDialectError
from tptp_ntf.logics import FrameCondition, enumerate_relations, logic_of
from tptp_ntf.syntax import ast as A
from tptp_ntf.syntax import check_types, load_problem, parse_problem, resolve_defaults

CASES_PER_REGIME = 40


@pytest.mark.parametrize("regime", REGIMES, ids=lambda r: "/".join(x.strip("$") for x in r))
def test_embedding_fidelity(regime):
    checked = 0
    for tp, logic, m in fidelity_cases(regime, CASES_PER_REGIME, REGIMES.index(regime)):
        out = embed(tp, logic)
        assert check_types(resolve_defaults(out.problem)) == []
        structure = induced_structure(m, out)
        originals = {s.name: s for s in tp.problem.statements}
        for s in out.problem.statements:
            if s.role.base == "type":
                continue
            classical = structure.holds(s.body)
            if out.provenance[s.name] == LIFTED:
                assert classical == direct_truth(m, originals[s.name], logic), s.name
                checked += 1
            else:
                # The model meets the regime, so every background axiom holds.
                assert classical, s.name
    assert checked >= CASES_PER_REGIME


@pytest.mark.parametrize("cond", list(FrameCondition), ids=lambda c: c.value)
def test_frame_axioms_match_conditions(cond):
    world = A.BaseType("world")
    phi = frame_axiom(cond, "acc", world)
    for n in (1, 2, 3):
        for rel in enumerate_relations(n):
            s = Structure({"world": list(range(n))}, {}, {"acc": set(rel)})
            assert s.holds(phi) == cond.holds(range(n), rel)


# -- shape of the leo_workers embedding ------------------------------------------------

@pytest.fixture(scope="module")
def leo():
    tp = resolve_defaults(load_problem(FIXTURES / "leo_workers.p"))
    return embed(tp, logic_of(tp.problem))


def find(out, name):
    return next(s for s in out.problem.statements if s.name == name)


def test_single_reflexivity_axiom(leo):
    frames = [n for n, c in leo.provenance.items() if c == FRAME]
    assert frames == ["acc_reflexive"]
    body = find(leo, "acc_reflexive").body
    # ! [W: world] : acc(W,W)
    assert isinstance(body, A.Forall) and len(body.variables) == 1
    (v,) = body.variables
    assert v.type == A.BaseType("world")
    assert body.body == A.Atom("acc", (A.Variable(v.name), A.Variable(v.name)))


def test_possibility_becomes_accessible_witness(leo):
    body = find(leo, "work_hard_to_get_rich").body
    assert isinstance(body, A.Forall) and body.variables[0].type == A.BaseType("world")
    w = A.Variable(body.variables[0].name)
    inner = body.body
    assert isinstance(inner, A.Forall)  # ! [P: person]
    impl = inner.body
    assert isinstance(impl, A.Implies)
    dia = impl.right
    assert isinstance(dia, A.Exists) and dia.variables[0].type == A.BaseType("world")
    v = A.Variable(dia.variables[0].name)
    assert isinstance(dia.body, A.And)
    acc, lifted = dia.body.args
    assert acc == A.Atom("acc", (w, v))
    assert lifted == A.Atom("gets_rich", (v, A.Variable("P")))


def test_hypotheses_at_local_world(leo):
    here = A.FunctionApp("local_world")
    assert find(leo, "alex_works_on_leo_here").body == A.Atom(
        "work_hard", (here, A.FunctionApp("alex"), A.FunctionApp("leo")))
    body = find(leo, "alex_advisor_works_on_leo_here").body
    assert body.args[0] == here
    assert find(leo, "someone_gets_rich_but_not_advisor").role.base == "conjecture"


def test_rigid_constant_domains_have_no_extras(leo):
    counts = leo.counts()
    for cls in (DOMAIN, DOMAIN_COVER, NONEMPTINESS, TERM_LOCALITY):
        assert counts.get(cls, 0) == 0
    assert counts[LIFTED] == 7


def test_ledger_totals(leo):
    lines = ledger(leo)
    assert lines[-1].startswith("totals: declaration")
    assert "acc_reflexive: frame" in lines


def test_rendered_embedding_parses_and_types(leo):
    text = render(leo, with_ledger=True)
    assert "% provenance: frame" in text
    p = parse_problem(text)
    assert check_types(resolve_defaults(p)) == []
    assert logic_of(p) is None


def test_varying_local_flexible_variant():
    text = (FIXTURES / "leo_workers.p").read_text()
    text = text.replace("$constant", "$cumulative").replace("$rigid", "$flexible")
    text = text.replace("$global", "$local")
    tp = resolve_defaults(parse_problem(text))
    out = embed(tp, logic_of(tp.problem))
    counts = out.counts()
    assert counts[NONEMPTINESS] == 2 and counts[DOMAIN_COVER] == 2 and counts[DOMAIN] == 2
    assert counts[TERM_LOCALITY] == 3
    assert check_types(resolve_defaults(out.problem)) == []


def test_foreign_connective_rejected():
    text = ("tff(s,logic, $modal == [ $domains == $constant, $designation == $rigid, "
            "$terms == $global, $modalities == $modal_system_K ] ). "
            "tff(a,axiom, {$knows} @ ( p ) ).")
    tp = resolve_defaults(parse_problem(text))
    with pytest.raises(EmbeddingError, match="unsupported connective"):
        embed(tp, logic_of(tp.problem))


def test_raw_bodies_rejected():
    tp = resolve_defaults(load_problem(FIXTURES / "cantor.p", relaxed=True))
    logic = logic_of(load_problem(FIXTURES / "leo_workers.p"))
    with pytest.raises(UnsupportedDialectError):
        embed(tp, logic)


def test_name_clash_gets_fresh_symbols():
    text = ("tff(s,logic, $modal == [ $domains == $constant, $designation == $rigid, "
            "$terms == $global, $modalities == $modal_system_S4 ] ). "
            "tff(wt,type, world: $tType ). tff(a,type, acc: world > $o ). "
            "tff(x,axiom, ! [W: world] : [.] acc(W) ).")
    tp = resolve_defaults(parse_problem(text))
    out = embed(tp, logic_of(tp.problem))
    assert out.context.world_sort == "world_1"
    assert out.context.acc[None] == "acc_1"
    assert check_types(resolve_defaults(out.problem)) == []
