"""Generators and independent reference evaluators shared by the test modules."""
from __future__ import annotations

import itertools
import random
from pathlib import Path

from tptp_ntf.embedding import EmbeddingOutput
from tptp_ntf.kripke import FiniteKripkeModel, evaluate
from tptp_ntf.kripke.check import scope_of, used_indices
from tptp_ntf.logics import (
    SYSTEMS, NormalizedModalLogic, enumerate_relations, frame_conditions, logic_of,
)
from tptp_ntf.syntax import ast as A
from tptp_ntf.syntax import parse_formula, parse_problem, resolve_defaults

FIXTURES = Path(__file__).parent / "fixtures"

DOMAINS = ("$constant", "$varying", "$cumulative", "$decreasing")
DESIGNATIONS = ("$rigid", "$flexible")
TERMS = ("$global", "$local")
REGIMES = list(itertools.product(DOMAINS, DESIGNATIONS, TERMS))


# -- random modal problems over a fixed two-sorted signature --------------------

SIGNATURE_TEXT = """\
tff(s_type,type, s: $tType ).
tff(c_decl,type, c: $i ).
tff(e_decl,type, e: s ).
tff(g_decl,type, g: $i > $i ).
tff(h_decl,type, h: s > $i ).
tff(p_decl,type, p: $i > $o ).
tff(q_decl,type, q: ( $i * s ) > $o ).
tff(r_decl,type, r: $o ).
"""
PREDICATES = {"p": ("$i",), "q": ("$i", "s"), "r": ()}
FUNCTIONS = {"c": ((), "$i"), "e": ((), "s"), "g": (("$i",), "$i"), "h": (("s",), "$i")}


class FormulaGen:
    def __init__(self, rng: random.Random, indices=(None,)):
        self.rng = rng
        self.indices = indices
        self.counter = 0

    def term(self, sort: str, scope: dict[str, str], depth: int) -> str:
        rng = self.rng
        vars_ = [v for v, s in scope.items() if s == sort]
        funcs = [f for f, (args, res) in FUNCTIONS.items() if res == sort and (args == () or depth > 0)]
        options = vars_ + funcs
        pick = rng.choice(options)
        if pick in FUNCTIONS:
            args, _ = FUNCTIONS[pick]
            if not args:
                return pick
            return f"{pick}({','.join(self.term(a, scope, depth - 1) for a in args)})"
        return pick

    def atom(self, scope: dict[str, str]) -> str:
        rng = self.rng
        k = rng.randrange(5)
        if k == 0:
            sort = rng.choice(["$i", "s"])
            op = rng.choice(["=", "!="])
            return f"{self.term(sort, scope, 1)} {op} {self.term(sort, scope, 1)}"
        pred = rng.choice(list(PREDICATES))
        args = PREDICATES[pred]
        if not args:
            return pred
        return f"{pred}({','.join(self.term(a, scope, 1) for a in args)})"

    def formula(self, depth: int, scope: dict[str, str] | None = None) -> str:
        rng = self.rng
        scope = dict(scope or {})
        if depth <= 0:
            return self.atom(scope)
        k = rng.randrange(9)
        sub = lambda: self.formula(depth - 1, scope)  # noqa: E731
        if k == 0:
            return self.atom(scope)
        if k == 1:
            return f"~ ( {sub()} )"
        if k in (2, 3):
            op = rng.choice(["&", "|", "=>", "<=>", "<=", "<~>"])
            return f"( {sub()} {op} {sub()} )"
        if k in (4, 5):
            self.counter += 1
            var = f"X{self.counter}"
            sort = rng.choice(["$i", "s"])
            q = rng.choice("!?")
            inner = self.formula(depth - 1, {**scope, var: sort})
            return f"{q} [{var}: {sort}] : ( {inner} )"
        idx = rng.choice(self.indices)
        name = rng.choice(["$box", "$dia"])
        conn = f"{{{name}}}" if idx is None else f"{{{name}({idx})}}"
        return f"( {conn} @ ( {sub()} ) )"


def logic_text(regime, default: str, keyed: dict[str, str] | None = None) -> str:
    domains, designation, terms = regime
    mods = f"$modal_system_{default}"
    if keyed:
        parts = [mods] + [f"{{$box({i})}} == $modal_system_{s}" for i, s in keyed.items()]
        mods = "[ " + ", ".join(parts) + " ]"
    return (f"tff(semantics,logic, $modal == [ $domains == {domains}, "
            f"$designation == {designation}, $terms == {terms}, $modalities == {mods} ] ).\n")


def random_problem(rng: random.Random, regime, n_statements: int = 3, depth: int = 3) -> str:
    """Problem text: logic statement, signature and random statements of mixed roles."""
    systems = sorted(SYSTEMS)
    keyed = {"#1": rng.choice(systems)} if rng.random() < 0.3 else None
    indices = (None, "#1") if keyed else (None,)
    gen = FormulaGen(rng, indices)
    text = logic_text(regime, rng.choice(systems), keyed) + SIGNATURE_TEXT
    roles = ["axiom", "hypothesis", "axiom-local", "conjecture", "axiom-global"]
    for i in range(n_statements):
        text += f"tff(f{i},{rng.choice(roles)}, {gen.formula(depth)} ).\n"
    return text


# -- random finite Kripke models satisfying a logic ------------------------------


def relations_for(conds, k: int) -> list[frozenset[tuple[int, int]]]:
    worlds = list(range(k))
    return [r for r in enumerate_relations(k) if all(c.holds(worlds, r) for c in conds)]


_REL_CACHE: dict = {}


def _relations(conds, k):
    key = (frozenset(conds), k)
    if key not in _REL_CACHE:
        _REL_CACHE[key] = relations_for(conds, k)
    return _REL_CACHE[key]


def random_model(rng: random.Random, logic: NormalizedModalLogic, indices,
                 max_worlds: int = 3, max_elems: int = 2, tries: int = 200) -> FiniteKripkeModel | None:
    """A random model over the fixed signature that meets every regime constraint of *logic*."""
    for _ in range(tries):
        k = rng.randint(1, max_worlds)
        worlds = tuple(f"w{i}" for i in range(k))
        acc = {}
        ok = True
        for idx in indices:
            rels = _relations(frame_conditions(logic.axioms_for(idx)), k)
            if not rels:
                ok = False
                break
            rel = rng.choice(rels)
            acc[idx] = frozenset((worlds[a], worlds[b]) for a, b in rel)
        if not ok:
            continue
        universes = {s: [f"{s.strip('$')}{j}" for j in range(rng.randint(1, max_elems))]
                     for s in ("$i", "s")}
        domains = {}
        for s, univ in universes.items():
            for w in worlds:
                if logic.constant_domains:
                    domains[(w, s)] = frozenset(univ)
                else:
                    sub = [x for x in univ if rng.random() < 0.6]
                    domains[(w, s)] = frozenset(sub or [rng.choice(univ)])
        if not _domains_ok(logic, domains, acc, worlds, universes):
            continue
        functions = {}
        base = None
        for w in worlds:
            for f, (args, res) in FUNCTIONS.items():
                cells = list(itertools.product(*(universes[a] for a in args)))
                if logic.rigid and base is not None:
                    functions[(f, w)] = dict(functions[(f, worlds[0])])
                    continue
                table = {}
                for cell in cells:
                    local = all(x in domains[(w, a)] for x, a in zip(cell, args))
                    pool = sorted(domains[(w, res)]) if logic.local_terms and local else universes[res]
                    table[cell] = rng.choice(pool)
                functions[(f, w)] = table
            base = w
        if logic.rigid and logic.local_terms:
            if not _locality_ok(functions, domains, worlds, worlds[0]):
                continue
        predicates = {}
        for w in worlds:
            for pr, args in PREDICATES.items():
                cells = list(itertools.product(*(universes[a] for a in args)))
                ext = frozenset(c for c in cells if rng.random() < 0.5)
                if ext:
                    predicates[(pr, w)] = ext
        return FiniteKripkeModel(worlds, rng.choice(worlds), acc, domains, functions, predicates)
    return None


def _domains_ok(logic, domains, acc, worlds, universes) -> bool:
    for s, univ in universes.items():
        if set().union(*(domains[(w, s)] for w in worlds)) != set(univ):
            return False
        for rel in acc.values():
            for u, v in rel:
                if logic.domains == "$cumulative" and not domains[(u, s)] <= domains[(v, s)]:
                    return False
                if logic.domains == "$decreasing" and not domains[(v, s)] <= domains[(u, s)]:
                    return False
    return True


def _locality_ok(functions, domains, worlds, w0) -> bool:
    for w in worlds:
        for f, (args, res) in FUNCTIONS.items():
            for cell, val in functions[(f, w0)].items():
                if all(x in domains[(w, a)] for x, a in zip(cell, args)) and val not in domains[(w, res)]:
                    return False
    return True


# -- reference evaluators ----------------------------------------------------------


class Structure:
    """A many-sorted classical structure: sort universes, function and relation tables."""

    def __init__(self, universes, functions, predicates):
        self.universes = universes
        self.functions = functions
        self.predicates = predicates

    def term(self, t, a):
        if isinstance(t, A.Variable):
            return a[t.name]
        args = tuple(self.term(x, a) for x in t.args)
        return self.functions[t.symbol][args]

    def holds(self, phi, a=None) -> bool:
        a = a or {}
        if isinstance(phi, A.Atom):
            return tuple(self.term(x, a) for x in phi.args) in self.predicates[phi.predicate]
        if isinstance(phi, A.Equality):
            return self.term(phi.left, a) == self.term(phi.right, a)
        if isinstance(phi, A.Inequality):
            return self.term(phi.left, a) != self.term(phi.right, a)
        if isinstance(phi, A.TrueConst):
            return True
        if isinstance(phi, A.FalseConst):
            return False
        if isinstance(phi, A.Not):
            return not self.holds(phi.body, a)
        if isinstance(phi, A.And):
            return all(self.holds(x, a) for x in phi.args)
        if isinstance(phi, A.Or):
            return any(self.holds(x, a) for x in phi.args)
        if isinstance(phi, A.Implies):
            return (not self.holds(phi.left, a)) or self.holds(phi.right, a)
        if isinstance(phi, A.ReverseImplies):
            return (not self.holds(phi.right, a)) or self.holds(phi.left, a)
        if isinstance(phi, A.Iff):
            return self.holds(phi.left, a) == self.holds(phi.right, a)
        if isinstance(phi, A.Xor):
            return self.holds(phi.left, a) != self.holds(phi.right, a)
        if isinstance(phi, (A.Forall, A.Exists)):
            names = [v.name for v in phi.variables]
            ranges = [self.universes[v.type.name] for v in phi.variables]
            results = (self.holds(phi.body, {**a, **dict(zip(names, vals))})
                       for vals in itertools.product(*ranges))
            return all(results) if isinstance(phi, A.Forall) else any(results)
        raise TypeError(type(phi).__name__)


def induced_structure(m: FiniteKripkeModel, out: EmbeddingOutput) -> Structure:
    """The classical structure that *m* determines on the embedded signature."""
    ctx = out.context
    universes = {ctx.world_sort: list(m.worlds)}
    for s in m.sorts:
        universes[s] = sorted(m.union_domain(s))
    preds: dict[str, set] = {}
    for idx, name in ctx.acc.items():
        preds[name] = set(m.relation(idx))
    for ty, name in ctx.guards.items():
        preds[name] = {(w, x) for w in m.worlds for x in m.domain(w, ty)}
    funcs: dict[str, dict] = {ctx.local_world: {(): m.local_world}}
    for symbol, (_, ty) in out.table.items():
        is_pred = (ty.result if isinstance(ty, A.MappingType) else ty) == A.BOOLEAN
        if is_pred:
            preds[symbol] = {(w, *args) for w in m.worlds for args in m.extension(symbol, w)}
        elif ctx.logic.rigid:
            funcs[symbol] = dict(m.table(symbol, m.worlds[0]))
        else:
            funcs[symbol] = {(w, *args): v for w in m.worlds for args, v in m.table(symbol, w).items()}
    return Structure(universes, funcs, preds)


# -- propositional modal reference -----------------------------------------------


def prop_holds(phi, w, rel, val, n) -> bool:
    """Truth of a propositional modal formula at world *w* (worlds are ``range(n)``)."""
    if isinstance(phi, A.Atom):
        return w in val[phi.predicate]
    if isinstance(phi, A.Not):
        return not prop_holds(phi.body, w, rel, val, n)
    if isinstance(phi, A.And):
        return all(prop_holds(x, w, rel, val, n) for x in phi.args)
    if isinstance(phi, A.Or):
        return any(prop_holds(x, w, rel, val, n) for x in phi.args)
    if isinstance(phi, A.Implies):
        return (not prop_holds(phi.left, w, rel, val, n)) or prop_holds(phi.right, w, rel, val, n)
    if isinstance(phi, A.NonClassicalApp):
        succ = [v for v in range(n) if (w, v) in rel]
        inner = phi.args[0]
        if phi.connective.name == "$box":
            return all(prop_holds(inner, v, rel, val, n) for v in succ)
        return any(prop_holds(inner, v, rel, val, n) for v in succ)
    raise TypeError(type(phi).__name__)


# -- case streams used by several suites ---------------------------------------------

EXTRA = [
    "tff('quoted name',axiom, [.] p(a) ).",
    "tff(a1,axiom-local, <.> ( p(a) | ~ q ), file('f.p',orig) ).",
    "tff(a2,hypothesis, {$knows(#x)} @ ( r ), inference(rule,[status(thm)],[a1,a2]), [info(1)] ).",
    "tff(a3,axiom, {$obligatory($param:=[a,b])} @ ( ! [X: $i] : p(X) ) ).",
]


def fuzz_problem(rng: random.Random) -> str:
    text = random_problem(rng, rng.choice(REGIMES), n_statements=rng.randint(1, 4), depth=3)
    for line in rng.sample(EXTRA, rng.randint(0, 2)):
        text += line + "\n"
    return text


def direct_truth(m, s, logic) -> bool:
    if scope_of(s) == "global":
        return all(evaluate(m, w, s.body, logic=logic) for w in m.worlds)
    return evaluate(m, m.local_world, s.body, logic=logic)


def fidelity_cases(regime, count, seed):
    rng = random.Random(seed)
    done = 0
    while done < count:
        tp = resolve_defaults(parse_problem(random_problem(rng, regime, n_statements=3, depth=3)))
        logic = logic_of(tp.problem)
        indices = used_indices(tp, logic)
        m = random_model(rng, logic, indices)
        if m is None:
            continue
        done += 1
        yield tp, logic, m


def scheme_valid(scheme, n, rel) -> bool:
    atoms = ["phi", "psi"]
    for bits in itertools.product(range(1 << n), repeat=2):
        val = {a: {w for w in range(n) if b >> w & 1} for a, b in zip(atoms, bits)}
        if not all(prop_holds(scheme, w, rel, val, n) for w in range(n)):
            return False
    return True


def samples(seed, count):
    """(model, logic, world, closed formula) tuples over random regimes."""
    rng = random.Random(seed)
    out = 0
    while out < count:
        regime = rng.choice(REGIMES)
        tp = resolve_defaults(parse_problem(random_problem(rng, regime, n_statements=1, depth=1)))
        logic = logic_of(tp.problem)
        indices = sorted(used_indices(tp, logic) | {None}, key=str)
        m = random_model(rng, logic, indices)
        if m is None:
            continue
        gen = FormulaGen(rng, tuple(indices))
        for w in m.worlds:
            yield m, logic, w, parse_formula(gen.formula(3))
            out += 1
