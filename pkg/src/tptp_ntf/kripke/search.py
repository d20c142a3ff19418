"""Bounded, deterministic countermodel search.

Candidates are enumerated by number of worlds, then per-sort domain sizes
(by total size, then lexicographically), then accessibility relations that
satisfy the frame conditions (one representative per permutation class of
the non-local worlds), then function tables, then per-world domains
admitted by the domain and term regime.  For each such skeleton the
problem is grounded to a propositional formula over the predicate atoms,
which a small DPLL procedure completes to predicate extensions.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache

from ..errors import EvaluationError, TptpError
from ..logics import Foreign, FrameCondition, NormalizedModalLogic, connective_kind
from ..syntax import ast as A
from ..syntax.lexer import unquote
from ..syntax.typecheck import TypedProblem
from .check import COUNTER_SATISFIABLE, SATISFIABLE, Verdict, check_model, semantic_statements, used_indices
from .model import FiniteKripkeModel
from .sat import Budget, BudgetExceeded, ClauseSet, conj, disj, solve

FOUND = "found"
NOT_FOUND = "not-found"
BUDGET_EXHAUSTED = "budget-exhausted"
DEFAULT_BUDGET = 10_000_000


@dataclass(frozen=True)
class SearchResult:
    status: str
    model: FiniteKripkeModel | None = None
    verdict: Verdict | None = None
    evaluations: int = 0
    candidates: int = 0

    @property
    def found(self) -> bool:
        return self.status == FOUND


def _sort_of(v: A.TypedVariable) -> str:
    return unquote(v.type.name) if v.type is not None else "$i"


def _slug(sort: str) -> str:
    return re.sub(r"[^A-Za-z0-9_]", "", sort.lstrip("$")) or "s"


@lru_cache(maxsize=None)
def _relations(k: int, conds: frozenset[FrameCondition]) -> tuple[int, ...]:
    """Bitmasks of relations on k worlds satisfying *conds* (bit u*k+v is (u,v))."""
    out = []
    worlds = range(k)
    for mask in range(1 << (k * k)):
        rel = {(u, v) for u in worlds for v in worlds if mask >> (u * k + v) & 1}
        if all(c.holds(worlds, rel) for c in conds):
            out.append(mask)
    return tuple(out)


def _permute(mask: int, perm: tuple[int, ...], k: int) -> int:
    out = 0
    for u in range(k):
        for v in range(k):
            if mask >> (u * k + v) & 1:
                out |= 1 << (perm[u] * k + perm[v])
    return out


def _size_vectors(n_sorts: int, fixed: list[bool], max_elems: int):
    ranges = [range(1, 2) if f else range(1, max_elems + 1) for f in fixed]
    vectors = list(itertools.product(*ranges))
    vectors.sort(key=lambda v: (sum(v), v))
    return vectors


class _Skeleton:
    """Worlds, relations, domains and function tables of one candidate."""

    def __init__(self, k, succ, sizes, domains, tables, rigid):
        self.k = k
        self.succ = succ  # index -> list of successor lists
        self.sizes = sizes  # sort -> n
        self.domains = domains  # (w, sort) -> tuple of elements
        self.tables = tables  # (f, w or None) -> dict
        self.rigid = rigid

    def table(self, f: str, w: int) -> dict:
        return self.tables[(f, None if self.rigid else w)]


class _Grounder:
    def __init__(self, sk: _Skeleton, logic: NormalizedModalLogic, budget: Budget):
        self.sk = sk
        self.logic = logic
        self.budget = budget
        self.atoms: dict[tuple, int] = {}

    def atom(self, key: tuple) -> int:
        v = self.atoms.get(key)
        if v is None:
            v = self.atoms[key] = len(self.atoms) + 1
        return v

    def term(self, t: A.Term, w: int, env: dict) -> int:
        if isinstance(t, A.Variable):
            return env[t.name]
        if isinstance(t, A.FunctionApp):
            args = tuple(self.term(a, w, env) for a in t.args)
            return self.sk.table(unquote(t.symbol), w)[args]
        raise EvaluationError(f"cannot evaluate term {t!r}")

    def modal(self, c: A.NCConnective):
        kind = connective_kind(c, self.logic)
        if isinstance(kind, Foreign):
            raise EvaluationError(f"unsupported connective {kind.name}")
        return kind.is_box, kind.index

    def ground(self, phi: A.Formula, w: int, env: dict, pol: bool):
        self.budget.tick()
        if isinstance(phi, A.Atom):
            args = tuple(self.term(a, w, env) for a in phi.args)
            v = self.atom((unquote(phi.predicate), w, args))
            return v if pol else -v
        if isinstance(phi, (A.Equality, A.Inequality)):
            same = self.term(phi.left, w, env) == self.term(phi.right, w, env)
            if isinstance(phi, A.Inequality):
                same = not same
            return same if pol else not same
        if isinstance(phi, A.TrueConst):
            return pol
        if isinstance(phi, A.FalseConst):
            return not pol
        if isinstance(phi, A.Not):
            return self.ground(phi.body, w, env, not pol)
        if isinstance(phi, (A.And, A.Or)):
            combine = conj if isinstance(phi, A.And) == pol else disj
            return self._lazy(combine, (lambda x=x: self.ground(x, w, env, pol) for x in phi.args))
        if isinstance(phi, A.Implies):
            parts = [lambda: self.ground(phi.left, w, env, not pol),
                     lambda: self.ground(phi.right, w, env, pol)]
            return self._lazy(disj if pol else conj, parts)
        if isinstance(phi, A.ReverseImplies):
            return self.ground(A.Implies(phi.right, phi.left), w, env, pol)
        if isinstance(phi, (A.Iff, A.Xor)):
            same = isinstance(phi, A.Iff) == pol
            lp = self.ground(phi.left, w, env, True)
            ln = self.ground(phi.left, w, env, False)
            rp = self.ground(phi.right, w, env, True)
            rn = self.ground(phi.right, w, env, False)
            if same:
                return disj([conj([lp, rp]), conj([ln, rn])])
            return disj([conj([lp, rn]), conj([ln, rp])])
        if isinstance(phi, (A.Forall, A.Exists)):
            names = [v.name for v in phi.variables]
            ranges = [self.sk.domains[(w, _sort_of(v))] for v in phi.variables]
            combine = conj if isinstance(phi, A.Forall) == pol else disj
            thunks = (
                (lambda vals=vals: self.ground(phi.body, w, {**env, **dict(zip(names, vals))}, pol))
                for vals in itertools.product(*ranges)
            )
            return self._lazy(combine, thunks)
        if isinstance(phi, A.NonClassicalApp):
            is_box, index = self.modal(phi.connective)
            body = phi.args[0]
            combine = conj if is_box == pol else disj
            succ = self.sk.succ[index][w]
            return self._lazy(combine, (lambda v=v: self.ground(body, v, env, pol) for v in succ))
        raise EvaluationError(f"cannot ground {type(phi).__name__}")

    @staticmethod
    def _lazy(combine, thunks):
        """Combine sub-results, stopping at the first absorbing constant."""
        stop = False if combine is conj else True
        parts = []
        for th in thunks:
            r = th()
            if r is stop:
                return stop
            parts.append(r)
        return combine(parts)


class _Search:
    def __init__(self, tp: TypedProblem, logic: NormalizedModalLogic, max_worlds: int,
                 max_elems: int, budget: int | None):
        if max_worlds < 1 or max_elems < 1:
            raise ValueError("search bounds must be at least 1")
        self.tp = tp
        self.logic = logic
        self.max_worlds = max_worlds
        self.max_elems = max_elems
        self.budget = Budget(budget)
        self.candidates = 0
        stmts = semantic_statements(tp)
        self.has_conjecture = any(scope == "conjecture" for _, scope in stmts)
        # Statements without predicate atoms first: they fail fast on function tables.
        stmts.sort(key=lambda sc: any(isinstance(n, A.Atom) for n in A.subformulas(sc[0].body)))
        self.statements = stmts
        self.indices = sorted(used_indices(tp, logic), key=lambda i: (i is not None, i or ""))
        self.rel_indices = [None] + [i for i in self.indices if i is not None]

        occurring_sorts: set[str] = set()
        occurring_fns: set[str] = set()
        for s, _ in stmts:
            for node in A.subformulas(s.body):
                if isinstance(node, (A.Forall, A.Exists)):
                    occurring_sorts.update(_sort_of(v) for v in node.variables)
            for top in A.formula_terms(s.body):
                for t in A.subterms(top):
                    if isinstance(t, A.FunctionApp):
                        occurring_fns.add(unquote(t.symbol))
        self.functions: dict[str, tuple[list[str], str]] = {}
        for f, ty in sorted(tp.signature.items()):
            if isinstance(ty, A.TType):
                continue
            args = [unquote(t.name) for t in ty.args] if isinstance(ty, A.MappingType) else []
            result = unquote((ty.result if isinstance(ty, A.MappingType) else ty).name)
            if result == "$o":
                continue
            self.functions[f] = (args, result)
        sorts = set(tp.user_types) | occurring_sorts
        for f, (args, result) in self.functions.items():
            sorts.update(args)
            sorts.add(result)
        # Functions absent from the statements cannot affect truth and get no table.
        self.functions = {f: v for f, v in self.functions.items() if f in occurring_fns}
        for args, result in self.functions.values():
            occurring_sorts.update(args)
            occurring_sorts.add(result)
        for ty in tp.signature.values():
            if isinstance(ty, A.MappingType):
                sorts.update(unquote(t.name) for t in ty.args)
        sorts.discard("$o")
        sorts.discard("$world")
        self.sorts = sorted(sorts)
        self.fixed = [s not in occurring_sorts for s in self.sorts]

    # -- enumeration -------------------------------------------------------------

    def relation_tuples(self, k: int):
        per_index = []
        for idx in self.rel_indices:
            if idx is None and None not in self.indices:
                per_index.append((0,))  # unused mono relation is left empty
            else:
                per_index.append(_relations(k, self.logic.frame_conditions(idx)))
        perms = [(0, *p) for p in itertools.permutations(range(1, k))]
        for combo in itertools.product(*per_index):
            if all(tuple(_permute(m, p, k) for m in combo) >= combo for p in perms):
                yield combo

    def cells(self, sizes: dict[str, int], k: int):
        """(function, world-or-None, args, result size, is_constant) for each table cell."""
        out = []
        worlds = [None] if self.logic.rigid else list(range(k))
        for f, (args, result) in self.functions.items():
            for w in worlds:
                for key in itertools.product(*(range(sizes[s]) for s in args)):
                    out.append((f, w, key, result, not args))
        return out

    def table_assignments(self, sizes: dict[str, int], k: int):
        cells = self.cells(sizes, k)
        first_world = None if self.logic.rigid else 0
        # Least-number heuristic on constants of the first world: the i-th
        # constant of a sort may only use an element no larger than one past
        # the largest element used by earlier constants of that sort.
        values: list[int] = [0] * len(cells)

        def rec(i: int, top: dict[str, int]):
            if i == len(cells):
                yield list(values)
                return
            f, w, key, result, is_const = cells[i]
            n = sizes[result]
            if is_const and w == first_world:
                limit = min(n, top.get(result, -1) + 2)
            else:
                limit = n
            for v in range(limit):
                values[i] = v
                if is_const and w == first_world:
                    new_top = dict(top)
                    new_top[result] = max(top.get(result, -1), v)
                    yield from rec(i + 1, new_top)
                else:
                    yield from rec(i + 1, top)

        for vals in rec(0, {}):
            tables: dict[tuple, dict] = {}
            for (f, w, key, _, _), v in zip(cells, vals):
                tables.setdefault((f, w), {})[key] = v
            yield tables

    def domain_assignments(self, k: int, sizes: dict[str, int], succ_masks, tables):
        if self.logic.constant_domains:
            yield {(w, s): tuple(range(sizes[s])) for w in range(k) for s in self.sorts}
            return
        per_sort = []
        for s in self.sorts:
            n = sizes[s]
            full = (1 << n) - 1
            subsets = list(range(full, 0, -1))
            options = []
            for combo in itertools.product(subsets, repeat=k):
                union = 0
                for m in combo:
                    union |= m
                if union != full:
                    continue
                if not self.regime_ok(combo, succ_masks, k):
                    continue
                options.append(combo)
            per_sort.append(options)
        for choice in itertools.product(*per_sort):
            masks = dict(zip(self.sorts, choice))
            if self.logic.local_terms and not self.locality_ok(masks, tables, k, sizes):
                continue
            yield {
                (w, s): tuple(e for e in range(sizes[s]) if masks[s][w] >> e & 1)
                for w in range(k) for s in self.sorts
            }

    def regime_ok(self, combo, succ_masks, k) -> bool:
        if self.logic.domains not in ("$cumulative", "$decreasing"):
            return True
        for mask in succ_masks:
            for u in range(k):
                for v in range(k):
                    if mask >> (u * k + v) & 1:
                        a, b = combo[u], combo[v]
                        if self.logic.domains == "$decreasing":
                            a, b = b, a
                        if a & ~b:
                            return False
        return True

    def locality_ok(self, masks, tables, k, sizes) -> bool:
        for f, (args, result) in self.functions.items():
            for w in range(k):
                table = tables[(f, None if self.logic.rigid else w)]
                local = [[e for e in range(sizes[s]) if masks[s][w] >> e & 1] for s in args]
                for key in itertools.product(*local):
                    if not masks[result][w] >> table[key] & 1:
                        return False
        return True

    # -- solving -----------------------------------------------------------------

    def try_candidate(self, sk: _Skeleton):
        self.candidates += 1
        g = _Grounder(sk, self.logic, self.budget)
        formulas = []
        for s, scope in self.statements:
            if scope == "global":
                f = g._lazy(conj, (lambda w=w: g.ground(s.body, w, {}, True) for w in range(sk.k)))
            elif scope == "local":
                f = g.ground(s.body, 0, {}, True)
            else:
                f = g.ground(s.body, 0, {}, False)
            if f is False:
                return None
            formulas.append(f)
        cs = ClauseSet(len(g.atoms) + 1)
        for f in formulas:
            cs.assert_formula(f)
        if cs.unsat:
            return None
        assignment = solve(cs.next_var - 1, cs.clauses, self.budget)
        if assignment is None:
            return None
        true_atoms = [key for key, v in g.atoms.items() if assignment.get(v, False)]
        return true_atoms

    def build_model(self, sk: _Skeleton, masks, true_atoms) -> FiniteKripkeModel:
        wname = [f"w{i + 1}" for i in range(sk.k)]
        ename = {s: [f"d_{_slug(s)}_{i + 1}" for i in range(sk.sizes[s])] for s in self.sorts}
        accessibility = {}
        for idx, mask in zip(self.rel_indices, masks):
            accessibility[idx] = frozenset(
                (wname[u], wname[v]) for u in range(sk.k) for v in range(sk.k) if mask >> (u * sk.k + v) & 1
            )
        domains = {
            (wname[w], s): frozenset(ename[s][e] for e in sk.domains[(w, s)])
            for w in range(sk.k) for s in self.sorts
        }
        functions = {}
        for f, (args, result) in self.functions.items():
            for w in range(sk.k):
                table = sk.table(f, w)
                functions[(f, wname[w])] = {
                    tuple(ename[s][e] for s, e in zip(args, key)): ename[result][v]
                    for key, v in table.items()
                }
        predicates: dict[tuple[str, str], set] = {}
        for pred, w, args in true_atoms:
            sorts = self.pred_sorts(pred)
            tup = tuple(ename[s][e] for s, e in zip(sorts, args))
            predicates.setdefault((pred, wname[w]), set()).add(tup)
        return FiniteKripkeModel(
            tuple(wname), wname[0], accessibility, domains, functions,
            {k: frozenset(v) for k, v in predicates.items()},
        )

    def pred_sorts(self, pred: str) -> list[str]:
        ty = self.tp.signature[pred]
        return [unquote(t.name) for t in ty.args] if isinstance(ty, A.MappingType) else []

    def run(self) -> SearchResult:
        try:
            for k in range(1, self.max_worlds + 1):
                for vec in _size_vectors(len(self.sorts), self.fixed, self.max_elems):
                    sizes = dict(zip(self.sorts, vec))
                    for masks in self.relation_tuples(k):
                        succ = {
                            idx: [[v for v in range(k) if m >> (u * k + v) & 1] for u in range(k)]
                            for idx, m in zip(self.rel_indices, masks)
                        }
                        used_masks = [m for idx, m in zip(self.rel_indices, masks)
                                      if idx is not None or None in self.indices]
                        for tables in self.table_assignments(sizes, k):
                            for doms in self.domain_assignments(k, sizes, used_masks, tables):
                                sk = _Skeleton(k, succ, sizes, doms, tables, self.logic.rigid)
                                atoms = self.try_candidate(sk)
                                if atoms is not None:
                                    return self.finish(sk, masks, atoms)
        except BudgetExceeded:
            return SearchResult(BUDGET_EXHAUSTED, evaluations=self.budget.used, candidates=self.candidates)
        return SearchResult(NOT_FOUND, evaluations=self.budget.used, candidates=self.candidates)

    def finish(self, sk, masks, atoms) -> SearchResult:
        model = self.build_model(sk, masks, atoms)
        verdict = check_model(model, self.tp, self.logic)
        expected = COUNTER_SATISFIABLE if self.has_conjecture else SATISFIABLE
        if verdict.classification != expected:
            raise TptpError(f"internal error: search produced a {verdict.classification} model")
        return SearchResult(FOUND, model, verdict, self.budget.used, self.candidates)


def search_countermodel(
    tp: TypedProblem,
    logic: NormalizedModalLogic,
    max_worlds: int = 3,
    max_elems: int = 3,
    budget: int | None = DEFAULT_BUDGET,
) -> SearchResult:
    """First model in enumeration order where the assumptions hold and the conjecture fails.

    Without a conjecture the first model of the assumptions is returned.
    Exceeding *budget* work units yields status ``budget-exhausted``.
    """
    return _Search(tp, logic, max_worlds, max_elems, budget).run()
