"""Checking a finite Kripke model against a problem and its logic."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from ..errors import EvaluationError
from ..logics import ModalOperator, NormalizedModalLogic, connective_kind, frame_conditions
from ..syntax import ast as A
from ..syntax.lexer import unquote
from ..syntax.typecheck import TypedProblem
from .evaluate import _Evaluator
from .model import FiniteKripkeModel

COUNTER_SATISFIABLE = "CounterSatisfiable"
SATISFIABLE = "Satisfiable"
CONSISTENT_WITH_THEOREM = "ConsistentWithTheorem"
NOT_A_MODEL = "NotAModel"

_SZS = {COUNTER_SATISFIABLE: "CounterSatisfiable", SATISFIABLE: "Satisfiable"}


@dataclass(frozen=True)
class StatementResult:
    name: str
    scope: str  # "global", "local" or "conjecture"
    holds: bool
    witness: str | None = None


@dataclass(frozen=True)
class Verdict:
    statements: tuple[StatementResult, ...]
    frames: dict[str | None, dict[str, bool]]
    domains_ok: bool
    designation_ok: bool
    locality_ok: bool
    conjecture: bool | None
    problems: tuple[str, ...] = field(default=())

    @property
    def assumptions_ok(self) -> bool:
        return all(r.holds for r in self.statements if r.scope != "conjecture")

    @property
    def frames_ok(self) -> bool:
        return all(all(c.values()) for c in self.frames.values())

    @property
    def is_model(self) -> bool:
        return (self.assumptions_ok and self.frames_ok and self.domains_ok
                and self.designation_ok and self.locality_ok)

    @property
    def classification(self) -> str:
        if not self.is_model:
            return NOT_A_MODEL
        if self.conjecture is None:
            return SATISFIABLE
        return CONSISTENT_WITH_THEOREM if self.conjecture else COUNTER_SATISFIABLE

    @property
    def szs(self) -> str:
        return _SZS.get(self.classification, "Unknown")

    def lines(self) -> list[str]:
        out = []
        for r in self.statements:
            status = "true" if r.holds else "false"
            where = f" ({r.witness})" if r.witness else ""
            out.append(f"{r.scope} {r.name}: {status}{where}")
        for idx, conds in self.frames.items():
            label = "mono" if idx is None else idx
            for cond, ok in sorted(conds.items()):
                out.append(f"frame {label} {cond}: {'ok' if ok else 'violated'}")
        out.append(f"domains: {'ok' if self.domains_ok else 'violated'}")
        out.append(f"designation: {'ok' if self.designation_ok else 'violated'}")
        out.append(f"term locality: {'ok' if self.locality_ok else 'violated'}")
        out.extend(self.problems)
        out.append(f"classification: {self.classification}")
        return out


def scope_of(s: A.AnnotatedFormula) -> str | None:
    """``global``/``local`` for assumptions, ``conjecture``, or None if not semantic."""
    base, sub = s.role.base, s.role.subrole
    if base in ("type", "logic", "interpretation"):
        return None
    if base == "conjecture":
        return "conjecture"
    if sub == "local" or base in ("hypothesis", "negated_conjecture") and sub != "global":
        return "local"
    return "global"


def semantic_statements(tp: TypedProblem) -> list[tuple[A.AnnotatedFormula, str]]:
    out = []
    for s in tp.problem.statements:
        scope = scope_of(s)
        if scope is None:
            continue
        if isinstance(s.body, (A.RawFormula, A.TypeDeclaration, A.LogicSpecification)):
            continue
        out.append((s, scope))
    return out


def used_indices(tp: TypedProblem, logic: NormalizedModalLogic | None) -> set[str | None]:
    found: set[str | None] = set(logic.per_index) if logic is not None else set()
    for s, _ in semantic_statements(tp):
        for node in A.subformulas(s.body):
            if isinstance(node, A.NonClassicalApp):
                if logic is None:
                    found.add(node.connective.index)
                    continue
                kind = connective_kind(node.connective, logic)
                if isinstance(kind, ModalOperator):
                    found.add(kind.index)
    return found


def _arg_sorts(ty: A.TptpType) -> tuple[list[str], str]:
    if isinstance(ty, A.MappingType):
        return [unquote(t.name) for t in ty.args], unquote(ty.result.name)
    return [], unquote(ty.name)


def check_signature(m: FiniteKripkeModel, tp: TypedProblem) -> list[str]:
    """Symbols of *tp*'s statements that *m* does not interpret totally."""
    issues = []
    symbols: set[str] = set()
    sorts: set[str] = set()
    for s, _ in semantic_statements(tp):
        for node in A.subformulas(s.body):
            if isinstance(node, (A.Forall, A.Exists)):
                sorts.update(unquote(v.type.name) if v.type else "$i" for v in node.variables)
        for top in A.formula_terms(s.body):
            for t in A.subterms(top):
                if isinstance(t, A.FunctionApp):
                    symbols.add(unquote(t.symbol))
    for sort in sorted(sorts):
        for w in m.worlds:
            if (w, sort) not in m.domains:
                issues.append(f"no domain for sort {sort} in world {w}")
    for f in sorted(symbols):
        ty = tp.signature.get(f)
        if ty is None:
            issues.append(f"symbol {f} is not declared")
            continue
        args, _ = _arg_sorts(ty)
        cells = list(itertools.product(*(sorted(m.union_domain(s)) for s in args)))
        for w in m.worlds:
            table = m.functions.get((f, w))
            if table is None:
                issues.append(f"no interpretation of {f} in world {w}")
                break
            missing = [c for c in cells if c not in table]
            if missing:
                issues.append(f"{f} undefined on {missing[0]} in world {w}")
                break
    return issues


def check_regime(m: FiniteKripkeModel, tp: TypedProblem, logic: NormalizedModalLogic,
                 indices: set[str | None]) -> tuple[bool, bool, bool]:
    sorts = {s for (_, s) in m.domains}
    domains_ok = True
    if logic.domains == "$constant":
        for s in sorts:
            if len({m.domains.get((w, s)) for w in m.worlds}) > 1:
                domains_ok = False
    elif logic.domains in ("$cumulative", "$decreasing"):
        for idx in indices:
            for u, v in m.accessibility.get(idx, ()):
                for s in sorts:
                    du = m.domains.get((u, s), frozenset())
                    dv = m.domains.get((v, s), frozenset())
                    ok = du <= dv if logic.domains == "$cumulative" else dv <= du
                    domains_ok = domains_ok and ok

    functions = sorted({f for (f, _) in m.functions if f in tp.signature})
    designation_ok = True
    if logic.rigid:
        for f in functions:
            if len({tuple(sorted(m.functions.get((f, w), {}).items())) for w in m.worlds}) > 1:
                designation_ok = False

    locality_ok = True
    if logic.local_terms:
        for f in functions:
            args, result = _arg_sorts(tp.signature[f])
            for w in m.worlds:
                table = m.functions.get((f, w), {})
                local = [sorted(m.domains.get((w, s), ())) for s in args]
                target = m.domains.get((w, result), frozenset())
                for cell in itertools.product(*local):
                    if cell in table and table[cell] not in target:
                        locality_ok = False
    return domains_ok, designation_ok, locality_ok


def check_model(m: FiniteKripkeModel, tp: TypedProblem, logic: NormalizedModalLogic) -> Verdict:
    """Verify *m* against every semantic requirement of *tp* under *logic*."""
    problems = check_signature(m, tp)
    if problems:
        raise EvaluationError("signature mismatch: " + "; ".join(problems))
    indices = used_indices(tp, logic)
    frames: dict[str | None, dict[str, bool]] = {}
    for idx in sorted(indices, key=lambda i: (i is not None, i or "")):
        rel = m.relation(idx)
        conds = frame_conditions(logic.axioms_for(idx))
        frames[idx] = {c.value: c.holds(m.worlds, rel) for c in conds}
    domains_ok, designation_ok, locality_ok = check_regime(m, tp, logic, indices)

    ev = _Evaluator(m, logic)
    results = []
    conjecture: bool | None = None
    for s, scope in semantic_statements(tp):
        if scope == "global":
            bad = next((w for w in m.worlds if not ev.eval(w, s.body, {})), None)
            results.append(StatementResult(s.name, scope, bad is None,
                                           None if bad is None else f"fails at {bad}"))
        else:
            holds = ev.eval(m.local_world, s.body, {})
            results.append(StatementResult(s.name, scope, holds))
            if scope == "conjecture":
                conjecture = holds if conjecture is None else conjecture and holds
    return Verdict(tuple(results), frames, domains_ok, designation_ok, locality_ok, conjecture)
