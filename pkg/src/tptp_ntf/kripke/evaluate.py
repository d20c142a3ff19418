"""Direct evaluation of NX0 formulae in a finite Kripke model."""
from __future__ import annotations

import itertools
from typing import Mapping

from ..errors import EvaluationError, InterpretationError
from ..logics import Foreign, NormalizedModalLogic, connective_kind
from ..syntax import ast as A
from ..syntax.lexer import unquote
from .model import Element, FiniteKripkeModel, World

Assignment = Mapping[str, Element]


def _sort(v: A.TypedVariable) -> str:
    return unquote(v.type.name) if v.type is not None else "$i"


def eval_term(m: FiniteKripkeModel, w: World, t: A.Term, a: Assignment) -> Element:
    if isinstance(t, A.Variable):
        try:
            return a[t.name]
        except KeyError:
            raise EvaluationError(f"unassigned variable {t.name}") from None
    if isinstance(t, A.FunctionApp):
        args = tuple(eval_term(m, w, s, a) for s in t.args)
        try:
            table = m.table(unquote(t.symbol), w)
        except InterpretationError as e:
            raise EvaluationError(str(e)) from None
        try:
            return table[args]
        except KeyError:
            raise EvaluationError(f"{t.symbol} undefined on {args} in world {w}") from None
    raise EvaluationError(f"cannot evaluate term {t!r} in a model")


def evaluate(
    m: FiniteKripkeModel,
    w: World,
    phi: A.Formula,
    a: Assignment | None = None,
    logic: NormalizedModalLogic | None = None,
) -> bool:
    """Truth of *phi* at world *w* under assignment *a*.

    Quantifiers range over the bound sort's domain at the current world;
    modal connectives follow the accessibility relation of their index.
    Without a *logic* only the generic ``$box``/``$dia`` names are modal.
    """
    return _Evaluator(m, logic).eval(w, phi, dict(a or {}))


class _Evaluator:
    def __init__(self, m: FiniteKripkeModel, logic: NormalizedModalLogic | None):
        self.m = m
        self.logic = logic

    def modal(self, c: A.NCConnective) -> tuple[bool, str | None]:
        if self.logic is None:
            if c.name not in ("$box", "$dia") or c.params:
                raise EvaluationError(f"connective {c.name} needs a logic specification")
            return c.name == "$box", c.index
        kind = connective_kind(c, self.logic)
        if isinstance(kind, Foreign):
            raise EvaluationError(f"unsupported connective {kind.name}")
        return kind.is_box, kind.index

    def eval(self, w: World, phi: A.Formula, a: dict[str, Element]) -> bool:
        m = self.m
        if isinstance(phi, A.Atom):
            args = tuple(eval_term(m, w, t, a) for t in phi.args)
            return args in m.extension(unquote(phi.predicate), w)
        if isinstance(phi, A.Equality):
            return eval_term(m, w, phi.left, a) == eval_term(m, w, phi.right, a)
        if isinstance(phi, A.Inequality):
            return eval_term(m, w, phi.left, a) != eval_term(m, w, phi.right, a)
        if isinstance(phi, A.TrueConst):
            return True
        if isinstance(phi, A.FalseConst):
            return False
        if isinstance(phi, A.Not):
            return not self.eval(w, phi.body, a)
        if isinstance(phi, A.And):
            return all(self.eval(w, x, a) for x in phi.args)
        if isinstance(phi, A.Or):
            return any(self.eval(w, x, a) for x in phi.args)
        if isinstance(phi, A.Implies):
            return not self.eval(w, phi.left, a) or self.eval(w, phi.right, a)
        if isinstance(phi, A.ReverseImplies):
            return not self.eval(w, phi.right, a) or self.eval(w, phi.left, a)
        if isinstance(phi, A.Iff):
            return self.eval(w, phi.left, a) == self.eval(w, phi.right, a)
        if isinstance(phi, A.Xor):
            return self.eval(w, phi.left, a) != self.eval(w, phi.right, a)
        if isinstance(phi, (A.Forall, A.Exists)):
            names = [v.name for v in phi.variables]
            ranges = [sorted(m.domain(w, _sort(v))) for v in phi.variables]
            want = isinstance(phi, A.Forall)
            for values in itertools.product(*ranges):
                inner = {**a, **dict(zip(names, values))}
                if self.eval(w, phi.body, inner) != want:
                    return not want
            return want
        if isinstance(phi, A.NonClassicalApp):
            is_box, index = self.modal(phi.connective)
            if len(phi.args) != 1:
                raise EvaluationError(f"{phi.connective.name} takes one argument")
            body = phi.args[0]
            try:
                succ = m.successors(index, w)
            except InterpretationError as e:
                raise EvaluationError(str(e)) from None
            if is_box:
                return all(self.eval(v, body, a) for v in succ)
            return any(self.eval(v, body, a) for v in succ)
        if isinstance(phi, A.InWorld):
            raise EvaluationError("$in_world is not evaluable inside a model")
        raise EvaluationError(f"cannot evaluate {type(phi).__name__}")
