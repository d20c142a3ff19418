"""Syntactic statistics over a parsed problem."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from . import ast as A


@dataclass(frozen=True)
class SyntaxStatistics:
    roles: dict[str, int] = field(default_factory=dict)
    type_declarations: int = 0
    user_types: int = 0
    nonclassical_plain: int = 0
    nonclassical_indexed: int = 0
    equalities: int = 0
    quantifiers: int = 0

    @property
    def nonclassical(self) -> int:
        return self.nonclassical_plain + self.nonclassical_indexed

    def lines(self) -> list[str]:
        roles = ", ".join(f"{r} {n}" for r, n in sorted(self.roles.items())) or "none"
        return [
            f"formulae: {sum(self.roles.values())} ({roles})",
            f"types: {self.type_declarations} declarations; {self.user_types} user types",
            f"nonclassical: {self.nonclassical_plain} {{.}}; {self.nonclassical_indexed} {{#}}",
            f"equality: {self.equalities}",
            f"quantifiers: {self.quantifiers}",
        ]


def _param_formulas(v: A.ParamValue):
    if isinstance(v, A.ParamList):
        for item in v.items:
            yield from _param_formulas(item)
    elif not isinstance(v, (A.Variable, A.FunctionApp, A.DefinedConstant, A.IntegerLiteral)):
        yield v


def _walk(phi: A.Formula):
    # Formulae nested in connective parameters are counted too.
    for node in A.subformulas(phi):
        yield node
        if isinstance(node, A.NonClassicalApp):
            for _, value in node.connective.params:
                for sub in _param_formulas(value):
                    yield from _walk(sub)


def census(p: A.Problem) -> SyntaxStatistics:
    roles: Counter[str] = Counter()
    decls = user_types = plain = indexed = eq = quant = 0
    for s in p.statements:
        roles[str(s.role)] += 1
        body = s.body
        if isinstance(body, A.TypeDeclaration):
            decls += 1
            user_types += isinstance(body.type, A.TType)
            continue
        if isinstance(body, (A.LogicSpecification, A.RawFormula)):
            continue
        for node in _walk(body):
            if isinstance(node, A.NonClassicalApp):
                if node.connective.indexed:
                    indexed += 1
                else:
                    plain += 1
            elif isinstance(node, (A.Equality, A.Inequality)):
                eq += 1
            elif isinstance(node, (A.Forall, A.Exists)):
                quant += 1
    return SyntaxStatistics(dict(roles), decls, user_types, plain, indexed, eq, quant)
