"""Default typing and type checking for NX0 problems."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator

from ..errors import TypingError
from . import ast as A
from .lexer import LOWER_WORD_RE, unquote

DEFINED_SIGNATURE: dict[str, A.TptpType] = {
    "$accessible_world": A.MappingType((A.WORLD, A.WORLD), A.BOOLEAN),
    "$local_world": A.WORLD,
}
_KNOWN_TYPES = frozenset({"$i", "$o", "$world"})


@dataclass(frozen=True)
class TypedProblem:
    """A problem whose symbols all carry a type and whose variables are typed."""

    problem: A.Problem
    signature: dict[str, A.TptpType]
    user_types: frozenset[str]
    defaulted: frozenset[str] = frozenset()

    def type_of(self, symbol: str) -> A.TptpType | None:
        key = unquote(symbol)
        if key in self.signature:
            return self.signature[key]
        return DEFINED_SIGNATURE.get(key)

    def predicates(self) -> dict[str, A.TptpType]:
        return {s: t for s, t in self.signature.items() if _result(t) == A.BOOLEAN}

    def functions(self) -> dict[str, A.TptpType]:
        return {
            s: t for s, t in self.signature.items()
            if not isinstance(t, A.TType) and _result(t) != A.BOOLEAN
        }

    def as_problem(self) -> A.Problem:
        """The problem with explicit declarations for every defaulted symbol."""
        decls = tuple(
            A.AnnotatedFormula("tff", _decl_name(s, i), A.Role("type"),
                               A.TypeDeclaration(s, self.signature[s]))
            for i, s in enumerate(sorted(self.defaulted))
        )
        stmts = self.problem.statements
        logic = [s for s in stmts if s.role.base == "logic"]
        rest = [s for s in stmts if s.role.base != "logic"]
        return replace(self.problem, statements=(*logic, *decls, *rest))


def _decl_name(symbol: str, i: int) -> str:
    s = unquote(symbol)
    if LOWER_WORD_RE.match(s):
        return f"{s}_default_decl"
    return f"default_decl_{i}"


def _result(t: A.TptpType) -> A.TptpType:
    return t.result if isinstance(t, A.MappingType) else t


@dataclass(frozen=True)
class TypeIssue:
    statement: str
    message: str
    line: int = field(default=0, compare=False)

    def __str__(self) -> str:
        where = f" (line {self.line})" if self.line else ""
        return f"{self.statement}{where}: {self.message}"


def formula_statements(problem: A.Problem) -> Iterator[A.AnnotatedFormula]:
    for s in problem.statements:
        if not isinstance(s.body, (A.TypeDeclaration, A.LogicSpecification, A.RawFormula)):
            yield s


def _collect_usage(
    phi: A.Formula,
    preds: dict[str, set[int]],
    funcs: dict[str, set[int]],
) -> None:
    for node in A.subformulas(phi):
        if isinstance(node, A.Atom) and not node.predicate.startswith("$"):
            preds.setdefault(unquote(node.predicate), set()).add(len(node.args))
    for top in A.formula_terms(phi):
        for t in A.subterms(top):
            if isinstance(t, A.FunctionApp) and not t.symbol.startswith("$"):
                funcs.setdefault(unquote(t.symbol), set()).add(len(t.args))


def _type_variables(phi: A.Formula) -> A.Formula:
    """Give every untyped bound variable the default type ``$i``."""
    if isinstance(phi, (A.Forall, A.Exists)):
        variables = tuple(
            v if v.type is not None else A.TypedVariable(v.name, A.INDIVIDUAL)
            for v in phi.variables
        )
        return type(phi)(variables, _type_variables(phi.body))
    if isinstance(phi, A.Not):
        return A.Not(_type_variables(phi.body))
    if isinstance(phi, (A.And, A.Or)):
        return type(phi)(tuple(_type_variables(a) for a in phi.args))
    if isinstance(phi, A.BINARY_NODES):
        return type(phi)(_type_variables(phi.left), _type_variables(phi.right))
    if isinstance(phi, A.NonClassicalApp):
        return A.NonClassicalApp(phi.connective, tuple(_type_variables(a) for a in phi.args))
    if isinstance(phi, A.InWorld):
        return A.InWorld(phi.world, _type_variables(phi.body))
    return phi


def resolve_defaults(p: A.Problem | TypedProblem) -> TypedProblem:
    """Assign default types to undeclared symbols and untyped variables.

    Undeclared predicates of arity n get ``($i * ... * $i) > $o``, undeclared
    functions ``($i * ... * $i) > $i`` (constants ``$i``, propositions ``$o``).
    Raises :class:`TypingError` when an undeclared symbol is used with
    inconsistent arities or both as a predicate and as a function.
    """
    if isinstance(p, TypedProblem):
        p = p.as_problem()
    signature: dict[str, A.TptpType] = {}
    user_types: set[str] = set()
    for s in p.statements:
        if not isinstance(s.body, A.TypeDeclaration):
            continue
        decl = s.body
        key = unquote(decl.symbol)
        if isinstance(decl.type, A.RawFormula):
            continue
        if isinstance(decl.type, A.TType):
            user_types.add(key)
            continue
        if key in signature and signature[key] != decl.type:
            raise TypingError(f"conflicting declarations for {decl.symbol} (statement {s.name})")
        signature[key] = decl.type

    preds: dict[str, set[int]] = {}
    funcs: dict[str, set[int]] = {}
    statements: list[A.AnnotatedFormula] = []
    for s in p.statements:
        if isinstance(s.body, (A.TypeDeclaration, A.LogicSpecification, A.RawFormula)):
            statements.append(s)
            continue
        _collect_usage(s.body, preds, funcs)
        statements.append(replace(s, body=_type_variables(s.body)))

    defaulted: set[str] = set()
    for name in sorted(set(preds) | set(funcs)):
        if name in signature or name in user_types:
            continue
        if name in preds and name in funcs:
            raise TypingError(f"symbol {name} used both as predicate and as function")
        arities = preds.get(name) or funcs[name]
        if len(arities) > 1:
            raise TypingError(f"symbol {name} used with inconsistent arities {sorted(arities)}")
        (n,) = arities
        result = A.BOOLEAN if name in preds else A.INDIVIDUAL
        signature[name] = A.MappingType((A.INDIVIDUAL,) * n, result) if n else result
        defaulted.add(name)

    problem = replace(p, statements=tuple(statements))
    return TypedProblem(problem, signature, frozenset(user_types), frozenset(defaulted))


class _Checker:
    def __init__(self, tp: TypedProblem):
        self.tp = tp
        self.issues: list[TypeIssue] = []
        self.current: A.AnnotatedFormula | None = None

    def report(self, message: str) -> None:
        stmt = self.current
        self.issues.append(TypeIssue(stmt.name if stmt else "?", message, stmt.line if stmt else 0))

    def known_type(self, ty: A.BaseType) -> bool:
        return ty.name in _KNOWN_TYPES or unquote(ty.name) in self.tp.user_types

    def check_declaration(self, decl: A.TypeDeclaration) -> None:
        ty = decl.type
        if isinstance(ty, A.TType):
            return
        if isinstance(ty, A.RawFormula):
            self.report(f"type of {decl.symbol} is outside NX0")
            return
        parts = [*ty.args, ty.result] if isinstance(ty, A.MappingType) else [ty]
        for part in parts:
            if not self.known_type(part):
                self.report(f"unknown type {part.name} in declaration of {decl.symbol}")
        if isinstance(ty, A.MappingType) and A.BOOLEAN in ty.args:
            self.report(f"Boolean argument type in declaration of {decl.symbol} (TXF feature)")

    def term_type(self, t: A.Term, env: dict[str, A.BaseType]) -> A.BaseType | None:
        if isinstance(t, A.Variable):
            if t.name not in env:
                self.report(f"unbound variable {t.name}")
                return None
            return env[t.name]
        if isinstance(t, A.IntegerLiteral):
            self.report(f"number {t.text} outside connective parameters (arithmetic unsupported)")
            return None
        if isinstance(t, A.DefinedConstant):
            ty = DEFINED_SIGNATURE.get(t.name)
            if not isinstance(ty, A.BaseType):
                self.report(f"unknown defined constant {t.name}")
                return None
            return ty
        ty = self.tp.type_of(t.symbol)
        if ty is None:
            self.report(f"undeclared symbol {t.symbol}")
            return None
        if isinstance(ty, A.TType):
            self.report(f"type name {t.symbol} used as a term")
            return None
        self.check_application(t.symbol, ty, t.args, env)
        result = _result(ty)
        if result == A.BOOLEAN:
            self.report(f"predicate {t.symbol} used as a term")
            return None
        return result

    def check_application(
        self, symbol: str, ty: A.TptpType, args: tuple[A.Term, ...], env: dict[str, A.BaseType]
    ) -> None:
        expected = ty.args if isinstance(ty, A.MappingType) else ()
        if len(expected) != len(args):
            self.report(f"{symbol} expects {len(expected)} arguments, got {len(args)}")
            for a in args:
                self.term_type(a, env)
            return
        for i, (want, a) in enumerate(zip(expected, args), 1):
            got = self.term_type(a, env)
            if got is not None and got != want:
                self.report(f"argument {i} of {symbol} has type {got}, expected {want}")

    def check_formula(self, phi: A.Formula, env: dict[str, A.BaseType]) -> None:
        if isinstance(phi, A.Atom):
            ty = self.tp.type_of(phi.predicate)
            if ty is None:
                self.report(f"undeclared predicate {phi.predicate}")
                return
            if isinstance(ty, A.TType) or _result(ty) != A.BOOLEAN:
                self.report(f"{phi.predicate} is not a predicate")
                return
            self.check_application(phi.predicate, ty, phi.args, env)
        elif isinstance(phi, (A.Equality, A.Inequality)):
            left = self.term_type(phi.left, env)
            right = self.term_type(phi.right, env)
            if left is not None and right is not None and left != right:
                self.report(f"equality between {left} and {right} terms")
        elif isinstance(phi, (A.Forall, A.Exists)):
            inner = dict(env)
            for v in phi.variables:
                if v.type is None:
                    self.report(f"variable {v.name} has no type")
                    continue
                if not self.known_type(v.type):
                    self.report(f"unknown type {v.type.name} for variable {v.name}")
                inner[v.name] = v.type
            self.check_formula(phi.body, inner)
        elif isinstance(phi, A.InWorld):
            w = self.term_type(phi.world, env)
            if w is not None and w != A.WORLD:
                self.report(f"$in_world expects a $world, got {w}")
            self.check_formula(phi.body, env)
        elif isinstance(phi, A.RawFormula):
            self.report("formula outside the NX0 grammar was not type checked")
        else:
            for child in A.children(phi):
                self.check_formula(child, env)

    def run(self) -> list[TypeIssue]:
        for s in self.tp.problem.statements:
            self.current = s
            if isinstance(s.body, A.TypeDeclaration):
                self.check_declaration(s.body)
            elif isinstance(s.body, A.LogicSpecification):
                continue
            else:
                self.check_formula(s.body, {})
        return self.issues


def check_types(tp: TypedProblem | A.Problem) -> list[TypeIssue]:
    """Type-check every statement; an empty list means the problem is well typed."""
    if isinstance(tp, A.Problem):
        tp = resolve_defaults(tp)
    return _Checker(tp).run()
