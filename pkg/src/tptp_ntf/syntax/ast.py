"""Immutable abstract syntax for NX0 problems.

Every node is a frozen dataclass, so structural equality is plain ``==`` and
nodes can be shared freely between passes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Union

# -- types -----------------------------------------------------------------


@dataclass(frozen=True)
class TType:
    """The kind ``$tType`` of user-declared types."""


@dataclass(frozen=True)
class BaseType:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class MappingType:
    args: tuple[BaseType, ...]
    result: BaseType

    def __post_init__(self) -> None:
        if not self.args:
            raise ValueError("mapping type needs at least one argument type")


TptpType = Union[TType, BaseType, MappingType]

INDIVIDUAL = BaseType("$i")
BOOLEAN = BaseType("$o")
WORLD = BaseType("$world")
INTEGER = BaseType("$int")
DEFINED_TYPES = frozenset({"$i", "$o", "$world", "$int"})

# -- terms -----------------------------------------------------------------


@dataclass(frozen=True)
class Variable:
    name: str


@dataclass(frozen=True)
class FunctionApp:
    symbol: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True)
class DefinedConstant:
    name: str


@dataclass(frozen=True)
class IntegerLiteral:
    text: str


Term = Union[Variable, FunctionApp, DefinedConstant, IntegerLiteral]

# -- non-classical connectives ---------------------------------------------


@dataclass(frozen=True)
class ParamList:
    items: tuple[ParamValue, ...]


@dataclass(frozen=True)
class NCConnective:
    name: str
    index: str | None = None
    params: tuple[tuple[str, ParamValue], ...] = ()

    def __post_init__(self) -> None:
        keys = [k for k, _ in self.params]
        if len(set(keys)) != len(keys):
            raise ValueError(f"duplicate parameter keys in {{{self.name}}}")
        if self.index is not None and not self.index.startswith("#"):
            raise ValueError("connective index must be #-prefixed")

    @property
    def indexed(self) -> bool:
        return self.index is not None


# -- formulae --------------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True)
class Equality:
    left: Term
    right: Term


@dataclass(frozen=True)
class Inequality:
    left: Term
    right: Term


@dataclass(frozen=True)
class TrueConst:
    pass


@dataclass(frozen=True)
class FalseConst:
    pass


@dataclass(frozen=True)
class Not:
    body: Formula


@dataclass(frozen=True)
class And:
    args: tuple[Formula, ...]


@dataclass(frozen=True)
class Or:
    args: tuple[Formula, ...]


@dataclass(frozen=True)
class Implies:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class ReverseImplies:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Xor:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class TypedVariable:
    name: str
    type: BaseType | None = None


@dataclass(frozen=True)
class Forall:
    variables: tuple[TypedVariable, ...]
    body: Formula

    def __post_init__(self) -> None:
        if not self.variables:
            raise ValueError("empty bound-variable list")


@dataclass(frozen=True)
class Exists:
    variables: tuple[TypedVariable, ...]
    body: Formula

    def __post_init__(self) -> None:
        if not self.variables:
            raise ValueError("empty bound-variable list")


@dataclass(frozen=True)
class NonClassicalApp:
    connective: NCConnective
    args: tuple[Formula, ...]

    def __post_init__(self) -> None:
        if not self.args:
            raise ValueError("non-classical application without arguments")


@dataclass(frozen=True)
class InWorld:
    """``$in_world(w, phi)``: *phi* holds in world *w* (interpretation files)."""

    world: Term
    body: Formula


@dataclass(frozen=True)
class RawFormula:
    """Balanced token capture for bodies outside the NX0 grammar (e.g. THF)."""

    tokens: tuple[str, ...]


Formula = Union[
    Atom, Equality, Inequality, TrueConst, FalseConst, Not, And, Or, Implies,
    ReverseImplies, Iff, Xor, Forall, Exists, NonClassicalApp, InWorld, RawFormula,
]
ParamValue = Union[ParamList, Formula, Term]

BINARY_NODES = (Implies, ReverseImplies, Iff, Xor)

# -- statements ------------------------------------------------------------


@dataclass(frozen=True)
class TypeDeclaration:
    symbol: str
    type: TptpType


@dataclass(frozen=True)
class SpecList:
    entries: tuple[SpecEntry, ...]


@dataclass(frozen=True)
class SpecEntry:
    """``key == value``; *key* is None for the unkeyed head of a list."""

    key: str | NCConnective | None
    value: SpecList | Formula


@dataclass(frozen=True)
class LogicSpecification:
    logic: str
    properties: tuple[SpecEntry, ...]


Statement = Union[Formula, TypeDeclaration, LogicSpecification]

ROLE_BASES = frozenset({
    "axiom", "hypothesis", "conjecture", "negated_conjecture", "plain",
    "lemma", "type", "logic", "interpretation",
})
ASSUMPTION_BASES = frozenset({"axiom", "hypothesis", "lemma", "plain"})
SUBROLES = frozenset({"local", "global", "domain", "mapping", "worlds"})


@dataclass(frozen=True)
class Role:
    base: str
    subrole: str | None = None

    def __post_init__(self) -> None:
        if self.base not in ROLE_BASES:
            raise ValueError(f"unknown role {self.base!r}")
        if self.subrole is None:
            return
        if self.subrole in ("local", "global"):
            if self.base not in ASSUMPTION_BASES:
                raise ValueError(f"subrole -{self.subrole} not allowed on {self.base}")
        elif self.subrole in ("domain", "mapping", "worlds"):
            if self.base != "interpretation":
                raise ValueError(f"subrole -{self.subrole} only allowed on interpretation")
        else:
            raise ValueError(f"unknown subrole {self.subrole!r}")

    def __str__(self) -> str:
        return self.base if self.subrole is None else f"{self.base}-{self.subrole}"


# Opaque general terms for source and useful_info fields.


@dataclass(frozen=True)
class GeneralWord:
    text: str


@dataclass(frozen=True)
class GeneralApp:
    functor: str
    args: tuple[GeneralTerm, ...]


@dataclass(frozen=True)
class GeneralList:
    items: tuple[GeneralTerm, ...]


@dataclass(frozen=True)
class GeneralColon:
    left: GeneralTerm
    right: GeneralTerm


GeneralTerm = Union[GeneralWord, GeneralApp, GeneralList, GeneralColon]


@dataclass(frozen=True)
class AnnotatedFormula:
    language: str
    name: str
    role: Role
    body: Statement
    source: GeneralTerm | None = None
    useful_info: GeneralList | None = None
    line: int = field(default=0, compare=False)

    def __post_init__(self) -> None:
        if self.role.base == "type" and not isinstance(self.body, TypeDeclaration):
            raise ValueError("role type requires a type declaration body")
        if self.role.base == "logic" and not isinstance(self.body, LogicSpecification):
            raise ValueError("role logic requires a logic specification body")


@dataclass(frozen=True)
class Include:
    file: str
    selection: tuple[str, ...] | None = None


@dataclass(frozen=True)
class Problem:
    includes: tuple[Include, ...] = ()
    statements: tuple[AnnotatedFormula, ...] = ()
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def by_role(self, base: str) -> list[AnnotatedFormula]:
        return [s for s in self.statements if s.role.base == base]

    @property
    def logic_statement(self) -> AnnotatedFormula | None:
        found = self.by_role("logic")
        return found[0] if found else None

    def find(self, name: str) -> list[AnnotatedFormula]:
        return [s for s in self.statements if s.name == name]


# -- traversal helpers -----------------------------------------------------


def subformulas(phi: Formula) -> Iterator[Formula]:
    """Pre-order walk over formula nodes (terms and parameters excluded)."""
    stack = [phi]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, Not):
            stack.append(node.body)
        elif isinstance(node, (And, Or)):
            stack.extend(reversed(node.args))
        elif isinstance(node, BINARY_NODES):
            stack.extend((node.right, node.left))
        elif isinstance(node, (Forall, Exists)):
            stack.append(node.body)
        elif isinstance(node, NonClassicalApp):
            stack.extend(reversed(node.args))
        elif isinstance(node, InWorld):
            stack.append(node.body)


def subterms(term: Term) -> Iterator[Term]:
    stack = [term]
    while stack:
        t = stack.pop()
        yield t
        if isinstance(t, FunctionApp):
            stack.extend(reversed(t.args))


def formula_terms(phi: Formula) -> Iterator[Term]:
    """Top-level terms occurring directly in atoms and equalities of *phi*."""
    for node in subformulas(phi):
        if isinstance(node, Atom):
            yield from node.args
        elif isinstance(node, (Equality, Inequality)):
            yield node.left
            yield node.right
        elif isinstance(node, InWorld):
            yield node.world


def variable_names(phi: Formula) -> set[str]:
    names: set[str] = set()
    for node in subformulas(phi):
        if isinstance(node, (Forall, Exists)):
            names.update(v.name for v in node.variables)
    for t in formula_terms(phi):
        names.update(s.name for s in subterms(t) if isinstance(s, Variable))
    return names


def free_variables(phi: Formula, bound: frozenset[str] = frozenset()) -> set[str]:
    if isinstance(phi, (Forall, Exists)):
        return free_variables(phi.body, bound | {v.name for v in phi.variables})
    if isinstance(phi, Atom):
        terms = phi.args
    elif isinstance(phi, (Equality, Inequality)):
        terms = (phi.left, phi.right)
    elif isinstance(phi, InWorld):
        return _term_vars(phi.world, bound) | free_variables(phi.body, bound)
    else:
        out: set[str] = set()
        for child in children(phi):
            out |= free_variables(child, bound)
        return out
    out = set()
    for t in terms:
        out |= _term_vars(t, bound)
    return out


def _term_vars(t: Term, bound: frozenset[str]) -> set[str]:
    return {s.name for s in subterms(t) if isinstance(s, Variable) and s.name not in bound}


def children(phi: Formula) -> tuple[Formula, ...]:
    if isinstance(phi, Not):
        return (phi.body,)
    if isinstance(phi, (And, Or, NonClassicalApp)):
        return phi.args
    if isinstance(phi, BINARY_NODES):
        return (phi.left, phi.right)
    if isinstance(phi, (Forall, Exists, InWorld)):
        return (phi.body,)
    return ()
