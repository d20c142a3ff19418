"""TPTP derivations as DAGs, with structural, origin and completeness checks."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union

from .errors import DerivationError
from .syntax import ast as A
from .syntax.lexer import COMMENT, tokenize, unquote
from .syntax.printer import print_formula, print_general
from .syntax.typecheck import TypedProblem


@dataclass(frozen=True)
class File:
    file: str
    original: str | None


@dataclass(frozen=True)
class Inference:
    rule: str
    info: tuple[A.GeneralTerm, ...]
    parents: tuple[str, ...]

    @property
    def status(self) -> str | None:
        """The SZS value of a ``status(...)`` info entry, if present."""
        for item in self.info:
            if isinstance(item, A.GeneralApp) and item.functor == "status" and item.args:
                return print_general(item.args[0])
        return None


@dataclass(frozen=True)
class NameRef:
    name: str


@dataclass(frozen=True)
class Other:
    """Any other source record, kept as printed text."""

    text: str


Source = Union[File, Inference, NameRef, Other, None]


@dataclass(frozen=True)
class Node:
    name: str
    role: A.Role | None
    formula: A.Formula | None
    source: Source
    synthetic: bool = False

    @property
    def parents(self) -> tuple[str, ...]:
        if isinstance(self.source, Inference):
            return self.source.parents
        if isinstance(self.source, NameRef):
            return (self.source.name,)
        return ()

    @property
    def is_false(self) -> bool:
        f = self.formula
        if isinstance(f, A.FalseConst):
            return True
        return isinstance(f, A.RawFormula) and _strip_parens(f.tokens) == ("$false",)


@dataclass(frozen=True)
class Derivation:
    nodes: dict[str, Node]
    warnings: tuple[str, ...] = ()

    def children(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {n: [] for n in self.nodes}
        for node in self.nodes.values():
            for p in node.parents:
                if p in out:
                    out[p].append(node.name)
        return out

    def edges(self) -> set[tuple[str, str]]:
        return {(p, n.name) for n in self.nodes.values() for p in n.parents}

    def sinks(self) -> list[str]:
        return sorted(n for n, kids in self.children().items() if not kids)

    def leaves(self) -> list[str]:
        return sorted(n for n, node in self.nodes.items() if not node.parents)


def _name(g: A.GeneralTerm) -> str:
    if isinstance(g, A.GeneralColon):
        return _name(g.left)
    if isinstance(g, A.GeneralWord):
        return unquote(g.text)
    raise DerivationError(f"not a node reference: {print_general(g)}")


def _file_name(text: str) -> str:
    if len(text) >= 2 and text[0] == text[-1] == "'":
        return text[1:-1].replace("\\'", "'").replace("\\\\", "\\")
    return text


class _Builder:
    def __init__(self) -> None:
        self.synthetic: list[Node] = []
        self.counter = 0

    def source(self, owner: str, g: A.GeneralTerm | None) -> Source:
        if g is None:
            return None
        if isinstance(g, A.GeneralApp) and g.functor == "file" and 1 <= len(g.args) <= 2:
            original = _name(g.args[1]) if len(g.args) == 2 else None
            return File(_file_name(print_general(g.args[0])), original)
        if isinstance(g, A.GeneralApp) and g.functor == "inference" and len(g.args) == 3:
            rule, info, parents = g.args
            if not isinstance(parents, A.GeneralList):
                raise DerivationError(f"{owner}: inference parents must be a list")
            info_items = info.items if isinstance(info, A.GeneralList) else (info,)
            names = tuple(self.parent(owner, p) for p in parents.items)
            return Inference(print_general(rule), tuple(info_items), names)
        if isinstance(g, A.GeneralWord):
            return NameRef(unquote(g.text))
        return Other(print_general(g))

    def parent(self, owner: str, g: A.GeneralTerm) -> str:
        if isinstance(g, A.GeneralApp) and g.functor == "inference":
            self.counter += 1
            name = f"{owner}_inference_{self.counter}"
            self.synthetic.append(Node(name, None, None, self.source(name, g), synthetic=True))
            return name
        return _name(g)


def build_dag(p: A.Problem, allow_elided: bool = False) -> Derivation:
    """Nodes and parent links of the derivation *p*.

    Type declarations are signature, not steps, and are left out.  With
    *allow_elided*, parents missing from an excerpted derivation become
    placeholder nodes (with a warning) instead of an error.
    """
    nodes: dict[str, Node] = {}
    warnings: list[str] = []
    builder = _Builder()
    for s in p.statements:
        if isinstance(s.body, (A.TypeDeclaration, A.LogicSpecification)):
            continue
        if s.name in nodes:
            raise DerivationError(f"duplicate node name {s.name}")
        if s.source is None:
            warnings.append(f"{s.name} has no source record")
        nodes[s.name] = Node(s.name, s.role, s.body, builder.source(s.name, s.source))
    for n in builder.synthetic:
        if n.name in nodes:
            raise DerivationError(f"duplicate node name {n.name}")
        nodes[n.name] = n
    for node in list(nodes.values()):
        for parent in node.parents:
            if parent in nodes:
                continue
            if not allow_elided:
                raise DerivationError(f"{node.name} cites unknown node {parent}")
            warnings.append(f"{parent} cited by {node.name} is not in the derivation")
            nodes[parent] = Node(parent, None, None, None, synthetic=True)
    return Derivation(nodes, tuple(warnings))


# -- formula comparison ----------------------------------------------------

_UPPER = re.compile(r"[A-Z][A-Za-z0-9_]*\Z")


def _strip_parens(tokens: tuple[str, ...]) -> tuple[str, ...]:
    while len(tokens) >= 2 and tokens[0] == "(" and tokens[-1] == ")":
        depth = 0
        for i, t in enumerate(tokens):
            depth += t == "("
            depth -= t == ")"
            if depth == 0 and i < len(tokens) - 1:
                return tokens
        tokens = tokens[1:-1]
    return tokens


def _tokens(phi: A.Formula) -> tuple[str, ...]:
    if isinstance(phi, A.RawFormula):
        return phi.tokens
    return tuple(t.lexeme for t in tokenize(print_formula(phi)) if t.kind != COMMENT)


def canonical(phi: A.Formula, negate: bool = False) -> tuple[str, ...]:
    """Token sequence of *phi* with variables renamed by first occurrence.

    With *negate* a single leading ``~`` is expected and dropped.
    """
    toks = _strip_parens(_tokens(phi))
    if negate:
        if not toks or toks[0] != "~":
            return ("<not a negation>",)
        toks = _strip_parens(toks[1:])
    names: dict[str, str] = {}
    out = []
    for t in toks:
        if _UPPER.match(t):
            t = names.setdefault(t, f"V{len(names)}")
        out.append(t)
    return tuple(out)


# -- verification ----------------------------------------------------------

PASS = "pass"
FAIL = "fail"
NOT_APPLICABLE = "not-applicable"


@dataclass(frozen=True)
class StructuralReport:
    acyclicity: str
    origin: str
    completeness: str
    violations: tuple[str, ...] = field(default=())

    @property
    def passed(self) -> bool:
        return FAIL not in (self.acyclicity, self.origin, self.completeness)

    def lines(self) -> list[str]:
        out = [f"acyclicity: {self.acyclicity}", f"origin: {self.origin}",
               f"completeness: {self.completeness}"]
        out.extend(f"violation: {v}" for v in self.violations)
        out.append("PASS" if self.passed else "FAIL")
        return out


def _cycles(d: Derivation) -> list[str]:
    white, grey, black = 0, 1, 2
    colour = {n: white for n in d.nodes}
    found: list[str] = []
    for start in sorted(d.nodes):
        if colour[start] != white:
            continue
        stack = [(start, iter(sorted(d.nodes[start].parents)))]
        colour[start] = grey
        while stack:
            name, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                colour[name] = black
                stack.pop()
                continue
            if nxt not in colour:
                continue
            if colour[nxt] == grey:
                found.append(f"cycle through {nxt}")
            elif colour[nxt] == white:
                colour[nxt] = grey
                stack.append((nxt, iter(sorted(d.nodes[nxt].parents))))
    return sorted(set(found))


def _origin(d: Derivation, problem: A.Problem) -> list[str]:
    bad = []
    conjectures = [s for s in problem.statements if s.role.base == "conjecture"]
    for name in sorted(d.nodes):
        node = d.nodes[name]
        if not isinstance(node.source, File):
            continue
        if node.source.original is None:
            bad.append(f"{name}: file record without an original name")
            continue
        found = problem.find(node.source.original)
        if not found:
            bad.append(f"{name}: {node.source.original} not found in the problem")
            continue
        target = found[0]
        if node.formula is None or isinstance(target.body, (A.TypeDeclaration, A.LogicSpecification)):
            continue
        if node.role is not None and node.role.base == "negated_conjecture":
            ok = any(canonical(node.formula, negate=True) == canonical(c.body)
                     for c in conjectures if not isinstance(c.body, A.TypeDeclaration))
        else:
            ok = canonical(node.formula) == canonical(target.body)
        if not ok:
            bad.append(f"{name}: formula differs from {node.source.original} in the problem")
    return bad


def verify_structure(d: Derivation, problem: A.Problem | TypedProblem | None = None) -> StructuralReport:
    """Acyclicity, leaf origin (when *problem* is given) and completeness."""
    violations: list[str] = []
    cycles = _cycles(d)
    violations.extend(cycles)

    origin = NOT_APPLICABLE
    if problem is not None:
        if isinstance(problem, TypedProblem):
            problem = problem.problem
        issues = _origin(d, problem)
        violations.extend(issues)
        origin = FAIL if issues else PASS

    claims = any(n.is_false or (n.role is not None and n.role.base == "negated_conjecture")
                 for n in d.nodes.values())
    completeness = NOT_APPLICABLE
    if claims:
        if any(d.nodes[s].is_false for s in d.sinks()):
            completeness = PASS
        else:
            completeness = FAIL
            violations.append("no sink node has formula $false")
    return StructuralReport(FAIL if cycles else PASS, origin, completeness, tuple(violations))
