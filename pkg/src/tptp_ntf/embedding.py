"""Shallow semantic embedding of NX0 modal problems into classical TF0.

Worlds become a first-class sort, every predicate (and, under flexible
designation, every function) takes the current world as its first argument,
and modal operators quantify over accessible worlds.  Modal axiom sets are
encoded by the first-order frame conditions they correspond to.
"""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field

from .errors import EmbeddingError, UnsupportedDialectError
from .logics import (
    FrameCondition, ModalOperator, NormalizedModalLogic, connective_kind, frame_conditions,
)
from .syntax import ast as A
from .syntax.lexer import unquote
from .syntax.typecheck import TypedProblem

DECLARATION = "declaration"
FRAME = "frame"
DOMAIN = "domain"
DOMAIN_COVER = "domain-cover"
TERM_LOCALITY = "term-locality"
NONEMPTINESS = "nonemptiness"
LIFTED = "lifted"
PROVENANCE_CLASSES = (DECLARATION, FRAME, DOMAIN, DOMAIN_COVER, TERM_LOCALITY, NONEMPTINESS, LIFTED)


def _acc(name: str, w: A.Term, v: A.Term) -> A.Formula:
    return A.Atom(name, (w, v))


def frame_axiom(cond: FrameCondition, acc: str, world: A.BaseType) -> A.Formula:
    """First-order sentence expressing *cond* on the relation *acc*."""
    W, V, U, X = (A.Variable(n) for n in "WVUX")
    tv = lambda *names: tuple(A.TypedVariable(n, world) for n in names)  # noqa: E731
    R = lambda a, b: _acc(acc, a, b)  # noqa: E731
    if cond is FrameCondition.REFLEXIVE:
        return A.Forall(tv("W"), R(W, W))
    if cond is FrameCondition.SYMMETRIC:
        return A.Forall(tv("W", "V"), A.Implies(R(W, V), R(V, W)))
    if cond is FrameCondition.SERIAL:
        return A.Forall(tv("W"), A.Exists(tv("V"), R(W, V)))
    if cond is FrameCondition.TRANSITIVE:
        return A.Forall(tv("W", "V", "U"), A.Implies(A.And((R(W, V), R(V, U))), R(W, U)))
    if cond is FrameCondition.EUCLIDEAN:
        return A.Forall(tv("W", "V", "U"), A.Implies(A.And((R(W, V), R(W, U))), R(V, U)))
    if cond is FrameCondition.AT_MOST_ONE_SUCCESSOR:
        return A.Forall(tv("W", "V", "U"), A.Implies(A.And((R(W, V), R(W, U))), A.Equality(V, U)))
    if cond is FrameCondition.SHIFT_REFLEXIVE:
        return A.Forall(tv("W", "V"), A.Implies(R(W, V), R(V, V)))
    if cond is FrameCondition.DENSE:
        return A.Forall(tv("W", "V"), A.Implies(R(W, V), A.Exists(tv("U"), A.And((R(W, U), R(U, V))))))
    return A.Forall(
        tv("W", "V", "U"),
        A.Implies(A.And((R(W, V), R(W, U))), A.Exists(tv("X"), A.And((R(V, X), R(U, X))))),
    )


@dataclass
class EmbeddingContext:
    logic: NormalizedModalLogic
    world_sort: str
    local_world: str
    acc: dict[str | None, str]
    guards: dict[str, str]
    table: dict[str, tuple[str, A.TptpType]] = field(default_factory=dict)
    used: set[str] = field(default_factory=set)

    @property
    def world(self) -> A.BaseType:
        return A.BaseType(self.world_sort)

    def fresh(self, base: str) -> str:
        name, n = base, 0
        while name in self.used:
            n += 1
            name = f"{base}_{n}"
        self.used.add(name)
        return name

    def acc_name(self, index: str | None) -> str:
        try:
            return self.acc[index]
        except KeyError:
            raise EmbeddingError(f"no accessibility relation for index {index}") from None

    def guard(self, ty: A.BaseType) -> str | None:
        if self.logic.constant_domains:
            return None
        return self.guards[ty.name]


@dataclass(frozen=True)
class EmbeddingOutput:
    problem: A.Problem
    context: EmbeddingContext
    provenance: dict[str, str]

    @property
    def table(self) -> dict[str, tuple[str, A.TptpType]]:
        return self.context.table

    def counts(self) -> Counter:
        return Counter(self.provenance.values())


def ledger(out: EmbeddingOutput) -> list[str]:
    """Provenance listing: one line per output statement, then per-class totals."""
    lines = [f"{name}: {cls}" for name, cls in out.provenance.items()]
    counts = out.counts()
    lines.append("totals: " + ", ".join(f"{c} {counts.get(c, 0)}" for c in PROVENANCE_CLASSES))
    return lines


def _index_slug(index: str) -> str:
    return re.sub(r"[^A-Za-z0-9_]", "", index.lstrip("#")) or "idx"


def _type_slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_]", "", unquote(name).lstrip("$")) or "ty"


class _Embedder:
    def __init__(self, tp: TypedProblem, logic: NormalizedModalLogic):
        self.tp = tp
        self.logic = logic
        used = set(tp.signature) | set(tp.user_types)
        used |= {unquote(s.name) for s in tp.problem.statements}
        self.used = used
        self.out: list[A.AnnotatedFormula] = []
        self.provenance: dict[str, str] = {}
        self.world_counter = 0

    # -- naming --------------------------------------------------------------

    def build_context(self) -> EmbeddingContext:
        indices = self.used_indices()
        ctx = EmbeddingContext(self.logic, "", "", {}, {}, used=set(self.used))
        ctx.world_sort = ctx.fresh("world")
        ctx.local_world = ctx.fresh("local_world")
        for idx in sorted(indices, key=lambda i: (i is not None, i or "")):
            ctx.acc[idx] = ctx.fresh("acc" if idx is None else f"acc_{_index_slug(idx)}")
        if not self.logic.constant_domains:
            for ty in self.guarded_types():
                ctx.guards[ty] = ctx.fresh(f"eiw_{_type_slug(ty)}")
        return ctx

    def used_indices(self) -> set[str | None]:
        found: set[str | None] = set(self.logic.per_index)
        for s in self.tp.problem.statements:
            if isinstance(s.body, (A.TypeDeclaration, A.LogicSpecification)):
                continue
            for node in A.subformulas(s.body):
                if isinstance(node, A.NonClassicalApp):
                    kind = connective_kind(node.connective, self.logic)
                    if not isinstance(kind, ModalOperator):
                        raise EmbeddingError(
                            f"unsupported connective {kind.name} under {self.logic.family.logic}"
                        )
                    found.add(kind.index)
        return found

    def guarded_types(self) -> list[str]:
        types = sorted(self.tp.user_types)
        if self.uses_individuals():
            types.append("$i")
        return types

    def uses_individuals(self) -> bool:
        for ty in self.tp.signature.values():
            parts = [*ty.args, ty.result] if isinstance(ty, A.MappingType) else [ty]
            if A.INDIVIDUAL in parts:
                return True
        for s in self.tp.problem.statements:
            if isinstance(s.body, (A.TypeDeclaration, A.LogicSpecification)):
                continue
            for node in A.subformulas(s.body):
                if isinstance(node, (A.Forall, A.Exists)):
                    if any(v.type == A.INDIVIDUAL for v in node.variables):
                        return True
        return False

    # -- emission ------------------------------------------------------------

    def emit(self, base: str, role: str, body: A.Statement, cls: str, keep_name: bool = False) -> None:
        name = base if keep_name else self.ctx.fresh(base)
        self.out.append(A.AnnotatedFormula("tff", name, A.Role(role), body))
        self.provenance[name] = cls

    def declare(self, base: str, symbol: str, ty: A.TptpType | A.TType) -> None:
        self.emit(base, "type", A.TypeDeclaration(symbol, ty), DECLARATION)

    def lifted_type(self, symbol: str, ty: A.TptpType) -> A.TptpType:
        world = self.ctx.world
        if isinstance(ty, A.TType):
            return ty
        is_pred = (ty.result if isinstance(ty, A.MappingType) else ty) == A.BOOLEAN
        if not is_pred and self.logic.rigid:
            return ty
        args = ty.args if isinstance(ty, A.MappingType) else ()
        result = ty.result if isinstance(ty, A.MappingType) else ty
        return A.MappingType((world, *args), result)

    def run(self) -> EmbeddingOutput:
        self.ctx = ctx = self.build_context()
        world = ctx.world
        self.declare(f"{ctx.world_sort}_type", ctx.world_sort, A.TType())
        for ty in sorted(self.tp.user_types):
            self.declare(f"{_type_slug(ty)}_type", ty, A.TType())
        self.declare(f"{ctx.local_world}_decl", ctx.local_world, world)
        for idx, acc in ctx.acc.items():
            self.declare(f"{acc}_decl", acc, A.MappingType((world, world), A.BOOLEAN))
        for ty, guard in ctx.guards.items():
            self.declare(f"{guard}_decl", guard, A.MappingType((world, A.BaseType(ty)), A.BOOLEAN))
        for symbol in sorted(self.tp.signature):
            ty = self.tp.signature[symbol]
            lifted = self.lifted_type(symbol, ty)
            ctx.table[symbol] = (symbol, lifted)
            self.declare(f"{_type_slug(symbol)}_decl", symbol, lifted)

        for idx, acc in ctx.acc.items():
            for cond in sorted(frame_conditions(self.logic.axioms_for(idx)), key=lambda c: c.value):
                self.emit(f"{acc}_{cond.value.replace('-', '_')}", "axiom",
                          frame_axiom(cond, acc, world), FRAME)
        self.domain_axioms()

        for s in self.tp.problem.statements:
            self.lift_statement(s)
        problem = A.Problem((), tuple(self.out))
        return EmbeddingOutput(problem, ctx, dict(self.provenance))

    def domain_axioms(self) -> None:
        ctx = self.ctx
        if self.logic.constant_domains:
            return
        world = ctx.world
        Wv, Vv, Xv = A.Variable("W"), A.Variable("V"), A.Variable("X")
        for ty, guard in ctx.guards.items():
            sort = A.BaseType(ty)
            slug = _type_slug(ty)
            self.emit(
                f"{slug}_nonempty", "axiom",
                A.Forall((A.TypedVariable("W", world),),
                         A.Exists((A.TypedVariable("X", sort),), A.Atom(guard, (Wv, Xv)))),
                NONEMPTINESS,
            )
            # Every element of the sort exists in some world.
            self.emit(
                f"{slug}_covered", "axiom",
                A.Forall((A.TypedVariable("X", sort),),
                         A.Exists((A.TypedVariable("W", world),), A.Atom(guard, (Wv, Xv)))),
                DOMAIN_COVER,
            )
            for idx, acc in ctx.acc.items():
                if self.logic.domains == "$cumulative":
                    src, dst, label = Wv, Vv, "cumulative"
                elif self.logic.domains == "$decreasing":
                    src, dst, label = Vv, Wv, "decreasing"
                else:
                    continue
                body = A.Forall(
                    (A.TypedVariable("W", world), A.TypedVariable("V", world), A.TypedVariable("X", sort)),
                    A.Implies(A.And((_acc(acc, Wv, Vv), A.Atom(guard, (src, Xv)))),
                              A.Atom(guard, (dst, Xv))),
                )
                self.emit(f"{slug}_{label}_{_index_slug(acc)}", "axiom", body, DOMAIN)
        if self.logic.local_terms:
            self.term_locality_axioms()

    def term_locality_axioms(self) -> None:
        ctx = self.ctx
        world = ctx.world
        Wv = A.Variable("W")
        for symbol in sorted(self.tp.signature):
            ty = self.tp.signature[symbol]
            if isinstance(ty, A.TType):
                continue
            args = ty.args if isinstance(ty, A.MappingType) else ()
            result = ty.result if isinstance(ty, A.MappingType) else ty
            if result == A.BOOLEAN:
                continue
            arg_vars = tuple(A.Variable(f"X{i}") for i in range(1, len(args) + 1))
            term_args = (Wv, *arg_vars) if not self.logic.rigid else arg_vars
            value = A.FunctionApp(symbol, term_args)
            concl = A.Atom(ctx.guards[result.name], (Wv, value))
            guards = [A.Atom(ctx.guards[t.name], (Wv, v)) for t, v in zip(args, arg_vars)]
            if len(guards) == 1:
                body = A.Implies(guards[0], concl)
            elif guards:
                body = A.Implies(A.And(tuple(guards)), concl)
            else:
                body = concl
            bound = (A.TypedVariable("W", world),
                     *(A.TypedVariable(v.name, t) for v, t in zip(arg_vars, args)))
            self.emit(f"{_type_slug(symbol)}_local", "axiom", A.Forall(bound, body), TERM_LOCALITY)

    def lift_statement(self, s: A.AnnotatedFormula) -> None:
        if s.language not in ("tff", "fof"):
            raise UnsupportedDialectError(f"{s.language} statement {s.name} cannot be embedded")
        base = s.role.base
        if base in ("type", "logic"):
            return
        if base == "interpretation":
            raise EmbeddingError(f"interpretation statement {s.name} cannot be embedded")
        if isinstance(s.body, A.RawFormula):
            raise UnsupportedDialectError(f"statement {s.name} is outside NX0")
        self.world_counter = 0
        self.reserved = A.variable_names(s.body)
        local = s.role.subrole == "local" or (base == "hypothesis" and s.role.subrole != "global")
        if base in ("conjecture", "negated_conjecture"):
            local = True
        if local:
            body = self.formula(s.body, A.FunctionApp(self.ctx.local_world))
        else:
            w = self.world_var()
            body = A.Forall((A.TypedVariable(w.name, self.ctx.world),), self.formula(s.body, w))
        role = base if base in ("conjecture", "negated_conjecture") else "axiom"
        self.emit(s.name, role, body, LIFTED, keep_name=True)

    def world_var(self) -> A.Variable:
        while True:
            self.world_counter += 1
            name = f"W{self.world_counter}"
            if name not in self.reserved:
                return A.Variable(name)

    # -- translation -----------------------------------------------------------

    def term(self, t: A.Term, w: A.Term) -> A.Term:
        if isinstance(t, A.Variable):
            return t
        if isinstance(t, A.IntegerLiteral):
            raise UnsupportedDialectError("arithmetic is not supported")
        if isinstance(t, A.DefinedConstant):
            raise EmbeddingError(f"defined constant {t.name} cannot appear in a problem")
        args = tuple(self.term(a, w) for a in t.args)
        if not self.logic.rigid:
            args = (w, *args)
        return A.FunctionApp(t.symbol, args)

    def guarded(self, variables: tuple[A.TypedVariable, ...], w: A.Term) -> list[A.Formula]:
        out = []
        for v in variables:
            if v.type is None:
                raise EmbeddingError(f"untyped variable {v.name}; resolve defaults first")
            guard = self.ctx.guard(v.type)
            if guard is not None:
                out.append(A.Atom(guard, (w, A.Variable(v.name))))
        return out

    def formula(self, phi: A.Formula, w: A.Term) -> A.Formula:
        if isinstance(phi, A.Atom):
            if phi.predicate.startswith("$"):
                raise EmbeddingError(f"defined predicate {phi.predicate} cannot appear in a problem")
            return A.Atom(phi.predicate, (w, *(self.term(a, w) for a in phi.args)))
        if isinstance(phi, A.Equality):
            return A.Equality(self.term(phi.left, w), self.term(phi.right, w))
        if isinstance(phi, A.Inequality):
            return A.Not(A.Equality(self.term(phi.left, w), self.term(phi.right, w)))
        if isinstance(phi, (A.TrueConst, A.FalseConst)):
            return phi
        if isinstance(phi, A.Not):
            return A.Not(self.formula(phi.body, w))
        if isinstance(phi, (A.And, A.Or)):
            return type(phi)(tuple(self.formula(a, w) for a in phi.args))
        if isinstance(phi, A.BINARY_NODES):
            return type(phi)(self.formula(phi.left, w), self.formula(phi.right, w))
        if isinstance(phi, A.Forall):
            body = self.formula(phi.body, w)
            guards = self.guarded(phi.variables, w)
            if guards:
                cond = guards[0] if len(guards) == 1 else A.And(tuple(guards))
                body = A.Implies(cond, body)
            return A.Forall(phi.variables, body)
        if isinstance(phi, A.Exists):
            body = self.formula(phi.body, w)
            guards = self.guarded(phi.variables, w)
            if guards:
                body = A.And((*guards, body))
            return A.Exists(phi.variables, body)
        if isinstance(phi, A.NonClassicalApp):
            kind = connective_kind(phi.connective, self.logic)
            if not isinstance(kind, ModalOperator):
                raise EmbeddingError(
                    f"unsupported connective {kind.name} under {self.logic.family.logic}"
                )
            if len(phi.args) != 1:
                raise EmbeddingError(f"modal connective {phi.connective.name} takes one argument")
            v = self.world_var()
            acc = _acc(self.ctx.acc_name(kind.index), w, v)
            inner = self.formula(phi.args[0], v)
            bound = (A.TypedVariable(v.name, self.ctx.world),)
            if kind.is_box:
                return A.Forall(bound, A.Implies(acc, inner))
            return A.Exists(bound, A.And((acc, inner)))
        if isinstance(phi, A.InWorld):
            raise EmbeddingError("$in_world is only meaningful in interpretations")
        raise UnsupportedDialectError("formula outside NX0")


def embed(tp: TypedProblem, logic: NormalizedModalLogic) -> EmbeddingOutput:
    """Compile *tp* under *logic* into a classical typed first-order problem."""
    return _Embedder(tp, logic).run()


def embed_formula(phi: A.Formula, w: A.Term, ctx: EmbeddingContext) -> A.Formula:
    """Translate one formula at world term *w* using an existing context."""
    emb = _Embedder.__new__(_Embedder)
    emb.logic = ctx.logic
    emb.ctx = ctx
    emb.world_counter = 0
    emb.reserved = A.variable_names(phi) | (
        {w.name} if isinstance(w, A.Variable) else set()
    )
    return emb.formula(phi, w)


def render(out: EmbeddingOutput, with_ledger: bool = False) -> str:
    """TPTP text of the embedding, optionally with provenance comments."""
    from .syntax.printer import print_annotated

    chunks = []
    for s in out.problem.statements:
        text = print_annotated(s)
        if with_ledger:
            text = f"% provenance: {out.provenance[s.name]}\n{text}"
        chunks.append(text)
    return "\n\n".join(chunks) + "\n"
