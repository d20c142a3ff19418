"""Reading and writing TPTP-format Tarskian and Kripke interpretations.

Conventions understood here:

* domain elements are constants of *domain types* ``d_x: $tType`` that are
  promoted into problem types by injections ``d2x: d_x > x``;
* ``! [D: d_x] : ( D = c1 | ... )`` enumerates a domain, per world when it
  occurs under ``$in_world(w, ...)`` and for every world otherwise;
* mapping literals fix function values and predicate extensions, which are
  closed-world (unlisted tuples are false);
* ``$accessible_world(u,v)`` and ``$accessible_world('#i',u,v)`` give the
  mono-modal and indexed accessibility relations.
"""
from __future__ import annotations

import itertools
import re
from collections import defaultdict
from dataclasses import dataclass, field

from ..errors import InterpretationError, TypingError
from ..syntax import ast as A
from ..syntax.lexer import LOWER_WORD_RE, unquote
from ..syntax.printer import print_formula, print_term
from ..syntax.typecheck import TypedProblem, resolve_defaults
from .model import FiniteKripkeModel

IMPLICIT_WORLD = "w0"


def _conjuncts(phi: A.Formula) -> list[A.Formula]:
    if isinstance(phi, A.And):
        out = []
        for x in phi.args:
            out.extend(_conjuncts(x))
        return out
    return [phi]


def _disjuncts(phi: A.Formula) -> list[A.Formula]:
    if isinstance(phi, A.Or):
        out = []
        for x in phi.args:
            out.extend(_disjuncts(x))
        return out
    return [phi]


def _const(t: A.Term) -> str | None:
    if isinstance(t, A.FunctionApp) and not t.args:
        return unquote(t.symbol)
    return None


def _index_name(t: A.Term) -> str | None:
    if isinstance(t, A.FunctionApp) and not t.args:
        s = t.symbol
        if len(s) >= 2 and s[0] == s[-1] == "'":
            s = s[1:-1]
        if s.startswith("#"):
            return s
    return None


@dataclass
class _Declarations:
    types: set[str] = field(default_factory=set)
    worlds: list[str] = field(default_factory=list)
    promotions: dict[str, tuple[str, str]] = field(default_factory=dict)  # d_type -> (fn, sort)
    promotion_fns: dict[str, str] = field(default_factory=dict)  # fn -> d_type
    constants: dict[str, str] = field(default_factory=dict)  # element -> d_type

    def sort_of(self, element: str) -> str:
        return self.promotions[self.constants[element]][1]


def _declarations(p: A.Problem) -> _Declarations:
    d = _Declarations()
    decls = [s.body for s in p.statements if isinstance(s.body, A.TypeDeclaration)]
    for decl in decls:
        if isinstance(decl.type, A.TType):
            d.types.add(unquote(decl.symbol))
    for decl in decls:
        ty, sym = decl.type, unquote(decl.symbol)
        if ty == A.WORLD:
            d.worlds.append(sym)
        elif (isinstance(ty, A.MappingType) and len(ty.args) == 1
              and unquote(ty.args[0].name) in d.types and ty.args[0] != ty.result):
            dom = unquote(ty.args[0].name)
            if dom in d.promotions:
                raise InterpretationError(f"domain type {dom} has two promotion functions")
            d.promotions[dom] = (sym, unquote(ty.result.name))
            d.promotion_fns[sym] = dom
    for decl in decls:
        ty, sym = decl.type, unquote(decl.symbol)
        if isinstance(ty, A.BaseType) and unquote(ty.name) in d.promotions:
            d.constants[sym] = unquote(ty.name)
    return d


class _Reader:
    def __init__(self, p: A.Problem, signature: TypedProblem | None, warnings: list[str]):
        self.p = p
        self.sig = signature
        self.warnings = warnings
        self.d = _declarations(p)
        self.world_enum: list[str] | None = None
        self.local: str | None = None
        self.access: dict[str | None, set[tuple[str, str]]] = defaultdict(set)
        self.enums: dict[str | None, dict[str, list[str]]] = defaultdict(dict)
        self.mappings: list[tuple[str | None, A.Formula]] = []

    # -- pass 1: structure -----------------------------------------------------

    def contexts(self):
        for s in self.p.statements:
            if s.role.base != "interpretation" or isinstance(s.body, A.TypeDeclaration):
                continue
            if isinstance(s.body, A.RawFormula):
                raise InterpretationError(f"statement {s.name} is outside NX0")
            for c in _conjuncts(s.body):
                if isinstance(c, A.InWorld):
                    w = self.world_name(c.world)
                    for inner in _conjuncts(c.body):
                        yield w, inner
                else:
                    yield None, c

    def world_name(self, t: A.Term) -> str:
        if isinstance(t, A.DefinedConstant) and t.name == "$local_world":
            if self.local is None:
                raise InterpretationError("$local_world used before it is fixed")
            return self.local
        name = _const(t)
        if name is None or name not in self.d.worlds:
            raise InterpretationError(f"{t} is not a declared world constant")
        return name

    def structural(self, ctx: str | None, f: A.Formula) -> bool:
        """Consume worlds, accessibility and domain statements; False if *f* is a mapping."""
        if isinstance(f, A.Forall) and len(f.variables) == 1:
            v = f.variables[0]
            vty = unquote(v.type.name) if v.type else "$i"
            values = self.enumeration(v.name, f.body)
            if vty == "$world" and values is not None:
                if ctx is not None:
                    raise InterpretationError("world enumeration inside $in_world")
                self.world_enum = values
                return True
            if vty in self.d.promotions and values is not None:
                if vty in self.enums[ctx]:
                    raise InterpretationError(f"domain {vty} enumerated twice")
                for c in values:
                    if self.d.constants.get(c) != vty:
                        raise InterpretationError(f"{c} is not a declared element of {vty}")
                self.enums[ctx][vty] = values
                return True
        if isinstance(f, A.Forall) and (self.is_surjectivity(f) or self.is_injectivity(f)):
            return True
        if isinstance(f, A.Equality) and (
            f.left == A.DefinedConstant("$local_world") or f.right == A.DefinedConstant("$local_world")
        ):
            other = f.right if f.left == A.DefinedConstant("$local_world") else f.left
            name = _const(other)
            if name is None or name not in self.d.worlds:
                raise InterpretationError("$local_world must equal a declared world constant")
            if self.local is not None and self.local != name:
                raise InterpretationError("conflicting $local_world statements")
            self.local = name
            return True
        if isinstance(f, A.Atom) and f.predicate == "$accessible_world":
            args = f.args
            index = None
            if len(args) == 3:
                index = _index_name(args[0])
                if index is None:
                    raise InterpretationError("indexed accessibility needs a '#i' first argument")
                args = args[1:]
            if len(args) != 2:
                raise InterpretationError("$accessible_world takes two worlds")
            u, v = (_const(a) for a in args)
            if u not in self.d.worlds or v not in self.d.worlds:
                raise InterpretationError("$accessible_world on undeclared worlds")
            self.access[index].add((u, v))
            return True
        if isinstance(f, (A.Inequality, A.Equality)):
            left, right = _const(f.left), _const(f.right)
            if left in self.d.constants and right in self.d.constants:
                if isinstance(f, A.Equality) and left != right:
                    raise InterpretationError(f"distinct elements {left} and {right} equated")
                if isinstance(f, A.Inequality) and left == right:
                    raise InterpretationError(f"{left} != {left}")
                return True
            if left in self.d.worlds and right in self.d.worlds:
                return True  # distinct world constants are already distinct
        return False

    @staticmethod
    def enumeration(var: str, body: A.Formula) -> list[str] | None:
        values = []
        for disj in _disjuncts(body):
            if not isinstance(disj, A.Equality):
                return None
            if disj.left == A.Variable(var) and _const(disj.right):
                values.append(_const(disj.right))
            elif disj.right == A.Variable(var) and _const(disj.left):
                values.append(_const(disj.left))
            else:
                return None
        return values

    def is_surjectivity(self, f: A.Forall) -> bool:
        body = f.body
        if not (isinstance(body, A.Exists) and len(body.variables) == 1):
            return False
        dv = body.variables[0]
        dty = unquote(dv.type.name) if dv.type else "$i"
        if dty not in self.d.promotions or not isinstance(body.body, A.Equality):
            return False
        fn = self.d.promotions[dty][0]
        x, dvar = A.Variable(f.variables[0].name), A.Variable(dv.name)
        image = A.FunctionApp(fn, (dvar,))
        eq = body.body
        return {eq.left, eq.right} == {x, image} or {eq.left, eq.right} == {x, A.FunctionApp(f"'{fn}'", (dvar,))}

    def is_injectivity(self, f: A.Forall) -> bool:
        if len(f.variables) != 2 or not isinstance(f.body, A.Implies):
            return False
        types = {unquote(v.type.name) if v.type else "$i" for v in f.variables}
        return len(types) == 1 and types <= set(self.d.promotions)

    # -- pass 2: mappings --------------------------------------------------------

    def is_element_term(self, t: A.Term) -> bool:
        if isinstance(t, A.FunctionApp) and len(t.args) == 1 and unquote(t.symbol) in self.d.promotion_fns:
            return True
        return _const(t) in self.d.constants

    def element(self, t: A.Term) -> tuple[str, str] | None:
        """(sort, element) for an element term; None when the element is unlisted."""
        if not self.is_element_term(t):
            raise InterpretationError(f"{print_term(t)} is not a domain element")
        if isinstance(t, A.FunctionApp) and t.args:
            dom = self.d.promotion_fns[unquote(t.symbol)]
            c = _const(t.args[0])
            if c is None or self.d.constants.get(c) != dom:
                raise InterpretationError(f"{print_term(t)} is not a promoted element of {dom}")
        else:
            c = _const(t)
        sort = self.d.sort_of(c)
        if c not in self.union_elements[sort]:
            return None
        return sort, c

    def check_symbol(self, symbol: str, arity: int, is_pred: bool) -> None:
        if self.sig is None:
            return
        ty = self.sig.type_of(symbol)
        if ty is None:
            raise InterpretationError(f"mapping mentions undeclared symbol {symbol}")
        n = len(ty.args) if isinstance(ty, A.MappingType) else 0
        result = ty.result if isinstance(ty, A.MappingType) else ty
        if n != arity or (result == A.BOOLEAN) != is_pred:
            raise InterpretationError(f"mapping uses {symbol} inconsistently with its declaration")

    def run(self) -> FiniteKripkeModel:
        for ctx, f in self.contexts():
            if not self.structural(ctx, f):
                self.mappings.append((ctx, f))

        if self.world_enum is not None:
            worlds = self.world_enum
            for w in worlds:
                if w not in self.d.worlds:
                    raise InterpretationError(f"world {w} is not declared")
            if self.local is None:
                raise InterpretationError("missing $local_world")
        elif self.d.worlds:
            raise InterpretationError("world constants declared without a worlds enumeration")
        else:
            worlds = [IMPLICIT_WORLD]
            self.local = IMPLICIT_WORLD
        for ctx in self.enums:
            if ctx is not None and ctx not in worlds:
                raise InterpretationError(f"$in_world for unknown world {ctx}")

        domains: dict[tuple[str, str], frozenset[str]] = {}
        self.union_elements: dict[str, set[str]] = defaultdict(set)
        for dom, (_, sort) in sorted(self.d.promotions.items()):
            for w in worlds:
                values = self.enums.get(w, {}).get(dom, self.enums.get(None, {}).get(dom))
                if values is None:
                    raise InterpretationError(f"non-exhaustive domain enumeration for {dom}")
                domains[(w, sort)] = frozenset(values)
                self.union_elements[sort].update(values)
            unlisted = sorted(c for c, t in self.d.constants.items()
                              if t == dom and c not in self.union_elements[sort])
            for c in unlisted:
                self.warnings.append(f"element {c} of {dom} is outside the enumerated domain; "
                                     "literals mentioning it are ignored")

        functions: dict[tuple[str, str], dict] = defaultdict(dict)
        positive: dict[tuple[str, str], set] = defaultdict(set)
        negative: dict[tuple[str, str], set] = defaultdict(set)
        for ctx, f in self.mappings:
            targets = worlds if ctx is None else [ctx]
            self.mapping(f, targets, functions, positive, negative)
        for key in positive:
            clash = positive[key] & negative.get(key, set())
            if clash:
                raise InterpretationError(f"contradictory literals for {key[0]} on {sorted(clash)[0]}")
        accessibility = {None: frozenset()}
        accessibility.update({i: frozenset(r) for i, r in self.access.items()})
        return FiniteKripkeModel(
            tuple(worlds), self.local, accessibility, domains,
            {k: dict(v) for k, v in functions.items()},
            {k: frozenset(v) for k, v in positive.items()},
        )

    def mapping(self, f, targets, functions, positive, negative) -> None:
        polarity, lit = True, f
        if isinstance(lit, A.Not):
            polarity, lit = False, lit.body
        if isinstance(lit, A.Atom) and not lit.predicate.startswith("$"):
            args = [self.element(a) for a in lit.args]
            if any(a is None for a in args):
                return
            pred = unquote(lit.predicate)
            self.check_symbol(pred, len(args), True)
            tup = tuple(e for _, e in args)
            for w in targets:
                (positive if polarity else negative)[(pred, w)].add(tup)
            return
        if polarity and isinstance(lit, A.Equality):
            for term, value in ((lit.left, lit.right), (lit.right, lit.left)):
                if not isinstance(term, A.FunctionApp) or self.is_element_term(term):
                    continue
                if not self.is_element_term(value):
                    continue
                val = self.element(value)
                args = [self.element(a) for a in term.args]
                if val is None or any(a is None for a in args):
                    return
                fn = unquote(term.symbol)
                self.check_symbol(fn, len(args), False)
                key = tuple(e for _, e in args)
                for w in targets:
                    old = functions[(fn, w)].get(key)
                    if old is not None and old != val[1]:
                        raise InterpretationError(f"contradictory values for {fn}{key}")
                    functions[(fn, w)][key] = val[1]
                return
        raise InterpretationError(f"unrecognized interpretation formula: {print_formula(f)}")


def parse_interpretation(
    p: A.Problem,
    signature: A.Problem | TypedProblem | None = None,
    warnings: list[str] | None = None,
) -> FiniteKripkeModel:
    """Build the model described by an interpretation file.

    *signature* (the problem being interpreted) enables the check that every
    mapped symbol is declared with a matching arity.
    """
    sig = None
    if signature is not None:
        try:
            sig = signature if isinstance(signature, TypedProblem) else resolve_defaults(signature)
        except TypingError as e:
            raise InterpretationError(str(e)) from None
    return _Reader(p, sig, warnings if warnings is not None else []).run()


# -- writing -------------------------------------------------------------------


def _slug(sort: str) -> str:
    return re.sub(r"[^A-Za-z0-9_]", "", sort.lstrip("$")) or "s"


def write_interpretation(m: FiniteKripkeModel, tp: TypedProblem, name: str = "model") -> str:
    """Render *m* as a TPTP Kripke interpretation of *tp*'s symbols."""
    taken = set(tp.signature) | set(tp.user_types)

    def fresh(base: str) -> str:
        n, cand = 0, base
        while cand in taken:
            n += 1
            cand = f"{base}_{n}"
        taken.add(cand)
        return cand

    sorts = sorted(m.sorts)
    dtype = {s: fresh(f"d_{_slug(s)}") for s in sorts}
    promo = {s: fresh(f"d2{_slug(s)}") for s in sorts}
    elements: dict[str, str] = {}
    for s in sorts:
        for e in sorted(m.union_domain(s)):
            if e in elements:
                raise InterpretationError(f"element {e} belongs to two sorts")
            elements[e] = e if LOWER_WORD_RE.match(e) and e not in taken else fresh(f"e_{_slug(s)}")
            taken.add(elements[e])
    wname = {w: (w if LOWER_WORD_RE.match(w) and w not in taken else fresh("w")) for w in m.worlds}
    taken.update(wname.values())

    def sname(base: str) -> str:
        return fresh(f"{name}_{base}")

    out: list[str] = []

    def decl(symbol: str, ty: str) -> None:
        out.append(f"tff({sname(symbol + '_decl')},type, {symbol}: {ty} ).")

    for s in sorts:
        decl(dtype[s], "$tType")
    for s in sorts:
        for e in sorted(m.union_domain(s)):
            decl(elements[e], dtype[s])
    for s in sorts:
        decl(promo[s], f"{dtype[s]} > {s}")
    for w in m.worlds:
        decl(wname[w], "$world")

    world_parts = [f"! [W: $world] : ( {' | '.join(f'W = {wname[w]}' for w in m.worlds)} )",
                   f"$local_world = {wname[m.local_world]}"]
    for idx in sorted(m.accessibility, key=lambda i: (i is not None, i or "")):
        for u, v in sorted(m.accessibility[idx]):
            prefix = "" if idx is None else f"'{idx}',"
            world_parts.append(f"$accessible_world({prefix}{wname[u]},{wname[v]})")
    out.append(_statement(sname("worlds"), "interpretation-worlds", world_parts))

    def el(sort: str, e: str) -> str:
        return f"{promo[sort]}({elements[e]})"

    domain_parts = []
    for s in sorts:
        union = sorted(m.union_domain(s))
        domain_parts.append(f"! [X: {s}] : ? [D: {dtype[s]}] : X = {promo[s]}(D)")
        domain_parts.append(f"! [D: {dtype[s]}] : ( {' | '.join(f'D = {elements[e]}' for e in union)} )")
        for a, b in itertools.combinations(union, 2):
            domain_parts.append(f"{elements[a]} != {elements[b]}")
        domain_parts.append(
            f"! [D1: {dtype[s]},D2: {dtype[s]}] : ( {promo[s]}(D1) = {promo[s]}(D2) => D1 = D2 )"
        )
    out.append(_statement(sname("domains"), "interpretation-domain", domain_parts))

    def sort_args(symbol: str) -> tuple[list[str], str]:
        ty = tp.signature[symbol]
        if isinstance(ty, A.MappingType):
            return [unquote(t.name) for t in ty.args], unquote(ty.result.name)
        return [], unquote(ty.name)

    def fn_lines(f: str, table) -> list[str]:
        args, result = sort_args(f)
        lines = []
        for key in sorted(table):
            lhs = f if not key else f"{f}({','.join(el(s, e) for s, e in zip(args, key))})"
            lines.append(f"{lhs} = {el(result, table[key])}")
        return lines

    functions = sorted({f for (f, _) in m.functions if f in tp.signature})
    shared, per_world = [], []
    for f in functions:
        tables = [m.functions.get((f, w), {}) for w in m.worlds]
        (shared if all(t == tables[0] for t in tables) else per_world).append(f)
    if shared:
        lines = [ln for f in shared for ln in fn_lines(f, m.functions[(f, m.worlds[0])])]
        out.append(_statement(sname("mappings"), "interpretation-mapping", lines))

    predicates = sorted(s for s, t in tp.signature.items()
                        if not isinstance(t, A.TType)
                        and (t.result if isinstance(t, A.MappingType) else t) == A.BOOLEAN)
    blocks = []
    for w in m.worlds:
        parts = []
        for s in sorts:
            dom = m.domains.get((w, s), frozenset())
            if dom != m.union_domain(s):
                parts.append(f"! [D: {dtype[s]}] : ( {' | '.join(f'D = {elements[e]}' for e in sorted(dom))} )")
        for f in per_world:
            parts.extend(fn_lines(f, m.functions.get((f, w), {})))
        for p in predicates:
            args, _ = sort_args(p)
            ext = m.extension(p, w)
            for key in itertools.product(*(sorted(m.union_domain(s)) for s in args)):
                atom = p if not key else f"{p}({','.join(el(s, e) for s, e in zip(args, key))})"
                parts.append(atom if key in ext else f"~ {atom}")
        if parts:
            body = "\n      & ".join(parts)
            blocks.append(f"$in_world({wname[w]},\n      ( {body} ) )")
    if blocks:
        out.append(f"tff({sname('kripke')},interpretation,\n    ( " + "\n    & ".join(blocks) + " ) ).")
    return "\n\n".join(out) + "\n"


def _statement(name: str, role: str, parts: list[str]) -> str:
    if len(parts) == 1:
        return f"tff({name},{role},\n    {parts[0]} )."
    return f"tff({name},{role},\n    ( " + "\n    & ".join(f"( {x} )" for x in parts) + " ) )."
