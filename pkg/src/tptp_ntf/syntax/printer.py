"""Canonical TPTP rendering of the AST.

Output is deterministic and re-parses to an equal AST.  Binary connectives
are always parenthesized, short-form modalities print as ``{$box} @ (..)``.
"""
from __future__ import annotations

from . import ast as A


def print_type(ty: A.TptpType | A.RawFormula) -> str:
    if isinstance(ty, A.TType):
        return "$tType"
    if isinstance(ty, A.BaseType):
        return ty.name
    if isinstance(ty, A.RawFormula):
        return " ".join(ty.tokens)
    if len(ty.args) == 1:
        return f"{ty.args[0].name} > {ty.result.name}"
    return f"( {' * '.join(a.name for a in ty.args)} ) > {ty.result.name}"


def print_term(t: A.Term) -> str:
    if isinstance(t, A.Variable):
        return t.name
    if isinstance(t, A.DefinedConstant):
        return t.name
    if isinstance(t, A.IntegerLiteral):
        return t.text
    if t.args:
        return f"{t.symbol}({','.join(print_term(a) for a in t.args)})"
    return t.symbol


def print_connective(c: A.NCConnective) -> str:
    parts: list[str] = []
    if c.index is not None:
        parts.append(c.index)
    parts.extend(f"{k} := {print_param(v)}" for k, v in c.params)
    if parts:
        return f"{{{c.name}({','.join(parts)})}}"
    return f"{{{c.name}}}"


def print_param(v: A.ParamValue) -> str:
    if isinstance(v, A.ParamList):
        return f"[{','.join(print_param(i) for i in v.items)}]"
    if isinstance(v, (A.Variable, A.FunctionApp, A.DefinedConstant, A.IntegerLiteral)):
        return print_term(v)
    return print_formula(v)


def _var(v: A.TypedVariable) -> str:
    return v.name if v.type is None else f"{v.name}: {v.type.name}"


_BINARY_SYMBOL = {A.Implies: "=>", A.ReverseImplies: "<=", A.Iff: "<=>", A.Xor: "<~>"}


def print_formula(phi: A.Formula) -> str:
    if isinstance(phi, A.Atom):
        if phi.args:
            return f"{phi.predicate}({','.join(print_term(a) for a in phi.args)})"
        return phi.predicate
    if isinstance(phi, A.Equality):
        return f"{print_term(phi.left)} = {print_term(phi.right)}"
    if isinstance(phi, A.Inequality):
        return f"{print_term(phi.left)} != {print_term(phi.right)}"
    if isinstance(phi, A.TrueConst):
        return "$true"
    if isinstance(phi, A.FalseConst):
        return "$false"
    if isinstance(phi, A.Not):
        if isinstance(phi.body, (A.Equality, A.Inequality)):
            return f"~ ( {print_formula(phi.body)} )"
        return f"~ {_unit(phi.body)}"
    if isinstance(phi, A.And):
        return " & ".join(_unit(a) for a in phi.args)
    if isinstance(phi, A.Or):
        return " | ".join(_unit(a) for a in phi.args)
    if isinstance(phi, A.BINARY_NODES):
        return f"{_unit(phi.left)} {_BINARY_SYMBOL[type(phi)]} {_unit(phi.right)}"
    if isinstance(phi, (A.Forall, A.Exists)):
        q = "!" if isinstance(phi, A.Forall) else "?"
        return f"{q} [{','.join(_var(v) for v in phi.variables)}] : {_unit(phi.body)}"
    if isinstance(phi, A.NonClassicalApp):
        args = ", ".join(print_formula(a) for a in phi.args)
        return f"{print_connective(phi.connective)} @ ( {args} )"
    if isinstance(phi, A.InWorld):
        return f"$in_world({print_term(phi.world)}, {print_formula(phi.body)})"
    if isinstance(phi, A.RawFormula):
        return " ".join(phi.tokens)
    raise TypeError(f"not a formula: {phi!r}")


def _unit(phi: A.Formula) -> str:
    if isinstance(phi, (A.And, A.Or, *A.BINARY_NODES)):
        return f"( {print_formula(phi)} )"
    return print_formula(phi)


def print_spec_value(v: A.SpecList | A.Formula) -> str:
    if isinstance(v, A.SpecList):
        return f"[ {', '.join(print_spec_entry(e) for e in v.entries)} ]"
    return print_formula(v)


def print_spec_entry(e: A.SpecEntry) -> str:
    value = print_spec_value(e.value)
    if e.key is None:
        return value
    key = e.key if isinstance(e.key, str) else print_connective(e.key)
    return f"{key} == {value}"


def print_statement(body: A.Statement) -> str:
    if isinstance(body, A.TypeDeclaration):
        return f"{body.symbol}: {print_type(body.type)}"
    if isinstance(body, A.LogicSpecification):
        props = ",\n        ".join(print_spec_entry(e) for e in body.properties)
        return f"{body.logic} ==\n      [ {props} ]"
    return print_formula(body)


def print_general(g: A.GeneralTerm) -> str:
    if isinstance(g, A.GeneralWord):
        return g.text
    if isinstance(g, A.GeneralApp):
        return f"{g.functor}({','.join(print_general(a) for a in g.args)})"
    if isinstance(g, A.GeneralList):
        return f"[{','.join(print_general(a) for a in g.items)}]"
    return f"{print_general(g.left)}:{print_general(g.right)}"


def print_annotated(s: A.AnnotatedFormula) -> str:
    parts = [f"{s.language}({s.name},{s.role},\n    {print_statement(s.body)}"]
    if s.source is not None:
        parts.append(f",\n    {print_general(s.source)}")
        if s.useful_info is not None:
            parts.append(f",\n    {print_general(s.useful_info)}")
    parts.append(" ).")
    return "".join(parts)


def print_include(inc: A.Include) -> str:
    if inc.selection is None:
        return f"include('{inc.file}')."
    return f"include('{inc.file}',[{','.join(inc.selection)}])."


def print_problem(p: A.Problem) -> str:
    chunks = [print_include(i) for i in p.includes]
    chunks.extend(print_annotated(s) for s in p.statements)
    if not chunks:
        return ""
    return "\n\n".join(chunks) + "\n"
