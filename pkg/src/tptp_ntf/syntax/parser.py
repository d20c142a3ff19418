"""Recursive-descent parser for NX0 problems, derivations and interpretations."""
from __future__ import annotations

import os
from pathlib import Path
from typing import Sequence

from ..errors import ParseError, UnsupportedDialectError
from . import ast as A
from . import lexer as L

_BINARY = {"=>": A.Implies, "<=": A.ReverseImplies, "<=>": A.Iff, "<~>": A.Xor}
_UNSUPPORTED_CONNECTIVES = {
    "!>": "polymorphic quantifier '!>'",
    "?*": "choice/description binder '?*'",
    "@+": "choice binder '@+'",
    "@-": "description binder '@-'",
    "~|": "connective '~|'",
    "~&": "connective '~&'",
    "^": "lambda abstraction",
}
_UNSUPPORTED_DEFINED = {"$ite", "$let", "$ite_f", "$ite_t", "$let_tf", "$let_ff"}
_WORDS = (L.LOWER_WORD, L.KEYWORD, L.SINGLE_QUOTED)


class _Parser:
    def __init__(self, text: str, relaxed: bool = False):
        self.tokens = [t for t in L.tokenize(text) if t.kind != L.COMMENT]
        self.pos = 0
        self.relaxed = relaxed
        self.notes: list[str] = []

    # -- token helpers ---------------------------------------------------

    def peek(self, ahead: int = 0) -> L.Token | None:
        i = self.pos + ahead
        return self.tokens[i] if i < len(self.tokens) else None

    def at(self, lexeme: str, ahead: int = 0) -> bool:
        tok = self.peek(ahead)
        return tok is not None and tok.lexeme == lexeme and tok.kind in (L.PUNCTUATION, L.CONNECTIVE)

    def advance(self) -> L.Token:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input")
        self.pos += 1
        return tok

    def fail(self, message: str, expected: Sequence[str] = ()) -> ParseError:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else None
            line, col = (last.line, last.column) if last else (1, 1)
            return ParseError(f"{message}, found end of input", line, col, frozenset(expected))
        return ParseError(f"{message}, found {tok.lexeme!r}", tok.line, tok.column, frozenset(expected))

    def unsupported(self, what: str) -> UnsupportedDialectError:
        tok = self.peek()
        line, col = (tok.line, tok.column) if tok else (None, None)
        return UnsupportedDialectError(f"unsupported dialect: {what}", line, col)

    def expect(self, lexeme: str) -> L.Token:
        if not self.at(lexeme):
            raise self.fail("syntax error", [lexeme])
        return self.advance()

    def expect_kind(self, kinds: Sequence[str], what: str) -> L.Token:
        tok = self.peek()
        if tok is None or tok.kind not in kinds:
            raise self.fail(f"expected {what}", [what])
        return self.advance()

    # -- file level ------------------------------------------------------

    def parse_problem(self) -> A.Problem:
        includes: list[A.Include] = []
        statements: list[A.AnnotatedFormula] = []
        while self.peek() is not None:
            tok = self.peek()
            if tok.kind == L.KEYWORD and tok.lexeme == "include":
                includes.append(self.parse_include())
            elif tok.kind == L.KEYWORD:
                statements.append(self.parse_annotated())
            else:
                raise self.fail("expected annotated formula or include", ["tff", "thf", "include"])
        warnings = (*self.notes, *_problem_warnings(statements))
        return A.Problem(tuple(includes), tuple(statements), warnings)

    def parse_include(self) -> A.Include:
        self.advance()
        self.expect("(")
        name = self.expect_kind((L.SINGLE_QUOTED,), "quoted file name").lexeme
        selection = None
        if self.at(","):
            self.advance()
            self.expect("[")
            names: list[str] = []
            while not self.at("]"):
                names.append(self.parse_name())
                if not self.at("]"):
                    self.expect(",")
            self.expect("]")
            selection = tuple(names)
        self.expect(")")
        self.expect(".")
        return A.Include(name[1:-1], selection)

    def parse_name(self) -> str:
        return self.expect_kind((*_WORDS, L.INTEGER), "formula name").lexeme

    def parse_annotated(self) -> A.AnnotatedFormula:
        lang_tok = self.advance()
        language = lang_tok.lexeme
        if language not in ("tff", "thf") and not self.relaxed:
            raise UnsupportedDialectError(
                f"unsupported dialect: language {language!r}", lang_tok.line, lang_tok.column)
        if language == "thf" and not self.relaxed:
            raise UnsupportedDialectError(
                "unsupported dialect: thf (NHF/THF bodies are outside NX0)",
                lang_tok.line, lang_tok.column)
        self.expect("(")
        name = self.parse_name()
        self.expect(",")
        role = self.parse_role()
        self.expect(",")
        body = self.parse_body(role)
        source = info = None
        if self.at(","):
            self.advance()
            source = self.parse_general_term()
            if self.at(","):
                self.advance()
                info = self.parse_general_term()
                if not isinstance(info, A.GeneralList):
                    raise self.fail("useful_info must be a list")
        self.expect(")")
        self.expect(".")
        return A.AnnotatedFormula(language, name, role, body, source, info, line=lang_tok.line)

    def parse_role(self) -> A.Role:
        tok = self.expect_kind((L.LOWER_WORD,), "role")
        base, sub = tok.lexeme, None
        if self.at("-"):
            self.advance()
            sub = self.expect_kind((L.LOWER_WORD,), "subrole").lexeme
        try:
            return A.Role(base, sub)
        except ValueError as exc:
            raise ParseError(str(exc), tok.line, tok.column) from None

    def parse_body(self, role: A.Role) -> A.Statement:
        start = self.pos
        try:
            if role.base == "type":
                return self.parse_type_declaration()
            if role.base == "logic":
                return self.parse_logic_specification()
            return self.parse_formula()
        except ParseError:
            if not self.relaxed:
                raise
            self.pos = start
            if role.base == "type":
                return self.parse_raw_type_declaration()
            return A.RawFormula(self.capture_raw())

    def capture_raw(self) -> tuple[str, ...]:
        depth = 0
        out: list[str] = []
        while True:
            tok = self.peek()
            if tok is None:
                raise self.fail("unbalanced formula")
            if depth == 0 and tok.lexeme in (",", ")") and tok.kind == L.PUNCTUATION:
                break
            if tok.kind == L.PUNCTUATION and tok.lexeme in "([{":
                depth += 1
            elif tok.kind == L.PUNCTUATION and tok.lexeme in ")]}":
                depth -= 1
            out.append(tok.lexeme)
            self.advance()
        if not out:
            raise self.fail("empty formula")
        return tuple(out)

    # -- type declarations -----------------------------------------------

    def parse_type_declaration(self) -> A.TypeDeclaration:
        if self.at("("):
            self.advance()
            decl = self.parse_type_declaration()
            self.expect(")")
            return decl
        symbol = self.expect_kind((*_WORDS, L.DEFINED_WORD, L.SYSTEM_WORD), "symbol").lexeme
        self.expect(":")
        tok = self.peek()
        if tok is not None and tok.kind == L.DEFINED_WORD and tok.lexeme == "$tType":
            self.advance()
            return A.TypeDeclaration(symbol, A.TType())
        return A.TypeDeclaration(symbol, self.parse_type())

    def parse_raw_type_declaration(self) -> A.TypeDeclaration:
        symbol = self.expect_kind((*_WORDS, L.DEFINED_WORD, L.SYSTEM_WORD), "symbol").lexeme
        self.expect(":")
        return A.TypeDeclaration(symbol, A.RawFormula(self.capture_raw()))

    def parse_type(self) -> A.BaseType | A.MappingType:
        if self.at("("):
            self.advance()
            args = [self.parse_atomic_type()]
            while self.at("*"):
                self.advance()
                args.append(self.parse_atomic_type())
            self.expect(")")
            if not self.at(">"):
                if len(args) == 1:
                    return args[0]
                raise self.fail("product type without result", [">"])
        else:
            args = [self.parse_atomic_type()]
            if not self.at(">"):
                if self.at("*"):
                    raise self.fail("argument product types must be parenthesized")
                return args[0]
        self.expect(">")
        result = self.parse_atomic_type()
        if self.at(">"):
            raise self.unsupported("curried (higher-order) type")
        return A.MappingType(tuple(args), result)

    def parse_atomic_type(self) -> A.BaseType:
        if self.at("("):
            raise self.unsupported("higher-order argument type")
        tok = self.expect_kind((*_WORDS, L.DEFINED_WORD), "type")
        if tok.kind == L.DEFINED_WORD and tok.lexeme not in A.DEFINED_TYPES | {"$rat", "$real"}:
            raise ParseError(f"unknown defined type {tok.lexeme}", tok.line, tok.column)
        return A.BaseType(tok.lexeme)

    # -- logic specifications --------------------------------------------

    def parse_logic_specification(self) -> A.LogicSpecification:
        name = self.expect_kind((L.DEFINED_WORD, L.SYSTEM_WORD), "logic name").lexeme
        self.expect("==")
        value = self.parse_spec_value()
        if not isinstance(value, A.SpecList):
            raise self.fail("logic properties must be a [] list")
        return A.LogicSpecification(name, value.entries)

    def parse_spec_value(self) -> A.SpecList | A.Formula:
        if self.at("["):
            self.advance()
            entries: list[A.SpecEntry] = []
            while not self.at("]"):
                entries.append(self.parse_spec_entry())
                if not self.at("]"):
                    self.expect(",")
            self.expect("]")
            return A.SpecList(tuple(entries))
        return self.parse_formula()

    def parse_spec_entry(self) -> A.SpecEntry:
        tok = self.peek()
        if tok is not None and tok.kind in (L.DEFINED_WORD, L.SYSTEM_WORD) and self.at("==", 1):
            self.advance()
            self.advance()
            return A.SpecEntry(tok.lexeme, self.parse_spec_value())
        if self.at("{"):
            saved = self.pos
            conn = self.parse_connective()
            if self.at("=="):
                self.advance()
                return A.SpecEntry(conn, self.parse_spec_value())
            self.pos = saved
        return A.SpecEntry(None, self.parse_spec_value())

    # -- formulae --------------------------------------------------------

    def parse_formula(self) -> A.Formula:
        left = self.parse_unit()
        tok = self.peek()
        if tok is None or tok.kind != L.CONNECTIVE:
            return left
        op = tok.lexeme
        if op in ("&", "|"):
            args = [left]
            while self.at(op):
                self.advance()
                args.append(self.parse_unit())
            nxt = self.peek()
            if nxt is not None and nxt.kind == L.CONNECTIVE and (nxt.lexeme in _BINARY or nxt.lexeme in "&|"):
                raise self.fail("mixed binary connectives need parentheses")
            return A.And(tuple(args)) if op == "&" else A.Or(tuple(args))
        if op in _BINARY:
            self.advance()
            right = self.parse_unit()
            nxt = self.peek()
            if nxt is not None and nxt.kind == L.CONNECTIVE and (nxt.lexeme in _BINARY or nxt.lexeme in "&|"):
                raise self.fail("non-associative connective needs parentheses")
            return _BINARY[op](left, right)
        if op in _UNSUPPORTED_CONNECTIVES:
            raise self.unsupported(_UNSUPPORTED_CONNECTIVES[op])
        return left

    def parse_unit(self) -> A.Formula:
        tok = self.peek()
        if tok is None:
            raise self.fail("expected formula")
        lex = tok.lexeme
        if tok.kind == L.CONNECTIVE:
            if lex == "~":
                self.advance()
                return A.Not(self.parse_unit())
            if lex in ("!", "?"):
                return self.parse_quantified()
            if lex in ("[.]", "<.>"):
                self.advance()
                name = "$box" if lex == "[.]" else "$dia"
                return A.NonClassicalApp(A.NCConnective(name), (self.parse_unit(),))
            if lex in _UNSUPPORTED_CONNECTIVES:
                raise self.unsupported(_UNSUPPORTED_CONNECTIVES[lex])
            raise self.fail("expected formula")
        if tok.kind == L.PUNCTUATION:
            if lex == "(":
                self.advance()
                phi = self.parse_formula()
                self.expect(")")
                return phi
            if lex == "{":
                return self.parse_nc_app()
            if lex == "[":
                raise self.unsupported("tuple formula")
            raise self.fail("expected formula")
        if tok.kind == L.DEFINED_WORD:
            if lex == "$true" and not self.at("=", 1) and not self.at("!=", 1):
                self.advance()
                return A.TrueConst()
            if lex == "$false" and not self.at("=", 1) and not self.at("!=", 1):
                self.advance()
                return A.FalseConst()
            if lex in _UNSUPPORTED_DEFINED:
                raise self.unsupported(f"{lex} expression")
            if lex == "$in_world":
                return self.parse_in_world()
        return self.parse_atomic()

    def parse_quantified(self) -> A.Formula:
        quant = self.advance().lexeme
        self.expect("[")
        variables = [self.parse_typed_variable()]
        while self.at(","):
            self.advance()
            variables.append(self.parse_typed_variable())
        self.expect("]")
        if self.at(":"):
            self.advance()
        elif self.at("("):
            tok = self.peek()
            self.notes.append(f"missing ':' after quantifier prefix at {tok.line}:{tok.column}")
        else:
            raise self.fail("syntax error", [":"])
        body = self.parse_unit()
        cls = A.Forall if quant == "!" else A.Exists
        return cls(tuple(variables), body)

    def parse_typed_variable(self) -> A.TypedVariable:
        name = self.expect_kind((L.UPPER_WORD,), "variable").lexeme
        if self.at(":"):
            self.advance()
            if self.peek() is not None and self.peek().lexeme == "$tType":
                raise self.unsupported("type variable (polymorphism)")
            ty = self.parse_type()
            if isinstance(ty, A.MappingType):
                raise self.unsupported("higher-order variable")
            if ty.name == "$o":
                raise self.unsupported("Boolean variable")
            return A.TypedVariable(name, ty)
        return A.TypedVariable(name)

    def parse_connective(self) -> A.NCConnective:
        self.expect("{")
        name = self.expect_kind((L.DEFINED_WORD, L.SYSTEM_WORD), "connective name").lexeme
        index = None
        params: list[tuple[str, A.ParamValue]] = []
        if self.at("("):
            self.advance()
            tok = self.peek()
            if tok is not None and tok.kind == L.HASH_WORD:
                index = self.advance().lexeme
                if self.at(","):
                    self.advance()
                else:
                    self.expect(")")
                    self.expect("}")
                    return A.NCConnective(name, index, ())
            while True:
                key = self.expect_kind((*_WORDS, L.DEFINED_WORD, L.SYSTEM_WORD), "parameter name")
                self.expect(":=")
                params.append((key.lexeme, self.parse_param_value()))
                if self.at(","):
                    self.advance()
                    continue
                break
            self.expect(")")
        self.expect("}")
        keys = [k for k, _ in params]
        if len(keys) != len(set(keys)):
            raise self.fail("duplicate connective parameter key")
        return A.NCConnective(name, index, tuple(params))

    def parse_param_value(self) -> A.ParamValue:
        if self.at("["):
            self.advance()
            items: list[A.ParamValue] = []
            while not self.at("]"):
                items.append(self.parse_param_value())
                if not self.at("]"):
                    self.expect(",")
            self.expect("]")
            return A.ParamList(tuple(items))
        tok = self.peek()
        nxt = self.peek(1)
        ends = nxt is None or (nxt.kind == L.PUNCTUATION and nxt.lexeme in ",)]")
        if tok is not None and tok.kind == L.UPPER_WORD and ends:
            self.advance()
            return A.Variable(tok.lexeme)
        if tok is not None and tok.kind == L.INTEGER and ends:
            self.advance()
            return A.IntegerLiteral(tok.lexeme)
        return self.parse_formula()

    def parse_nc_app(self) -> A.Formula:
        conn = self.parse_connective()
        self.expect("@")
        if self.at("("):
            self.advance()
            args = [self.parse_formula()]
            while self.at(","):
                self.advance()
                args.append(self.parse_formula())
            self.expect(")")
        else:
            args = [self.parse_unit()]
        if self.at("@"):
            raise self.unsupported("curried (NHF) application of a non-classical connective")
        return A.NonClassicalApp(conn, tuple(args))

    def parse_in_world(self) -> A.Formula:
        self.advance()
        self.expect("(")
        world = self.parse_term()
        self.expect(",")
        body = self.parse_formula()
        self.expect(")")
        return A.InWorld(world, body)

    def parse_atomic(self) -> A.Formula:
        tok = self.peek()
        term = self.parse_term()
        if self.at("="):
            self.advance()
            return A.Equality(term, self.parse_term())
        if self.at("!="):
            self.advance()
            return A.Inequality(term, self.parse_term())
        if self.at("@"):
            raise self.unsupported("higher-order application")
        if isinstance(term, A.FunctionApp):
            return A.Atom(term.symbol, term.args)
        if isinstance(term, A.DefinedConstant):
            return A.Atom(term.name)
        if isinstance(term, A.Variable):
            raise UnsupportedDialectError(
                "unsupported dialect: Boolean variable used as formula", tok.line, tok.column)
        raise ParseError("number used as formula", tok.line, tok.column)

    def parse_term(self) -> A.Term:
        tok = self.peek()
        if tok is None:
            raise self.fail("expected term")
        if tok.kind == L.UPPER_WORD:
            self.advance()
            return A.Variable(tok.lexeme)
        if tok.kind == L.INTEGER:
            self.advance()
            return A.IntegerLiteral(tok.lexeme)
        if tok.kind in (*_WORDS, L.DEFINED_WORD, L.SYSTEM_WORD):
            self.advance()
            if self.at("("):
                self.advance()
                args = [self.parse_term_or_formula()]
                while self.at(","):
                    self.advance()
                    args.append(self.parse_term_or_formula())
                self.expect(")")
                return A.FunctionApp(tok.lexeme, tuple(args))
            if tok.kind == L.DEFINED_WORD:
                return A.DefinedConstant(tok.lexeme)
            return A.FunctionApp(tok.lexeme)
        if tok.kind == L.PUNCTUATION and tok.lexeme == "[":
            raise self.unsupported("tuple term")
        raise self.fail("expected term", ["variable", "constant", "function term"])

    def parse_term_or_formula(self) -> A.Term:
        start = self.pos
        term = self.parse_term()
        nxt = self.peek()
        if nxt is not None and nxt.kind in (L.PUNCTUATION,) and nxt.lexeme in ",)":
            return term
        self.pos = start
        raise self.unsupported("formula used as term argument")

    # -- general terms ---------------------------------------------------

    def parse_general_term(self) -> A.GeneralTerm:
        if self.at("["):
            self.advance()
            items: list[A.GeneralTerm] = []
            while not self.at("]"):
                items.append(self.parse_general_term())
                if not self.at("]"):
                    self.expect(",")
            self.expect("]")
            left: A.GeneralTerm = A.GeneralList(tuple(items))
        else:
            tok = self.expect_kind(
                (*_WORDS, L.UPPER_WORD, L.DEFINED_WORD, L.SYSTEM_WORD, L.INTEGER, L.HASH_WORD),
                "general term")
            if self.at("(") and tok.kind not in (L.UPPER_WORD, L.INTEGER):
                self.advance()
                args = [self.parse_general_term()]
                while self.at(","):
                    self.advance()
                    args.append(self.parse_general_term())
                self.expect(")")
                left = A.GeneralApp(tok.lexeme, tuple(args))
            else:
                left = A.GeneralWord(tok.lexeme)
        if self.at(":"):
            self.advance()
            return A.GeneralColon(left, self.parse_general_term())
        return left


def _uses_nonclassical(stmt: A.AnnotatedFormula) -> bool:
    body = stmt.body
    if isinstance(body, (A.TypeDeclaration, A.LogicSpecification, A.RawFormula)):
        return False
    return any(isinstance(n, A.NonClassicalApp) for n in A.subformulas(body))


def _problem_warnings(statements: list[A.AnnotatedFormula]) -> tuple[str, ...]:
    warnings: list[str] = []
    seen: set[tuple[str, str]] = set()
    logic = [s for s in statements if s.role.base == "logic"]
    if len(logic) > 1:
        raise ParseError(
            f"more than one logic specification ({', '.join(s.name for s in logic)})",
            logic[1].line, 1)
    for stmt in statements:
        key = (stmt.name, str(stmt.role))
        if key in seen:
            warnings.append(f"duplicate statement {stmt.name!r} with role {stmt.role}")
        seen.add(key)
    if logic:
        spec = logic[0]
        for stmt in statements:
            if stmt is spec:
                break
            if _uses_nonclassical(stmt):
                warnings.append(
                    f"logic specification {spec.name!r} appears after non-classical "
                    f"connective use in {stmt.name!r}")
                break
    return tuple(warnings)


def parse_problem(text: str, relaxed: bool = False) -> A.Problem:
    """Parse TPTP text into a :class:`Problem`.

    With ``relaxed=True`` statements in other dialects (THF derivations, for
    instance) are accepted and bodies outside NX0 are kept as
    :class:`RawFormula` token captures.
    """
    return _Parser(text, relaxed).parse_problem()


def parse_formula(text: str) -> A.Formula:
    parser = _Parser(text)
    phi = parser.parse_formula()
    if parser.peek() is not None:
        raise parser.fail("trailing input after formula")
    return phi


def parse_term(text: str) -> A.Term:
    parser = _Parser(text)
    t = parser.parse_term()
    if parser.peek() is not None:
        raise parser.fail("trailing input after term")
    return t


def default_include_dirs() -> list[Path]:
    env = os.environ.get("TPTP")
    return [Path(env)] if env else []


def load_problem(
    path: str | os.PathLike[str],
    include_dirs: Sequence[str | os.PathLike[str]] = (),
    relaxed: bool = False,
) -> A.Problem:
    """Read a file and splice in the statements of its ``include`` directives."""
    path = Path(path)
    dirs = [path.parent, *map(Path, include_dirs), *default_include_dirs()]
    return _load(path, dirs, relaxed, frozenset())


def _load(path: Path, dirs: list[Path], relaxed: bool, active: frozenset[Path]) -> A.Problem:
    resolved = path.resolve()
    if resolved in active:
        raise ParseError(f"cyclic include of {path}")
    problem = parse_problem(path.read_text(encoding="utf-8"), relaxed)
    if not problem.includes:
        return problem
    included: list[A.AnnotatedFormula] = []
    warnings = list(problem.warnings)
    for inc in problem.includes:
        target = _find_include(inc.file, dirs)
        sub = _load(target, dirs, relaxed, active | {resolved})
        stmts = sub.statements
        if inc.selection is not None:
            wanted = set(inc.selection)
            stmts = tuple(s for s in stmts if s.name in wanted)
        included.extend(stmts)
        warnings.extend(sub.warnings)
    statements = included + list(problem.statements)
    warnings.extend(_problem_warnings(statements))
    return A.Problem((), tuple(statements), tuple(dict.fromkeys(warnings)))


def _find_include(name: str, dirs: list[Path]) -> Path:
    for d in dirs:
        candidate = d / name
        if candidate.is_file():
            return candidate
    raise ParseError(f"cannot find included file {name!r} (searched {', '.join(map(str, dirs))})")
