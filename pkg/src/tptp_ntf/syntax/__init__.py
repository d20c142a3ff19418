from .ast import *  # noqa: F401,F403
from .census import SyntaxStatistics, census
from .lexer import Token, tokenize
from .parser import load_problem, parse_formula, parse_problem, parse_term
from .printer import print_formula, print_problem, print_term
from .typecheck import TypedProblem, TypeIssue, check_types, resolve_defaults

__all__ = [
    "SyntaxStatistics", "Token", "TypeIssue", "TypedProblem", "census", "check_types",
    "load_problem", "parse_formula", "parse_problem", "parse_term", "print_formula",
    "print_problem", "print_term", "resolve_defaults", "tokenize",
]
