"""Finite Kripke models: evaluation, checking, interpretation files and search."""
from .check import Verdict, check_model
from .evaluate import eval_term, evaluate
from .interpretation import parse_interpretation, write_interpretation
from .model import FiniteKripkeModel
from .search import SearchResult, search_countermodel

eval = evaluate  # noqa: A001

__all__ = [
    "FiniteKripkeModel", "SearchResult", "Verdict", "check_model", "eval", "eval_term",
    "evaluate", "parse_interpretation", "search_countermodel", "write_interpretation",
]
