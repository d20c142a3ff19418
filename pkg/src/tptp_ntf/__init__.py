"""Parsing, embedding and model finding for TPTP non-classical logic problems."""

__version__ = "0.1.0"
