"""Parallel hyperedge replacement grammars: hypergraphs, tables, decisions, transforms."""

from .automata import DFA, NFA
from .decide import emptiness, intersect_regular, is_empty, is_member, membership
from .errors import (
    BadTrace,
    ParseError,
    PhrgError,
    TypingError,
    UnknownLabel,
    UnsupportedShape,
    ValidationError,
)
from .grammar import PHRGrammar, Rule, derive, enumerate_language, validate
from .hypergraph import Hypergraph, Signature, handle, is_isomorphic, str_of, string_graph
from .strings import ET0LGrammar, et0l_interpret, export_et0l, import_et0l
from .transform import HRGrammar

__all__ = [
    "BadTrace", "DFA", "ET0LGrammar", "HRGrammar", "Hypergraph", "NFA", "PHRGrammar",
    "ParseError", "PhrgError", "Rule", "Signature", "TypingError", "UnknownLabel",
    "UnsupportedShape", "ValidationError", "derive", "emptiness", "enumerate_language",
    "et0l_interpret", "export_et0l", "handle", "import_et0l", "intersect_regular",
    "is_empty", "is_isomorphic", "is_member", "membership", "str_of", "string_graph",
    "validate",
]
