from .base import Domain, InvariantError, Label, Scheme
from .plain import LabelledFactStore, PlainTable
from .tc import SccNode, TcScheme, is_transitive_rule
from .union import UnionTable, is_copy_rule

__all__ = [
    "Domain", "InvariantError", "Label", "Scheme", "LabelledFactStore", "PlainTable",
    "SccNode", "TcScheme", "is_transitive_rule", "UnionTable", "is_copy_rule",
]
