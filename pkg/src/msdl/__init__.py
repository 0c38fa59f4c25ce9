"""Bottom-up Datalog materialisation with pluggable storage schemes."""
from .engine import OracleOverflowError, Reasoner, materialise, naive_materialise
from .intervals import IntervalSet
from .registry import SchemeConfig, SchemeRegistry, assign_schemes
from .schemes import Domain
from .syntax import (
    DatalogError, DatalogSyntaxError, Program, SymbolTable, parse_atoms, parse_facts, parse_program,
)

__version__ = "0.1.0"

__all__ = [
    "OracleOverflowError", "Reasoner", "materialise", "naive_materialise", "IntervalSet",
    "SchemeConfig", "SchemeRegistry", "assign_schemes", "Domain", "DatalogError",
    "DatalogSyntaxError", "Program", "SymbolTable", "parse_atoms", "parse_facts", "parse_program",
]
