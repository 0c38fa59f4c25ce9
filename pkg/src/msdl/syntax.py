"""Datalog terms, atoms, rules and the text grammar.

Symbols are interned to dense integer ids when parsed; everything downstream
(schemes, joins, queries) works on ids only. A ground fact is a flat tuple
``(pred_id, arg_id, ...)``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

Fact = tuple  # (pred_id, c1, ..., ck)


class DatalogError(Exception):
    """Base class for user-facing input errors."""


class DatalogSyntaxError(DatalogError):
    def __init__(self, msg: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {msg}")
        self.line = line
        self.column = column


class SafetyError(DatalogError):
    def __init__(self, rule_text: str, variable: str):
        super().__init__(f"unsafe rule {rule_text!r}: head variable {variable} does not occur in the body")
        self.variable = variable


class ArityError(DatalogError):
    def __init__(self, predicate: str, expected: int, got: int):
        super().__init__(f"predicate {predicate} used with arity {got}, previously {expected}")
        self.predicate = predicate


class SymbolTable:
    """Injective interning of constants, predicates and variables."""

    def __init__(self):
        self.constants: list[str] = []
        self._const_ids: dict[str, int] = {}
        self.predicates: list[str] = []
        self._pred_ids: dict[str, int] = {}
        self.arities: dict[int, int] = {}
        self.variables: list[str] = []
        self._var_ids: dict[str, int] = {}

    def constant(self, name: str) -> int:
        cid = self._const_ids.get(name)
        if cid is None:
            cid = self._const_ids[name] = len(self.constants)
            self.constants.append(name)
        return cid

    def variable(self, name: str) -> int:
        vid = self._var_ids.get(name)
        if vid is None:
            vid = self._var_ids[name] = len(self.variables)
            self.variables.append(name)
        return vid

    def predicate(self, name: str, arity: int) -> int:
        pid = self._pred_ids.get(name)
        if pid is None:
            if arity < 1:
                raise ArityError(name, 1, arity)
            pid = self._pred_ids[name] = len(self.predicates)
            self.predicates.append(name)
            self.arities[pid] = arity
        elif self.arities[pid] != arity:
            raise ArityError(name, self.arities[pid], arity)
        return pid

    def lookup_constant(self, name: str) -> int | None:
        return self._const_ids.get(name)

    def lookup_predicate(self, name: str) -> int | None:
        return self._pred_ids.get(name)

    def fact(self, pred: str, args: Iterable[str]) -> Fact:
        args = tuple(args)
        pid = self.predicate(pred, len(args))
        return (pid, *(self.constant(a) for a in args))

    def format_constant(self, cid: int) -> str:
        return _quote(self.constants[cid])

    def format_fact(self, fact: Fact) -> str:
        args = ",".join(self.format_constant(c) for c in fact[1:])
        return f"{self.predicates[fact[0]]}({args})"


@dataclass(frozen=True, slots=True)
class Term:
    var: bool
    sym: int

    @classmethod
    def variable(cls, vid: int) -> "Term":
        return cls(True, vid)

    @classmethod
    def constant(cls, cid: int) -> "Term":
        return cls(False, cid)


@dataclass(frozen=True, slots=True)
class Atom:
    pred: int
    args: tuple[Term, ...]

    @property
    def arity(self) -> int:
        return len(self.args)

    def variables(self) -> list[int]:
        seen: list[int] = []
        for t in self.args:
            if t.var and t.sym not in seen:
                seen.append(t.sym)
        return seen

    def is_ground(self) -> bool:
        return not any(t.var for t in self.args)

    def to_fact(self) -> Fact:
        if not self.is_ground():
            raise ValueError("atom has variables")
        return (self.pred, *(t.sym for t in self.args))


@dataclass(frozen=True, slots=True)
class Rule:
    head: Atom
    body: tuple[Atom, ...]

    def __post_init__(self):
        if not self.body:
            raise ValueError("rule body must be non-empty")

    def variables(self) -> list[int]:
        out: list[int] = []
        for a in (self.head, *self.body):
            for v in a.variables():
                if v not in out:
                    out.append(v)
        return out


@dataclass
class Program:
    rules: list[Rule]
    symbols: SymbolTable = field(default_factory=SymbolTable)

    @property
    def arities(self) -> Mapping[int, int]:
        return self.symbols.arities

    def format(self) -> str:
        return "".join(format_rule(r, self.symbols) + "\n" for r in self.rules)


def check_safety(rule: Rule) -> int | None:
    """Return the first head variable missing from the body, or None if safe."""
    body_vars = {t.sym for a in rule.body for t in a.args if t.var}
    for t in rule.head.args:
        if t.var and t.sym not in body_vars:
            return t.sym
    return None


def apply_substitution(atom: Atom, subst: Mapping[int, int]) -> Atom:
    args = tuple(
        Term(False, subst[t.sym]) if t.var and t.sym in subst else t for t in atom.args
    )
    return Atom(atom.pred, args)


def match_atom(atom: Atom, fact: Fact, subst: Mapping[int, int]) -> dict[int, int] | None:
    """Extend ``subst`` so that the atom equals ``fact``; None if impossible.

    ``subst`` itself is never modified.
    """
    if fact[0] != atom.pred or len(fact) != len(atom.args) + 1:
        return None
    out = None
    for t, c in zip(atom.args, fact[1:]):
        if not t.var:
            if t.sym != c:
                return None
            continue
        bound = (out if out is not None else subst).get(t.sym)
        if bound is None:
            if out is None:
                out = dict(subst)
            out[t.sym] = c
        elif bound != c:
            return None
    return dict(subst) if out is None else out


# --- text grammar -----------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>%[^\n]*)
  | (?P<nl>\n)
  | (?P<implies>:-)
  | (?P<var>\?[A-Za-z0-9_]+)
  | (?P<quoted>'(?:[^'\\\n]|\\.)*')
  | (?P<name>[A-Za-z0-9_][A-Za-z0-9_:\-]*)
  | (?P<punct>[(),.])
    """,
    re.VERBOSE,
)
_BARE = re.compile(r"[A-Za-z0-9_][A-Za-z0-9_:\-]*\Z")


def _quote(name: str) -> str:
    if _BARE.match(name):
        return name
    return "'" + name.replace("\\", "\\\\").replace("'", "\\'") + "'"


def _unquote(tok: str) -> str:
    return re.sub(r"\\(.)", r"\1", tok[1:-1])


def _tokenize(text: str) -> Iterator[tuple[str, str, int, int]]:
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise DatalogSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line, line_start = line + 1, m.end()
        elif kind not in ("ws", "comment"):
            yield kind, m.group(), line, pos - line_start + 1
        pos = m.end()
    yield "eof", "", line, pos - line_start + 1


class _Parser:
    def __init__(self, text: str, symbols: SymbolTable):
        self.tokens = list(_tokenize(text))
        self.i = 0
        self.symbols = symbols

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind: str, value: str | None = None):
        tok = self.tokens[self.i]
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = value or kind
            got = tok[1] or "end of input"
            raise DatalogSyntaxError(f"expected {want!r}, got {got!r}", tok[2], tok[3])
        self.i += 1
        return tok

    def at_punct(self, value: str) -> bool:
        tok = self.peek()
        return tok[0] == "punct" and tok[1] == value

    def atom(self) -> Atom:
        kind, name, line, col = self.peek()
        if kind != "name":
            raise DatalogSyntaxError(f"expected predicate name, got {name or 'end of input'!r}", line, col)
        self.i += 1
        self.take("punct", "(")
        raw: list[tuple[str, str]] = []
        while True:
            k, v, ln, cl = self.peek()
            if k == "var":
                raw.append(("var", v))
            elif k == "name":
                raw.append(("const", v))
            elif k == "quoted":
                raw.append(("const", _unquote(v)))
            else:
                raise DatalogSyntaxError(f"expected term, got {v or 'end of input'!r}", ln, cl)
            self.i += 1
            if self.at_punct(","):
                self.i += 1
                continue
            self.take("punct", ")")
            break
        try:
            pid = self.symbols.predicate(name, len(raw))
        except ArityError as exc:
            raise DatalogSyntaxError(str(exc), line, col) from exc
        args = tuple(
            Term(True, self.symbols.variable(v[1:])) if k == "var" else Term(False, self.symbols.constant(v))
            for k, v in raw
        )
        return Atom(pid, args)

    def atoms(self) -> list[Atom]:
        out = [self.atom()]
        while self.at_punct(","):
            self.i += 1
            out.append(self.atom())
        return out


def parse_program(text: str, symbols: SymbolTable | None = None) -> Program:
    """Parse ``Head :- B1, ..., Bn .`` rules, one per statement, ``%`` comments."""
    symbols = symbols if symbols is not None else SymbolTable()
    p = _Parser(text, symbols)
    rules: list[Rule] = []
    while p.peek()[0] != "eof":
        head = p.atom()
        p.take("implies")
        body = p.atoms()
        p.take("punct", ".")
        rule = Rule(head, tuple(body))
        bad = check_safety(rule)
        if bad is not None:
            raise SafetyError(format_rule(rule, symbols), "?" + symbols.variables[bad])
        rules.append(rule)
    return Program(rules, symbols)


def parse_atoms(text: str, symbols: SymbolTable) -> list[Atom]:
    """Parse a conjunction ``A1, ..., An .`` (trailing dot optional)."""
    p = _Parser(text, symbols)
    out = p.atoms()
    if p.at_punct("."):
        p.i += 1
    p.take("eof")
    return out


def parse_facts(text: str, symbols: SymbolTable, tsv: bool = False) -> list[Fact]:
    """Parse a fact file: ``P(c1,c2).`` statements, or ``P<TAB>c1<TAB>c2`` rows."""
    if tsv:
        out = []
        for n, line in enumerate(text.splitlines(), 1):
            line = line.rstrip("\r")
            if not line or line.startswith("%"):
                continue
            cols = line.split("\t")
            if len(cols) < 2:
                raise DatalogSyntaxError("expected predicate and at least one argument", n, 1)
            try:
                out.append(symbols.fact(cols[0], cols[1:]))
            except ArityError as exc:
                raise DatalogSyntaxError(str(exc), n, 1) from exc
        return out
    p = _Parser(text, symbols)
    out = []
    while p.peek()[0] != "eof":
        _, _, line, col = p.peek()
        a = p.atom()
        p.take("punct", ".")
        if not a.is_ground():
            raise DatalogSyntaxError("facts may not contain variables", line, col)
        out.append(a.to_fact())
    return out


def format_atom(atom: Atom, symbols: SymbolTable) -> str:
    parts = [
        "?" + symbols.variables[t.sym] if t.var else symbols.format_constant(t.sym) for t in atom.args
    ]
    return f"{symbols.predicates[atom.pred]}({','.join(parts)})"


def format_rule(rule: Rule, symbols: SymbolTable) -> str:
    body = ", ".join(format_atom(a, symbols) for a in rule.body)
    return f"{format_atom(rule.head, symbols)} :- {body}."
