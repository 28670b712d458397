"""Context-free grammars over function tags.

File format, one rule set per line::

    # comment
    Sentence -> I-sent | I-sent 'CCS' I-sent
    Subj -> 'PSubj' 'SubjP' | 'Subj'

Quoted symbols are terminals and must be function tags; bare symbols are
nonterminals and must be defined somewhere in the file. A nonterminal may
share its name with a terminal (``Subj -> 'Subj'``).
"""

from __future__ import annotations

import enum
import logging
import re
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Optional

from .corpus import FunctionTag

logger = logging.getLogger(__name__)

START = "Sentence"
DEFAULT_GRAMMAR_FILE = "myanmar.cfg"


class Kind(str, enum.Enum):
    TERMINAL = "terminal"
    NONTERMINAL = "nonterminal"


@dataclass(frozen=True)
class Symbol:
    name: str
    kind: Kind

    @property
    def is_terminal(self) -> bool:
        return self.kind is Kind.TERMINAL

    def __str__(self) -> str:
        return f"'{self.name}'" if self.is_terminal else self.name


def T(name: str) -> Symbol:
    return Symbol(name, Kind.TERMINAL)


def N(name: str) -> Symbol:
    return Symbol(name, Kind.NONTERMINAL)


@dataclass(frozen=True)
class Production:
    lhs: Symbol
    rhs: tuple[Symbol, ...]

    def __post_init__(self):
        object.__setattr__(self, "rhs", tuple(self.rhs))
        if self.lhs.is_terminal:
            raise ValueError(f"terminal {self.lhs} on the left of a production")
        if not self.rhs:
            raise ValueError(f"empty right-hand side for {self.lhs}")

    @property
    def is_passthrough(self) -> bool:
        """``X -> 'X'``: a nonterminal that just rewrites to the same-named tag."""
        return len(self.rhs) == 1 and self.rhs[0].is_terminal and self.rhs[0].name == self.lhs.name

    def __str__(self) -> str:
        return f"{self.lhs} -> {' '.join(map(str, self.rhs))}"


class GrammarError(ValueError):
    def __init__(self, kind: str, message: str, line_no: Optional[int] = None):
        self.kind = kind
        self.line_no = line_no
        where = f"line {line_no}: " if line_no is not None else ""
        super().__init__(f"{where}{kind}: {message}")


@dataclass(frozen=True)
class Grammar:
    """The 4-tuple (N, Sigma, P, S)."""

    nonterminals: frozenset
    terminals: frozenset
    productions: tuple[Production, ...]
    start: Symbol

    @classmethod
    def build(cls, productions: Iterable[Production], start: str = START) -> "Grammar":
        prods = []
        seen = set()
        for p in productions:
            if p in seen:
                logger.warning("duplicate production %s dropped", p)
                continue
            seen.add(p)
            prods.append(p)
        nonterminals = frozenset(p.lhs for p in prods)
        terminals = frozenset(s for p in prods for s in p.rhs if s.is_terminal)
        g = cls(nonterminals, terminals, tuple(prods), N(start))
        g.check()
        return g

    def check(self):
        if self.start not in self.nonterminals:
            raise GrammarError("missing_start", f"no production for start symbol {self.start.name}")
        for t in self.terminals:
            if t.name not in _TERMINAL_NAMES:
                raise GrammarError("unknown_terminal", f"'{t.name}' is not a function tag")
        for p in self.productions:
            for s in p.rhs:
                if not s.is_terminal and s not in self.nonterminals:
                    raise GrammarError("undefined_nonterminal", f"{s.name} used in '{p}' but never defined")

    def rules_for(self, lhs: Symbol) -> list[Production]:
        return [p for p in self.productions if p.lhs == lhs]

    def unreachable(self) -> list[Symbol]:
        """Nonterminals the start symbol never reaches, in definition order."""
        reached = {self.start}
        todo = [self.start]
        while todo:
            a = todo.pop()
            for p in self.rules_for(a):
                for s in p.rhs:
                    if not s.is_terminal and s not in reached:
                        reached.add(s)
                        todo.append(s)
        order = []
        for p in self.productions:
            if p.lhs not in reached and p.lhs not in order:
                order.append(p.lhs)
        return order

    def validate(self) -> list[str]:
        """Non-fatal findings (currently: unreachable nonterminals)."""
        return [f"nonterminal {s.name} is unreachable from {self.start.name}" for s in self.unreachable()]

    def serialize(self) -> str:
        return serialize_grammar(self)


_TERMINAL_NAMES = frozenset(t.value for t in FunctionTag if t is not FunctionTag.Null)
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_\-]*$")
_SYMBOL = re.compile(r"'([^'\s]*)'|(\S+)")


def _strip_comment(line: str) -> str:
    out = []
    quoted = False
    for ch in line:
        if ch == "'":
            quoted = not quoted
        if ch == "#" and not quoted:
            break
        out.append(ch)
    return "".join(out)


def load_grammar(text: str, start: str = START) -> Grammar:
    prods = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        lhs, arrow, rest = line.partition("->")
        if not arrow:
            lhs, arrow, rest = line.partition("→")
        lhs = lhs.strip()
        if not arrow or not _NAME.match(lhs):
            raise GrammarError("syntax", f"expected 'LHS -> alternatives', got {raw.strip()!r}", no)
        for alt in rest.split("|"):
            rhs = []
            for m in _SYMBOL.finditer(alt):
                quoted, bare = m.group(1), m.group(2)
                if quoted is not None:
                    if quoted not in _TERMINAL_NAMES:
                        raise GrammarError("unknown_terminal", f"'{quoted}' is not a function tag", no)
                    rhs.append(T(quoted))
                else:
                    if not _NAME.match(bare):
                        raise GrammarError("syntax", f"bad symbol {bare!r}", no)
                    rhs.append(N(bare))
            if not rhs:
                raise GrammarError("empty_rhs", f"empty alternative for {lhs}", no)
            prods.append(Production(N(lhs), tuple(rhs)))
    if not prods:
        raise GrammarError("missing_start", "grammar has no productions")
    return Grammar.build(prods, start)


def serialize_grammar(g: Grammar) -> str:
    """One line per run of consecutive productions sharing a left-hand side."""
    lines = []
    run: list[Production] = []
    for p in g.productions + (None,):
        if run and (p is None or p.lhs != run[0].lhs):
            alts = " | ".join(" ".join(map(str, q.rhs)) for q in run)
            lines.append(f"{run[0].lhs.name} -> {alts}")
            run = []
        if p is not None:
            run.append(p)
    return "\n".join(lines) + "\n"


def default_grammar_text() -> str:
    return resources.files("funtag").joinpath("data").joinpath(DEFAULT_GRAMMAR_FILE).read_text(encoding="utf-8")


def default_grammar() -> Grammar:
    return load_grammar(default_grammar_text())
