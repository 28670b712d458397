"""Earley recognition and parse-tree enumeration over function-tag sequences."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .corpus import FunctionTag
from .grammar import Grammar, Kind, Production, Symbol

DEFAULT_CAP = 64


def _names(tags: Iterable) -> tuple[str, ...]:
    out = []
    for t in tags:
        name = t.value if isinstance(t, FunctionTag) else str(t)
        if name == FunctionTag.Null.value:
            raise ValueError("Null cannot be parsed")
        out.append(name)
    return tuple(out)


@dataclass(frozen=True)
class ParseTree:
    node: Symbol
    children: tuple["ParseTree", ...] = ()
    span: tuple[int, int] = (0, 0)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def fringe(self) -> list[str]:
        if self.is_leaf:
            return [self.node.name]
        return [name for c in self.children for name in c.fringe()]

    def production(self) -> Optional[Production]:
        if self.is_leaf:
            return None
        return Production(self.node, tuple(c.node for c in self.children))

    def internal_nodes(self) -> list["ParseTree"]:
        """Internal nodes in pre-order (the leftmost-derivation order)."""
        if self.is_leaf:
            return []
        out = [self]
        for c in self.children:
            out.extend(c.internal_nodes())
        return out

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)

    def __str__(self) -> str:
        if self.is_leaf:
            return str(self.node)
        return f"({self.node} {' '.join(map(str, self.children))})"


def check_tree(tree: ParseTree, grammar: Grammar, tags: Optional[Sequence] = None) -> list[str]:
    """Invariant violations for ``tree`` (empty list when it is well formed)."""
    problems = []
    if tags is not None and tree.fringe() != list(_names(tags)):
        problems.append(f"fringe {tree.fringe()} differs from input")
    if tree.node != grammar.start:
        problems.append(f"root is {tree.node}, not {grammar.start}")
    prods = set(grammar.productions)

    def walk(t: ParseTree):
        start, end = t.span
        if t.is_leaf:
            if not t.node.is_terminal:
                problems.append(f"leaf {t.node} is not a terminal")
            if end - start != 1:
                problems.append(f"leaf {t.node} spans {t.span}")
            return
        if t.node.is_terminal:
            problems.append(f"terminal {t.node} has children")
        if t.production() not in prods:
            problems.append(f"{t.production()} is not a grammar production")
        pos = start
        for c in t.children:
            if c.span[0] != pos:
                problems.append(f"child span {c.span} of {t.node} does not start at {pos}")
            pos = c.span[1]
            walk(c)
        if pos != end:
            problems.append(f"children of {t.node} end at {pos}, parent at {end}")

    walk(tree)
    return problems


@dataclass(frozen=True)
class _Item:
    prod: int
    dot: int
    origin: int


class Chart:
    """Earley chart for one input. No epsilon rules, so no nullable handling."""

    def __init__(self, grammar: Grammar, tags: Sequence):
        self.grammar = grammar
        self.words = _names(tags)
        self.prods = grammar.productions
        self._by_lhs: dict[Symbol, list[int]] = {}
        for i, p in enumerate(self.prods):
            self._by_lhs.setdefault(p.lhs, []).append(i)
        n = len(self.words)
        self.sets: list[dict[_Item, None]] = [dict() for _ in range(n + 1)]
        # completed[(lhs, i, j)] -> True when lhs derives words[i:j]
        self.completed: set[tuple[Symbol, int, int]] = set()
        self._run()

    def _add(self, k: int, item: _Item, agenda: list):
        if item not in self.sets[k]:
            self.sets[k][item] = None
            agenda.append(item)

    def _run(self):
        n = len(self.words)
        for i in self._by_lhs[self.grammar.start]:
            self.sets[0][_Item(i, 0, 0)] = None
        for k in range(n + 1):
            agenda = list(self.sets[k])
            predicted = set()
            while agenda:
                item = agenda.pop()
                rhs = self.prods[item.prod].rhs
                if item.dot == len(rhs):
                    lhs = self.prods[item.prod].lhs
                    self.completed.add((lhs, item.origin, k))
                    for waiting in list(self.sets[item.origin]):
                        wrhs = self.prods[waiting.prod].rhs
                        if waiting.dot < len(wrhs) and wrhs[waiting.dot] == lhs:
                            self._add(k, _Item(waiting.prod, waiting.dot + 1, waiting.origin), agenda)
                    continue
                sym = rhs[item.dot]
                if sym.is_terminal:
                    if k < n and self.words[k] == sym.name:
                        self.sets[k + 1][_Item(item.prod, item.dot + 1, item.origin)] = None
                    continue
                if sym not in predicted:
                    predicted.add(sym)
                    for i in self._by_lhs.get(sym, ()):
                        self._add(k, _Item(i, 0, k), agenda)

    def accepted(self) -> bool:
        return bool(self.words) and (self.grammar.start, 0, len(self.words)) in self.completed

    def viable_prefix(self) -> int:
        """Length of the longest input prefix that some sentence of the grammar extends."""
        best = 0
        for k, items in enumerate(self.sets):
            if items:
                best = k
        return best


def recognize(g: Grammar, tags: Sequence) -> bool:
    if not tags:
        return False
    return Chart(g, tags).accepted()


@dataclass
class ParseResult:
    trees: list[ParseTree] = field(default_factory=list)
    truncated: bool = False
    prefix: int = 0  # longest viable prefix, meaningful on rejection

    def __len__(self):
        return len(self.trees)

    def __iter__(self):
        return iter(self.trees)

    def __getitem__(self, i):
        return self.trees[i]

    def __bool__(self):
        return bool(self.trees)


class _Builder:
    def __init__(self, chart: Chart, limit: int):
        self.chart = chart
        self.limit = limit
        self.memo: dict[tuple[Symbol, int, int], list[ParseTree]] = {}
        self.hit_cycle = False

    def trees(self, sym: Symbol, i: int, j: int, stack: frozenset) -> list[ParseTree]:
        if sym.is_terminal:
            if j == i + 1 and self.chart.words[i] == sym.name:
                return [ParseTree(sym, (), (i, j))]
            return []
        key = (sym, i, j)
        if key not in self.chart.completed:
            return []
        if key in self.memo:
            return self.memo[key]
        if key in stack:
            self.hit_cycle = True
            return []
        outer_cycle = self.hit_cycle
        self.hit_cycle = False
        stack = stack | {key}
        out: list[ParseTree] = []
        for pi in self.chart._by_lhs.get(sym, ()):
            rhs = self.chart.prods[pi].rhs
            for kids in self._sequences(rhs, 0, i, j, stack):
                out.append(ParseTree(sym, kids, (i, j)))
                if len(out) >= self.limit:
                    break
            if len(out) >= self.limit:
                break
        if not self.hit_cycle:
            self.memo[key] = out
        self.hit_cycle = self.hit_cycle or outer_cycle
        return out

    def _sequences(self, rhs, k, i, j, stack):
        """Child tuples for rhs[k:] covering words[i:j], leftmost split first."""
        remaining = len(rhs) - k
        if remaining == 0:
            if i == j:
                yield ()
            return
        if j - i < remaining:
            return
        sym = rhs[k]
        last = j if remaining == 1 else j - (remaining - 1)
        for mid in range(i + 1, last + 1):
            if remaining == 1 and mid != j:
                continue
            for head in self.trees(sym, i, mid, stack):
                for rest in self._sequences(rhs, k + 1, mid, j, stack):
                    yield (head,) + rest


def parse(g: Grammar, tags: Sequence, cap: int = DEFAULT_CAP) -> ParseResult:
    """All parse trees (at most ``cap``), ordered by production order at each choice."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    if not tags:
        return ParseResult()
    chart = Chart(g, tags)
    if not chart.accepted():
        return ParseResult(prefix=chart.viable_prefix())
    builder = _Builder(chart, cap + 1)
    trees = builder.trees(g.start, 0, len(chart.words), frozenset())
    return ParseResult(trees[:cap], truncated=len(trees) > cap, prefix=len(chart.words))


@dataclass(frozen=True)
class DerivationStep:
    sentential_form: tuple[Symbol, ...]  # form before the rule is applied
    rule_applied: Production
    position: int  # index of the rewritten nonterminal in sentential_form

    def result(self) -> tuple[Symbol, ...]:
        f = self.sentential_form
        return f[:self.position] + self.rule_applied.rhs + f[self.position + 1:]


def derivation(tree: ParseTree) -> list[DerivationStep]:
    """Leftmost derivation of the tree's fringe, one step per internal node."""
    form: tuple[Symbol, ...] = (tree.node,)
    steps = []
    for node in tree.internal_nodes():
        pos = next(i for i, s in enumerate(form) if s.kind is Kind.NONTERMINAL)
        assert form[pos] == node.node
        step = DerivationStep(form, node.production(), pos)
        steps.append(step)
        form = step.result()
    return steps


def replay(steps: Sequence[DerivationStep]) -> tuple[Symbol, ...]:
    """Final sentential form of a derivation, checking leftmost-ness on the way."""
    if not steps:
        return ()
    form = steps[0].sentential_form
    for st in steps:
        if form != st.sentential_form:
            raise ValueError("derivation steps do not chain")
        first_nt = next(i for i, s in enumerate(form) if not s.is_terminal)
        if st.position != first_nt or form[st.position] != st.rule_applied.lhs:
            raise ValueError(f"step {st.rule_applied} is not leftmost")
        form = st.result()
    return form


class SentenceType(str, enum.Enum):
    SIMPLE = "simple"
    COMPLEX_CCP = "complex-CCP"
    COMPLEX_CCA = "complex-CCA"
    COMPLEX_CCS = "complex-CCS"
    OTHER = "other"

    def __str__(self):
        return self.value


def classify_sentence_type(tags: Sequence) -> SentenceType:
    names = set(_names(tags))
    for connector, kind in (("CCS", SentenceType.COMPLEX_CCS), ("CCP", SentenceType.COMPLEX_CCP),
                            ("CCA", SentenceType.COMPLEX_CCA)):
        if connector in names:
            return kind
    if "CCM" in names:
        return SentenceType.OTHER
    return SentenceType.SIMPLE
