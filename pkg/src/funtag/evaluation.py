"""Sentence-level precision / recall / F-measure, broken down by sentence type.

precision = correct / recognized * 100
recall    = correct / actual * 100
f         = 2PR / (P + R)

Values are exact fractions; rounding (half-up, 2 places) happens only when
a report is displayed.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from typing import Iterable, Optional

from .corpus import AnnotatedSentence, ChunkType
from .grammar import Grammar
from .model import Model
from .parser import SentenceType, classify_sentence_type, recognize
from .tagger import DecodeMode, tag_sentence

ROW_ORDER = tuple(SentenceType)
COLUMNS = ("type", "actual", "recognized", "correct", "precision", "recall", "f-measure")


class Correctness(str, enum.Enum):
    MATCH = "match"  # accepted and the predicted tags equal gold
    ACCEPT = "accept"  # accepted by the grammar

    def __str__(self):
        return self.value


@dataclass
class EvalCounts:
    actual: int = 0
    recognized: int = 0
    correct: int = 0

    def __post_init__(self):
        if min(self.actual, self.recognized, self.correct) < 0:
            raise ValueError("counts must be non-negative")

    def __add__(self, other: "EvalCounts") -> "EvalCounts":
        return EvalCounts(self.actual + other.actual, self.recognized + other.recognized,
                          self.correct + other.correct)


@dataclass(frozen=True)
class Metrics:
    """Percentages as exact fractions; None means undefined (zero denominator)."""

    precision: Optional[Fraction]
    recall: Optional[Fraction]
    f1: Optional[Fraction]

    def rounded(self) -> tuple[Optional[Decimal], ...]:
        return tuple(round_half_up(v) for v in (self.precision, self.recall, self.f1))


def round_half_up(v: Optional[Fraction], places: int = 2) -> Optional[Decimal]:
    if v is None:
        return None
    q = Decimal(1).scaleb(-places)
    return (Decimal(v.numerator) / Decimal(v.denominator)).quantize(q, rounding=ROUND_HALF_UP)


def metrics(c: EvalCounts) -> Metrics:
    p = Fraction(100 * c.correct, c.recognized) if c.recognized else None
    r = Fraction(100 * c.correct, c.actual) if c.actual else None
    if p is None or r is None:
        f = None
    elif p + r == 0:
        f = Fraction(0)
    else:
        f = 2 * p * r / (p + r)
    return Metrics(p, r, f)


@dataclass
class EvalReport:
    rows: dict[SentenceType, EvalCounts] = field(default_factory=dict)

    @property
    def overall(self) -> EvalCounts:
        total = EvalCounts()
        for c in self.rows.values():
            total = total + c
        return total

    def ordered_rows(self) -> list[tuple[str, EvalCounts]]:
        rows = [(str(t), self.rows[t]) for t in ROW_ORDER if t in self.rows and self.rows[t].actual]
        return rows + [("overall", self.overall)]

    def to_json(self) -> dict:
        out = {}
        for name, c in self.ordered_rows():
            m = metrics(c)
            out[name] = {
                "actual": c.actual, "recognized": c.recognized, "correct": c.correct,
                **{k: (float(v) if v is not None else None)
                   for k, v in zip(("precision", "recall", "f-measure"), m.rounded())},
            }
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    def to_text(self) -> str:
        def fmt(v):
            return "undefined" if v is None else f"{v}%"

        table = [COLUMNS]
        for name, c in self.ordered_rows():
            table.append((name, str(c.actual), str(c.recognized), str(c.correct),
                          *map(fmt, metrics(c).rounded())))
        widths = [max(len(r[i]) for r in table) for i in range(len(COLUMNS))]
        lines = []
        for r in table:
            cells = [r[0].ljust(widths[0])] + [v.rjust(w) for v, w in zip(r[1:], widths[1:])]
            lines.append("  ".join(cells))
        return "\n".join(lines) + "\n"


def gold_tags(s: AnnotatedSentence) -> list:
    tags = [c.gold_tag for c in s.chunks if c.chunk_type is not ChunkType.SFC]
    if any(t is None for t in tags):
        raise ValueError(f"gold sentence is not fully annotated: {s}")
    return tags


def evaluate(model: Model, grammar: Grammar, gold: Iterable[AnnotatedSentence],
             mode: DecodeMode | str = DecodeMode.GREEDY,
             criterion: Correctness | str = Correctness.MATCH) -> EvalReport:
    criterion = Correctness(criterion)
    report = EvalReport()
    for s in gold:
        expected = gold_tags(s)
        predicted = tag_sentence(model, s, mode).tags
        accepted = recognize(grammar, predicted)
        ok = accepted and (criterion is Correctness.ACCEPT or predicted == expected)
        row = report.rows.setdefault(classify_sentence_type(expected), EvalCounts())
        row.actual += 1
        row.recognized += accepted
        row.correct += ok
    return report
