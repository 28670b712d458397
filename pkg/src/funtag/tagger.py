"""Function tagging of chunked sentences.

Every content chunk becomes one lattice position whose candidates are the
support of P(tag | head feature). A path is scored as

    sum_i log P(t_i | pc_i) + sum_{i>1} log P(t_i | t_{i-1})

with unseen transitions floored at log(epsilon). A chunk whose head
feature was never seen has a single fixed candidate (the fallback tag)
scoring log(epsilon), and no incoming transition term.
"""

from __future__ import annotations

import enum
import json
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .corpus import (TERMINATOR, AnnotatedSentence, Chunk, ChunkType, FunctionTag,
                     head_feature)
from .model import Model

logger = logging.getLogger(__name__)

# Scores closer than this are treated as ties.
TIE_TOLERANCE = 1e-9


class DecodeMode(str, enum.Enum):
    GREEDY = "greedy"
    EXACT = "exact"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Position:
    """Candidates ``(tag, log score)`` in tagset order.

    ``anchored`` positions (unseen features) take no incoming transition.
    """

    candidates: tuple[tuple[FunctionTag, float], ...]
    anchored: bool = False


TransitionFn = Callable[[FunctionTag, FunctionTag], float]


@dataclass(frozen=True)
class TaggedItem:
    chunk: Chunk
    tag: FunctionTag
    score: float
    index: int  # position of the chunk in the input sentence


@dataclass(frozen=True)
class TaggedSentence:
    items: tuple[TaggedItem, ...]
    dropped: tuple[int, ...]
    decode_mode: DecodeMode
    source: AnnotatedSentence

    @property
    def tags(self) -> list[FunctionTag]:
        return [it.tag for it in self.items]

    @property
    def total_score(self) -> float:
        return math.fsum(it.score for it in self.items)

    def to_text(self) -> str:
        """``TAG[surface]#...`` with dropped sentence-final chunks folded into
        the preceding item, e.g. ``Active[သွားသည်]``."""
        surfaces = [it.chunk.surface for it in self.items]
        owner = {it.index: k for k, it in enumerate(self.items)}
        last = None
        for i, c in enumerate(self.source.chunks):
            if i in owner:
                last = owner[i]
            elif last is not None:
                surfaces[last] += c.surface
        body = "#".join(f"{it.tag}[{s}]" for it, s in zip(self.items, surfaces))
        return body + (TERMINATOR if self.source.terminated else "")

    def to_json(self) -> dict:
        return {
            "tags": [str(t) for t in self.tags],
            "items": [{"index": it.index, "tag": str(it.tag), "surface": it.chunk.surface,
                       "score": it.score} for it in self.items],
            "dropped": list(self.dropped),
            "decode_mode": str(self.decode_mode),
            "total_score": self.total_score,
            "text": self.to_text(),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), ensure_ascii=False, sort_keys=True)


def candidates(m: Model, c: Chunk) -> list[tuple[FunctionTag, float]]:
    """Possible tags for a content chunk with their prior probabilities."""
    return list(m.prior(head_feature(c)).items())


def content_positions(s: AnnotatedSentence) -> tuple[list[int], list[int]]:
    keep, dropped = [], []
    for i, c in enumerate(s.chunks):
        (dropped if c.chunk_type is ChunkType.SFC else keep).append(i)
    return keep, dropped


def build_lattice(m: Model, chunks: Sequence[Chunk], fallback: Optional[FunctionTag] = None) -> list[Position]:
    fallback = fallback or m.fallback_tag()
    lattice = []
    for c in chunks:
        pc = head_feature(c)
        logp = m.log_prior(pc)
        if logp:
            lattice.append(Position(tuple(logp.items())))
        else:
            logger.warning("unseen feature %s in %s; tagging as %s", pc, c, fallback)
            lattice.append(Position(((fallback, m.log_floor),), anchored=True))
    return lattice


def _step(pos: Position, prev: Optional[FunctionTag], trans: TransitionFn, tag: FunctionTag,
          emission: float) -> float:
    if prev is None or pos.anchored:
        return emission
    return emission + trans(prev, tag)


def path_score(lattice: Sequence[Position], tags: Sequence[FunctionTag], trans: TransitionFn) -> float:
    total = 0.0
    prev = None
    for pos, tag in zip(lattice, tags):
        emission = dict(pos.candidates)[tag]
        total += _step(pos, prev, trans, tag, emission)
        prev = tag
    return total


def decode_greedy(lattice: Sequence[Position], trans: TransitionFn) -> list[tuple[FunctionTag, float]]:
    """Left to right, committing to the best tag given the previous choice."""
    out = []
    prev = None
    for pos in lattice:
        best = None
        for tag, emission in pos.candidates:
            score = _step(pos, prev, trans, tag, emission)
            if best is None or score > best[1] + TIE_TOLERANCE:
                best = (tag, score)
        out.append(best)
        prev = best[0]
    return out


def decode_exact(lattice: Sequence[Position], trans: TransitionFn) -> list[tuple[FunctionTag, float]]:
    """Highest-scoring path; ties go to the earliest sequence in tagset order.

    Runs the dynamic program right to left (best suffix score per state),
    then walks forward picking the first tag that reaches the optimum.
    """
    n = len(lattice)
    if not n:
        return []
    # suffix[i][tag] = best score of positions i..n-1 given tag at i
    suffix: list[dict[FunctionTag, float]] = [dict() for _ in range(n)]
    for tag, emission in lattice[-1].candidates:
        suffix[-1][tag] = emission

    def continuation(i: int, tag: FunctionTag) -> dict[FunctionTag, float]:
        nxt = lattice[i + 1]
        return {t2: _step(nxt, tag, trans, t2, 0.0) + suffix[i + 1][t2] for t2, _ in nxt.candidates}

    for i in range(n - 2, -1, -1):
        for tag, emission in lattice[i].candidates:
            suffix[i][tag] = emission + max(continuation(i, tag).values())

    def first_best(scores: dict[FunctionTag, float]) -> FunctionTag:
        top = max(scores.values())
        return min((t for t, v in scores.items() if v >= top - TIE_TOLERANCE), key=lambda t: t.order)

    tags = [first_best(suffix[0])]
    for i in range(n - 1):
        tags.append(first_best(continuation(i, tags[-1])))

    out = []
    prev = None
    for pos, tag in zip(lattice, tags):
        out.append((tag, _step(pos, prev, trans, tag, dict(pos.candidates)[tag])))
        prev = tag
    return out


def tag_sentence(m: Model, s: AnnotatedSentence, mode: DecodeMode | str = DecodeMode.GREEDY,
                 fallback: Optional[FunctionTag] = None) -> TaggedSentence:
    mode = DecodeMode(mode)
    keep, dropped = content_positions(s)
    if not keep:
        raise ValueError("sentence has no content chunks")
    chunks = [s.chunks[i] for i in keep]
    lattice = build_lattice(m, chunks, fallback)
    decoder = decode_greedy if mode is DecodeMode.GREEDY else decode_exact
    decoded = decoder(lattice, m.log_transition)
    items = tuple(TaggedItem(c, tag, score, i) for c, i, (tag, score) in zip(chunks, keep, decoded))
    return TaggedSentence(items, tuple(dropped), mode, s)


def tag_greedy(m: Model, s: AnnotatedSentence, fallback: Optional[FunctionTag] = None) -> TaggedSentence:
    return tag_sentence(m, s, DecodeMode.GREEDY, fallback)


def tag_exact(m: Model, s: AnnotatedSentence, fallback: Optional[FunctionTag] = None) -> TaggedSentence:
    return tag_sentence(m, s, DecodeMode.EXACT, fallback)
