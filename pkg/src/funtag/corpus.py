"""Annotated-sentence data model and the corpus line format.

A corpus line looks like::

    NC@Subj[ကလေး/n.person,များ/part.number]#VC@Active[ကန်/v.common]#SFC@Null[သည်/sf]။

Grammar (whitespace around delimiters is ignored)::

    line  := chunk ('#' chunk)* '။'?
    chunk := TYPE ('@' TAG)? '[' token (',' token)* ']'
    token := SURFACE '/' POS ('.' CATEGORY)?
"""

from __future__ import annotations

import enum
import logging
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from typing import IO, Iterable, Optional

logger = logging.getLogger(__name__)

TERMINATOR = "။"  # ။
RESERVED = frozenset("/,[]#@")
POS_SYNONYMS = {"verb": "v"}


class FunctionTag(enum.Enum):
    """Closed function tagset; definition order is the tie-break order."""

    Active = "Active"
    Subj = "Subj"
    PSubj = "PSubj"
    SubjP = "SubjP"
    Obj = "Obj"
    PObj = "PObj"
    ObjP = "ObjP"
    PIobj = "PIobj"
    IobjP = "IobjP"
    Pla = "Pla"
    PPla = "PPla"
    PlaP = "PlaP"
    Tim = "Tim"
    PTim = "PTim"
    TimP = "TimP"
    PExt = "PExt"
    ExtP = "ExtP"
    PSim = "PSim"
    SimP = "SimP"
    PCom = "PCom"
    ComP = "ComP"
    POwn = "POwn"
    OwnP = "OwnP"
    Ada = "Ada"
    PcomplS = "PcomplS"
    PcomplP = "PcomplP"
    PPcomplO = "PPcomplO"
    PcomplOP = "PcomplOP"
    PUse = "PUse"
    UseP = "UseP"
    PCau = "PCau"
    CauP = "CauP"
    PAim = "PAim"
    AimP = "AimP"
    CCS = "CCS"
    CCM = "CCM"
    CCC = "CCC"
    CCP = "CCP"
    CCA = "CCA"
    Null = "Null"

    @property
    def order(self) -> int:
        return _TAG_ORDER[self]

    def __str__(self) -> str:
        return self.value

    def __lt__(self, other):
        if not isinstance(other, FunctionTag):
            return NotImplemented
        return self.order < other.order

    @classmethod
    def parse(cls, name: str) -> "FunctionTag":
        try:
            return cls(name)
        except ValueError:
            raise ValueError(f"unknown function tag {name!r}") from None


_TAG_ORDER = {t: i for i, t in enumerate(FunctionTag)}

#: Tags a decoder may output (everything except Null).
DECODING_TAGS: tuple[FunctionTag, ...] = tuple(t for t in FunctionTag if t is not FunctionTag.Null)


class ChunkType(enum.Enum):
    NC = "NC"
    PPC = "PPC"
    AC = "AC"
    RC = "RC"
    CC = "CC"
    SFC = "SFC"
    VC = "VC"

    def __str__(self) -> str:
        return self.value


# Coarse POS tags that mark the head token of each chunk type.
HEAD_POS = {
    ChunkType.NC: frozenset({"n", "pron"}),
    ChunkType.PPC: frozenset({"ppm"}),
    ChunkType.AC: frozenset({"adj"}),
    ChunkType.RC: frozenset({"adv"}),
    ChunkType.CC: frozenset({"cc"}),
    ChunkType.VC: frozenset({"v"}),
    ChunkType.SFC: frozenset({"sf"}),
}


@dataclass(frozen=True)
class PosFeature:
    """A coarse POS tag joined with its fine category, e.g. ``n.person``.

    ``category`` is None for bare tags such as ``sf``.
    """

    pos: str
    category: Optional[str] = None

    def __post_init__(self):
        if not self.pos or "." in self.pos:
            raise ValueError(f"bad POS {self.pos!r}")
        if self.category is not None and (not self.category or "." in self.category):
            raise ValueError(f"bad category {self.category!r}")

    def __str__(self) -> str:
        if self.category is None:
            return self.pos
        return f"{self.pos}.{self.category}"

    @classmethod
    def parse(cls, text: str) -> "PosFeature":
        text = unicodedata.normalize("NFC", text.strip())
        pos, dot, category = text.partition(".")
        pos = POS_SYNONYMS.get(pos, pos)
        if dot and (not category or "." in category):
            raise ValueError(f"malformed feature {text!r}")
        return cls(pos, category if dot else None)


@dataclass(frozen=True)
class Token:
    surface: str
    feature: PosFeature
    # Feature as written in the source (e.g. ``verb.common``); echoed on output only.
    spelling: Optional[str] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not self.surface or any(ch in RESERVED for ch in self.surface):
            raise ValueError(f"bad surface form {self.surface!r}")
        if self.spelling is not None and PosFeature.parse(self.spelling) != self.feature:
            object.__setattr__(self, "spelling", None)

    def __str__(self) -> str:
        return f"{self.surface}/{self.spelling or self.feature}"


@dataclass(frozen=True)
class Chunk:
    chunk_type: ChunkType
    tokens: tuple[Token, ...]
    gold_tag: Optional[FunctionTag] = None

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if not self.tokens:
            raise ValueError("chunk has no tokens")
        if (self.chunk_type is ChunkType.SFC and self.gold_tag is not None
                and self.gold_tag is not FunctionTag.Null):
            raise ValueError(f"SFC chunk tagged {self.gold_tag}, expected Null")

    @property
    def surface(self) -> str:
        return "".join(t.surface for t in self.tokens)

    def __str__(self) -> str:
        tag = f"@{self.gold_tag}" if self.gold_tag is not None else ""
        return f"{self.chunk_type}{tag}[{','.join(map(str, self.tokens))}]"


@dataclass(frozen=True)
class AnnotatedSentence:
    chunks: tuple[Chunk, ...]
    terminated: bool = True

    def __post_init__(self):
        object.__setattr__(self, "chunks", tuple(self.chunks))
        if not self.chunks:
            raise ValueError("sentence has no chunks")

    @property
    def fully_tagged(self) -> bool:
        return all(c.gold_tag is not None for c in self.chunks)

    def __str__(self) -> str:
        return serialize_sentence(self)


class ErrorKind(enum.Enum):
    BRACKET = "bracket"
    CHUNK_TYPE = "chunk_type"
    FUNCTION_TAG = "function_tag"
    EMPTY_TOKENS = "empty_tokens"
    RESERVED_CHAR = "reserved_char"
    TOKEN = "token"
    SFC_TAG = "sfc_tag"


class CorpusFormatError(ValueError):
    """A malformed corpus line. ``offset`` is a UTF-8 byte offset into the line."""

    def __init__(self, kind: ErrorKind, offset: int, message: str, line_no: Optional[int] = None):
        self.kind = kind
        self.offset = offset
        self.message = message
        self.line_no = line_no
        super().__init__(str(self))

    def __str__(self) -> str:
        where = f"line {self.line_no}, " if self.line_no is not None else ""
        return f"{where}byte {self.offset}: {self.kind.value}: {self.message}"


class _LineReader:
    """Cursor over a single corpus line."""

    def __init__(self, line: str):
        self.line = line
        self.pos = 0

    def error(self, kind, message, at=None):
        at = self.pos if at is None else at
        return CorpusFormatError(kind, len(self.line[:at].encode("utf-8")), message)

    def skip_ws(self):
        while self.pos < len(self.line) and self.line[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        return self.line[self.pos] if self.pos < len(self.line) else ""

    def read_until(self, stops: str) -> tuple[str, int]:
        start = self.pos
        while self.pos < len(self.line) and self.line[self.pos] not in stops:
            self.pos += 1
        return self.line[start:self.pos], start

    def chunk(self) -> Chunk:
        head, head_at = self.read_until("@[#,]" + TERMINATOR)
        name = head.strip()
        if self.peek() not in ("@", "["):
            raise self.error(ErrorKind.BRACKET, "expected '[' after chunk type")
        try:
            chunk_type = ChunkType(name)
        except ValueError:
            raise self.error(ErrorKind.CHUNK_TYPE, f"unknown chunk type {name!r}", head_at) from None
        gold = None
        if self.peek() == "@":
            self.pos += 1
            tag_text, tag_at = self.read_until("[#,]" + TERMINATOR)
            try:
                gold = FunctionTag.parse(tag_text.strip())
            except ValueError as exc:
                raise self.error(ErrorKind.FUNCTION_TAG, str(exc), tag_at) from None
        if self.peek() != "[":
            raise self.error(ErrorKind.BRACKET, "expected '['")
        open_at = self.pos
        self.pos += 1
        tokens = []
        while True:
            text, text_at = self.read_until(",]#")
            if self.peek() == "#" or not self.peek():
                raise self.error(ErrorKind.BRACKET, "unclosed '['", open_at)
            if text.strip() or tokens or self.peek() == ",":
                tokens.append(self.token(text, text_at))
            sep = self.peek()
            self.pos += 1
            if sep == "]":
                break
        if not tokens:
            raise self.error(ErrorKind.EMPTY_TOKENS, "chunk has no tokens", open_at)
        if chunk_type is ChunkType.SFC and gold not in (None, FunctionTag.Null):
            raise self.error(ErrorKind.SFC_TAG, f"SFC chunk tagged {gold}, expected Null", head_at)
        return Chunk(chunk_type, tuple(tokens), gold)

    def token(self, text: str, at: int) -> Token:
        stripped = text.strip()
        if not stripped:
            raise self.error(ErrorKind.TOKEN, "empty token", at)
        surface, slash, feature = stripped.partition("/")
        surface = unicodedata.normalize("NFC", surface.strip())
        offset = at + text.index(stripped[0])
        bad = [ch for ch in surface if ch in RESERVED]
        if bad:
            raise self.error(ErrorKind.RESERVED_CHAR,
                             f"reserved character {bad[0]!r} in surface form", offset)
        if not slash or not surface:
            raise self.error(ErrorKind.TOKEN, f"expected SURFACE/POS.CATEGORY, got {stripped!r}", offset)
        if "/" in feature:
            raise self.error(ErrorKind.RESERVED_CHAR, "reserved character '/' in feature", offset)
        try:
            spelling = unicodedata.normalize("NFC", feature.strip())
            return Token(surface, PosFeature.parse(spelling), spelling)
        except ValueError as exc:
            raise self.error(ErrorKind.TOKEN, str(exc), offset) from None


def parse_sentence_line(line: str) -> AnnotatedSentence:
    """Parse one corpus line into an :class:`AnnotatedSentence`."""
    line = unicodedata.normalize("NFC", line.rstrip("\r\n").lstrip("﻿"))
    reader = _LineReader(line)
    chunks = []
    terminated = False
    while True:
        reader.skip_ws()
        chunks.append(reader.chunk())
        reader.skip_ws()
        nxt = reader.peek()
        if nxt == "#":
            reader.pos += 1
            continue
        if nxt == TERMINATOR:
            reader.pos += 1
            reader.skip_ws()
            if reader.peek():
                raise reader.error(ErrorKind.BRACKET, "text after sentence terminator")
            terminated = True
            break
        if not nxt:
            break
        raise reader.error(ErrorKind.BRACKET, f"unexpected {nxt!r} after chunk")
    return AnnotatedSentence(tuple(chunks), terminated)


def serialize_sentence(s: AnnotatedSentence) -> str:
    return "#".join(map(str, s.chunks)) + (TERMINATOR if s.terminated else "")


_warned_heads: set = set()


def head_token(c: Chunk) -> Token:
    wanted = HEAD_POS[c.chunk_type]
    for tok in reversed(c.tokens):
        if tok.feature.pos in wanted:
            return tok
    key = (c.chunk_type, tuple(t.feature for t in c.tokens))
    if key not in _warned_heads:
        _warned_heads.add(key)
        logger.warning("no %s head in %s chunk %s; using first token", "/".join(sorted(wanted)),
                       c.chunk_type, c)
    return c.tokens[0]


def head_feature(c: Chunk) -> PosFeature:
    """Feature of the chunk's head: the last token whose POS fits the chunk type."""
    return head_token(c).feature


@dataclass
class CorpusStats:
    sentences: int = 0
    chunks: int = 0
    tags: Counter = field(default_factory=Counter)
    features: Counter = field(default_factory=Counter)

    def add(self, s: AnnotatedSentence):
        self.sentences += 1
        self.chunks += len(s.chunks)
        for c in s.chunks:
            self.tags[str(c.gold_tag) if c.gold_tag is not None else "-"] += 1
            self.features[str(head_feature(c))] += 1

    def to_text(self) -> str:
        """Tab-separated ``key value`` lines, histogram keys sorted."""
        lines = [f"sentences\t{self.sentences}", f"chunks\t{self.chunks}"]
        lines += [f"tag.{k}\t{v}" for k, v in sorted(self.tags.items())]
        lines += [f"feature.{k}\t{v}" for k, v in sorted(self.features.items())]
        return "\n".join(lines) + "\n"


@dataclass
class LoadedCorpus:
    sentences: list[AnnotatedSentence]
    line_numbers: list[int]
    stats: CorpusStats
    errors: list[CorpusFormatError]

    def __iter__(self):
        return iter(self.sentences)

    def __len__(self):
        return len(self.sentences)


def iter_lines(source: IO[str] | Iterable[str]):
    """Yield ``(line_no, line)`` for every non-blank, non-comment line."""
    for no, raw in enumerate(source, 1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip("﻿").startswith("%"):
            continue
        yield no, line


def load_corpus(source: IO[str] | Iterable[str], strict: bool = True) -> LoadedCorpus:
    """Read one sentence per line.

    With ``strict`` the first malformed line raises; otherwise errors are
    collected (each carrying its line number) and reading continues.
    """
    out = LoadedCorpus([], [], CorpusStats(), [])
    for no, line in iter_lines(source):
        try:
            s = parse_sentence_line(line)
        except CorpusFormatError as exc:
            exc.line_no = no
            if strict:
                raise
            logger.warning("%s", exc)
            out.errors.append(exc)
            continue
        out.sentences.append(s)
        out.line_numbers.append(no)
        out.stats.add(s)
    return out
