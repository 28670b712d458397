"""Count tables and the prior / transition distributions derived from them.

prior:       P(tag | feature)  = C(tag, feature) / C(feature)
transition:  P(next | current) = C(next, current) / C(current)

Both accept optional add-alpha smoothing over the decoding tagset.
"""

from __future__ import annotations

import hashlib
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .corpus import DECODING_TAGS, AnnotatedSentence, FunctionTag, PosFeature, head_feature

FORMAT_HEADER = "funtag-model v1"
Distribution = dict  # FunctionTag -> probability


class ModelError(ValueError):
    pass


class ModelFormatError(ModelError):
    """Unreadable model file. ``kind`` is one of version, shape, checksum."""

    def __init__(self, kind: str, message: str, line_no: int | None = None):
        self.kind = kind
        self.line_no = line_no
        where = f" (line {line_no})" if line_no is not None else ""
        super().__init__(f"{kind}: {message}{where}")


@dataclass
class CountTables:
    tag_feat: Counter = field(default_factory=Counter)  # (tag, feature) -> n
    feat: Counter = field(default_factory=Counter)  # feature -> n
    next_tag: Counter = field(default_factory=Counter)  # (next, current) -> n
    tag: Counter = field(default_factory=Counter)  # current -> n (occurrences with a successor)

    def add_sentence(self, s: AnnotatedSentence):
        chunks = [c for c in s.chunks if c.gold_tag is not FunctionTag.Null]
        for c in chunks:
            if c.gold_tag is None:
                raise ModelError(f"chunk {c} has no gold tag")
            pc = head_feature(c)
            self.tag_feat[(c.gold_tag, pc)] += 1
            self.feat[pc] += 1
        for cur, nxt in zip(chunks, chunks[1:]):
            self.next_tag[(nxt.gold_tag, cur.gold_tag)] += 1
            self.tag[cur.gold_tag] += 1

    def problems(self) -> list[str]:
        """Violations of the count-consistency invariants (empty when valid)."""
        out = []
        feat_sums = Counter()
        for (t, pc), n in self.tag_feat.items():
            feat_sums[pc] += n
        for pc in set(feat_sums) | set(self.feat):
            if feat_sums[pc] != self.feat[pc]:
                out.append(f"sum of C(t, {pc}) is {feat_sums[pc]}, C({pc}) is {self.feat[pc]}")
        next_sums = Counter()
        for (n, t), c in self.next_tag.items():
            next_sums[t] += c
        for t in set(next_sums) | set(self.tag):
            if next_sums[t] > self.tag[t]:
                out.append(f"sum of C(n, {t}) is {next_sums[t]} > C({t}) = {self.tag[t]}")
        for table in (self.tag_feat, self.feat, self.next_tag, self.tag):
            for k, n in table.items():
                if not isinstance(n, int) or n < 0:
                    out.append(f"bad count {n!r} for {k}")
        for key in list(self.tag_feat) + list(self.next_tag) + list(self.tag):
            tags = key if isinstance(key, tuple) else (key,)
            if any(t is FunctionTag.Null for t in tags if isinstance(t, FunctionTag)):
                out.append(f"Null in count key {key}")
        return out

    def validate(self):
        problems = self.problems()
        if problems:
            raise ModelError("; ".join(problems))


def _distribution(counts: Mapping[FunctionTag, int], total: int, alpha: float) -> Distribution:
    if alpha == 0:
        return {t: counts[t] / total for t in sorted(counts) if counts[t] > 0}
    denom = total + alpha * len(DECODING_TAGS)
    return {t: (counts.get(t, 0) + alpha) / denom for t in DECODING_TAGS}


class Model:
    """Trained tables. Treat as immutable once built."""

    def __init__(self, counts: CountTables, smoothing_alpha: float = 0.0, floor_epsilon: float = 1e-9):
        if smoothing_alpha < 0 or not math.isfinite(smoothing_alpha):
            raise ModelError(f"smoothing_alpha must be >= 0, got {smoothing_alpha}")
        if not floor_epsilon > 0:
            raise ModelError(f"floor_epsilon must be > 0, got {floor_epsilon}")
        counts.validate()
        self.counts = counts
        self.smoothing_alpha = float(smoothing_alpha)
        self.floor_epsilon = float(floor_epsilon)

        by_feat: dict[PosFeature, Counter] = {}
        for (t, pc), n in counts.tag_feat.items():
            by_feat.setdefault(pc, Counter())[t] += n
        self._prior = {pc: _distribution(c, counts.feat[pc], self.smoothing_alpha)
                       for pc, c in by_feat.items() if counts.feat[pc] > 0}

        by_tag: dict[FunctionTag, Counter] = {}
        for (n, t), c in counts.next_tag.items():
            by_tag.setdefault(t, Counter())[n] += c
        self._transition = {t: _distribution(c, counts.tag[t], self.smoothing_alpha)
                            for t, c in by_tag.items() if counts.tag[t] > 0}

        self._log_prior = {pc: {t: math.log(p) for t, p in d.items()} for pc, d in self._prior.items()}
        self._log_transition = {t: {n: math.log(p) for n, p in d.items()}
                                for t, d in self._transition.items()}
        self.log_floor = math.log(self.floor_epsilon)

    @classmethod
    def from_counts(cls, tag_feat=(), next_tag=(), **kw) -> "Model":
        """Build a model from ``{(tag, feature): n}`` and ``{(next, cur): n}`` tables.

        Marginals are filled in so that every current tag has all its
        successors recorded.
        """
        counts = CountTables()
        for (t, pc), n in dict(tag_feat).items():
            counts.tag_feat[(t, pc)] += n
            counts.feat[pc] += n
        for (n, t), c in dict(next_tag).items():
            counts.next_tag[(n, t)] += c
            counts.tag[t] += c
        return cls(counts, **kw)

    def prior(self, pc: PosFeature) -> Distribution:
        return dict(self._prior.get(pc, {}))

    def transition(self, t: FunctionTag) -> Distribution:
        if t is FunctionTag.Null:
            raise ValueError("transition() is undefined for Null")
        return dict(self._transition.get(t, {}))

    def log_prior(self, pc: PosFeature) -> Mapping[FunctionTag, float]:
        return self._log_prior.get(pc, {})

    def log_transition(self, prev: FunctionTag, nxt: FunctionTag) -> float:
        """log P(nxt | prev), floored at log(floor_epsilon) when unseen."""
        return self._log_transition.get(prev, {}).get(nxt, self.log_floor)

    def features(self) -> list[PosFeature]:
        return sorted(self._prior, key=str)

    def fallback_tag(self) -> FunctionTag:
        """Most frequent tag (ties by tagset order)."""
        freq = self.counts.tag
        if not freq:
            freq = Counter()
            for (t, _), n in self.counts.tag_feat.items():
                freq[t] += n
        if not freq:
            return FunctionTag.Active
        return min(freq, key=lambda t: (-freq[t], t.order))

    def with_params(self, smoothing_alpha=None, floor_epsilon=None) -> "Model":
        return Model(self.counts,
                     self.smoothing_alpha if smoothing_alpha is None else smoothing_alpha,
                     self.floor_epsilon if floor_epsilon is None else floor_epsilon)

    def __eq__(self, other):
        if not isinstance(other, Model):
            return NotImplemented
        return (self.counts == other.counts and self.smoothing_alpha == other.smoothing_alpha
                and self.floor_epsilon == other.floor_epsilon)

    __hash__ = None

    def __repr__(self):
        return (f"Model({len(self._prior)} features, {len(self._transition)} tags with successors, "
                f"alpha={self.smoothing_alpha}, epsilon={self.floor_epsilon})")


def train(corpus: Iterable[AnnotatedSentence], smoothing_alpha: float = 0.0,
          floor_epsilon: float = 1e-9) -> Model:
    counts = CountTables()
    seen = 0
    for s in corpus:
        counts.add_sentence(s)
        seen += 1
    if not seen:
        raise ModelError("empty corpus")
    return Model(counts, smoothing_alpha, floor_epsilon)


def prior(m: Model, pc: PosFeature) -> Distribution:
    return m.prior(pc)


def transition(m: Model, t: FunctionTag) -> Distribution:
    return m.transition(t)


# -- model file ------------------------------------------------------------

def _body_lines(m: Model) -> list[str]:
    c = m.counts
    lines = [FORMAT_HEADER, "[params]",
             f"smoothing_alpha\t{m.smoothing_alpha!r}", f"floor_epsilon\t{m.floor_epsilon!r}"]

    def section(name, rows):
        lines.append(f"[{name}]")
        lines.extend("\t".join(map(str, r)) for r in sorted(rows, key=lambda r: tuple(map(str, r[:-1]))))

    section("counts.tag_feat", [(t, pc, n) for (t, pc), n in c.tag_feat.items() if n])
    section("counts.feat", [(pc, n) for pc, n in c.feat.items() if n])
    section("counts.next_tag", [(n, t, k) for (n, t), k in c.next_tag.items() if k])
    section("counts.tag", [(t, n) for t, n in c.tag.items() if n])
    section("prior", [(pc, t, f"{p:.12g}") for pc in m._prior for t, p in m._prior[pc].items()])
    section("transition", [(t, n, f"{p:.12g}") for t in m._transition
                           for n, p in m._transition[t].items()])
    return lines


def save_model(m: Model) -> bytes:
    lines = _body_lines(m)
    digest = hashlib.sha256("\n".join(lines).encode("utf-8")).hexdigest()
    lines += ["[checksum]", f"sha256\t{digest}"]
    return ("\n".join(lines) + "\n").encode("utf-8")


def _tag(text, no):
    try:
        t = FunctionTag.parse(text)
    except ValueError as exc:
        raise ModelFormatError("shape", str(exc), no) from None
    if t is FunctionTag.Null:
        raise ModelFormatError("shape", "Null cannot appear in a model", no)
    return t


def _feature(text, no):
    try:
        return PosFeature.parse(text)
    except ValueError as exc:
        raise ModelFormatError("shape", str(exc), no) from None


def _count(text, no):
    try:
        n = int(text)
    except ValueError:
        raise ModelFormatError("shape", f"bad count {text!r}", no) from None
    if n < 0:
        raise ModelFormatError("shape", f"negative count {n}", no)
    return n


def load_model(data: bytes | str) -> Model:
    """Inverse of :func:`save_model`.

    Only the header and count sections are required; stored probabilities
    and the checksum, when present, are checked against the counts.
    """
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    raw = text.replace("\r\n", "\n").split("\n")
    if not raw or raw[0].strip() != FORMAT_HEADER:
        got = raw[0].strip() if raw else ""
        raise ModelFormatError("version", f"expected {FORMAT_HEADER!r}, got {got!r}", 1)

    counts = CountTables()
    params = {"smoothing_alpha": 0.0, "floor_epsilon": 1e-9}
    stored_prior, stored_trans = {}, {}
    checksum = None
    body_end = len(raw)
    section = None
    arity = {"params": 2, "counts.tag_feat": 3, "counts.feat": 2, "counts.next_tag": 3,
             "counts.tag": 2, "prior": 3, "transition": 3, "checksum": 2}
    for no, line in enumerate(raw[1:], 2):
        if not line.strip() or line.startswith("%"):
            continue
        if line.startswith("[") and line.rstrip().endswith("]"):
            section = line.strip()[1:-1]
            if section not in arity:
                raise ModelFormatError("shape", f"unknown section [{section}]", no)
            if section == "checksum":
                body_end = no - 1
            continue
        if section is None:
            raise ModelFormatError("shape", "row outside any section", no)
        row = line.split("\t")
        if len(row) != arity[section]:
            raise ModelFormatError("shape", f"[{section}] rows need {arity[section]} fields", no)
        if section == "params":
            if row[0] not in params:
                raise ModelFormatError("shape", f"unknown parameter {row[0]!r}", no)
            try:
                params[row[0]] = float(row[1])
            except ValueError:
                raise ModelFormatError("shape", f"bad value {row[1]!r}", no) from None
        elif section == "counts.tag_feat":
            counts.tag_feat[(_tag(row[0], no), _feature(row[1], no))] += _count(row[2], no)
        elif section == "counts.feat":
            counts.feat[_feature(row[0], no)] += _count(row[1], no)
        elif section == "counts.next_tag":
            counts.next_tag[(_tag(row[0], no), _tag(row[1], no))] += _count(row[2], no)
        elif section == "counts.tag":
            counts.tag[_tag(row[0], no)] += _count(row[1], no)
        elif section == "prior":
            stored_prior[(_feature(row[0], no), _tag(row[1], no))] = float(row[2])
        elif section == "transition":
            stored_trans[(_tag(row[0], no), _tag(row[1], no))] = float(row[2])
        elif section == "checksum":
            if row[0] != "sha256":
                raise ModelFormatError("checksum", f"unsupported digest {row[0]!r}", no)
            checksum = row[1].strip()

    if checksum is not None:
        body = "\n".join(l for l in raw[:body_end] if l.strip() and not l.startswith("%"))
        if hashlib.sha256(body.encode("utf-8")).hexdigest() != checksum:
            raise ModelFormatError("checksum", "checksum mismatch")

    problems = counts.problems()
    if problems:
        raise ModelFormatError("shape", "; ".join(problems))
    try:
        m = Model(counts, params["smoothing_alpha"], params["floor_epsilon"])
    except ModelError as exc:
        raise ModelFormatError("shape", str(exc)) from None

    for (pc, t), p in stored_prior.items():
        if abs(m.prior(pc).get(t, 0.0) - p) > 1e-9:
            raise ModelFormatError("shape", f"stored P({t}|{pc})={p} disagrees with counts")
    for (t, n), p in stored_trans.items():
        if abs(m.transition(t).get(n, 0.0) - p) > 1e-9:
            raise ModelFormatError("shape", f"stored P({n}|{t})={p} disagrees with counts")
    return m
