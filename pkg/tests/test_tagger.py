import json
import logging
import math
import random

import pytest

from funtag.corpus import (AnnotatedSentence, Chunk, ChunkType, FunctionTag as F, PosFeature, Token,
                           parse_sentence_line)
from funtag.model import Model
from funtag.tagger import (DecodeMode, Position, build_lattice, candidates, decode_exact,
                           decode_greedy, path_score, tag_exact, tag_greedy, tag_sentence)

from conftest import FIG3_INPUT, FIG3_OUTPUT, FIG3_TAGS
from oracles import brute_force_decode, exact_lattice, exact_path_value, random_decoding_instance


def chunk(ct, feat, surface="x"):
    return Chunk(ct, (Token(surface, PosFeature.parse(feat)),))


def sentence(*chunks):
    return AnnotatedSentence(tuple(chunks), True)


def test_fig3_greedy(demo_model, fig3_sentence):
    # Hand arithmetic under the sample model:
    #   n.person: PSubj 4/9 beats Subj 2/9 on the first chunk.
    #   cc.chunk: CCC only. n.person after CCC: CCC->PSubj is 1, so PSubj.
    #   ppm.subj after PSubj: SubjP 1 * 8/9. n.objects after PlaP: PUse .4 * 1/3.
    out = tag_greedy(demo_model, fig3_sentence)
    assert [str(t) for t in out.tags] == FIG3_TAGS
    assert out.to_text() == FIG3_OUTPUT
    assert out.dropped == (9,)


def test_fig3_exact_agrees(demo_model, fig3_sentence):
    assert tag_exact(demo_model, fig3_sentence).tags == tag_greedy(demo_model, fig3_sentence).tags


def test_candidates_examples():
    m = Model.from_counts({(F.CCC, PosFeature("cc", "chunk")): 4, (F.Active, PosFeature("v", "common")): 9})
    assert candidates(m, chunk(ChunkType.CC, "cc.chunk")) == [(F.CCC, 1.0)]
    assert candidates(m, chunk(ChunkType.VC, "v.common")) == [(F.Active, 1.0)]
    assert candidates(m, chunk(ChunkType.NC, "n.unknown")) == []


def test_single_chunk_scores_zero():
    m = Model.from_counts({(F.Active, PosFeature("v", "common")): 3})
    out = tag_greedy(m, sentence(chunk(ChunkType.VC, "v.common")))
    assert out.tags == [F.Active]
    assert out.items[0].score == 0.0


def test_singleton_candidates_ignore_transitions():
    m = Model.from_counts({(F.Subj, PosFeature("n", "a")): 2, (F.Active, PosFeature("v", "common")): 2},
                          {(F.Subj, F.Active): 5})
    s = sentence(chunk(ChunkType.VC, "v.common"), chunk(ChunkType.NC, "n.a"), chunk(ChunkType.VC, "v.common"))
    for mode in DecodeMode:
        assert tag_sentence(m, s, mode).tags == [F.Active, F.Subj, F.Active]


def greedy_trap():
    na, pb, vc = PosFeature("n", "a"), PosFeature("ppm", "b"), PosFeature("v", "common")
    m = Model.from_counts(
        {(F.PSubj, na): 3, (F.PObj, na): 2, (F.SubjP, pb): 1, (F.ObjP, pb): 1, (F.Active, vc): 1},
        {(F.SubjP, F.PSubj): 1, (F.Active, F.PSubj): 9, (F.ObjP, F.PObj): 1,
         (F.Active, F.SubjP): 1, (F.Active, F.ObjP): 1})
    s = sentence(chunk(ChunkType.NC, "n.a"), chunk(ChunkType.PPC, "ppm.b"), chunk(ChunkType.VC, "v.common"))
    return m, s


def test_greedy_trap():
    # greedy: PSubj (.6), SubjP (.5 * .1), Active (1) = .03
    # exact:  PObj (.4),  ObjP  (.5 * 1),  Active (1) = .2
    m, s = greedy_trap()
    g, e = tag_greedy(m, s), tag_exact(m, s)
    assert g.tags == [F.PSubj, F.SubjP, F.Active]
    assert e.tags == [F.PObj, F.ObjP, F.Active]
    assert g.total_score == pytest.approx(math.log(0.03))
    assert e.total_score == pytest.approx(math.log(0.2))
    assert e.total_score > g.total_score
    best, value = brute_force_decode(m, s)
    assert best == e.tags and float(value) == pytest.approx(0.2)


def test_first_chunk_tie_goes_to_tagset_order():
    na = PosFeature("n", "a")
    m = Model.from_counts({(F.PObj, na): 1, (F.PSubj, na): 1})
    for mode in DecodeMode:
        assert tag_sentence(m, sentence(chunk(ChunkType.NC, "n.a")), mode).tags == [F.PSubj]


def test_exact_matches_brute_force_oracle():
    rng = random.Random(2024)
    for _ in range(200):
        m, s = random_decoding_instance(rng)
        out = tag_exact(m, s)
        best, value = brute_force_decode(m, s)
        lattice = exact_lattice(m, s)
        assert exact_path_value(m, lattice, out.tags) == value
        assert out.tags == best


def test_exact_never_worse_than_greedy():
    rng = random.Random(99)
    for _ in range(200):
        m, s = random_decoding_instance(rng)
        assert tag_exact(m, s).total_score >= tag_greedy(m, s).total_score - 1e-9


def test_reported_scores_add_up():
    rng = random.Random(4)
    for _ in range(50):
        m, s = random_decoding_instance(rng)
        for mode in DecodeMode:
            out = tag_sentence(m, s, mode)
            lattice = build_lattice(m, [it.chunk for it in out.items])
            assert out.total_score == pytest.approx(path_score(lattice, out.tags, m.log_transition))


def test_scale_invariance():
    rng = random.Random(31)
    shift = math.log(0.37)
    for _ in range(100):
        m, s = random_decoding_instance(rng)
        lattice = build_lattice(m, [c for c in s.chunks if c.chunk_type is not ChunkType.SFC])
        scaled = [Position(tuple((t, v + shift) for t, v in p.candidates), p.anchored) for p in lattice]

        def trans(a, b):
            return m.log_transition(a, b) + shift

        for decode in (decode_greedy, decode_exact):
            assert [t for t, _ in decode(lattice, m.log_transition)] == [t for t, _ in decode(scaled, trans)]


def test_determinism():
    rng = random.Random(8)
    for _ in range(30):
        m, s = random_decoding_instance(rng)
        for mode in DecodeMode:
            assert tag_sentence(m, s, mode) == tag_sentence(m, s, mode)


def test_sfc_dropped_and_no_null(demo_model, sample_corpus):
    for s in sample_corpus:
        out = tag_greedy(demo_model, s)
        sfc = [i for i, c in enumerate(s.chunks) if c.chunk_type is ChunkType.SFC]
        assert list(out.dropped) == sfc
        assert F.Null not in out.tags
        assert [it.index for it in out.items] == [i for i in range(len(s.chunks)) if i not in sfc]


def test_unseen_feature_falls_back(demo_model, caplog):
    s = parse_sentence_line("NC[ကြောင်/n.nothing]#VC[သွား/v.common]#SFC[သည်/sf]။")
    with caplog.at_level(logging.WARNING):
        out = tag_greedy(demo_model, s)
    assert out.tags[0] is demo_model.fallback_tag()
    assert out.items[0].score == pytest.approx(math.log(demo_model.floor_epsilon))
    assert "n.nothing" in caplog.text


def test_explicit_fallback(demo_model):
    s = parse_sentence_line("NC[ကြောင်/n.nothing]")
    assert tag_greedy(demo_model, s, fallback=F.Obj).tags == [F.Obj]


def test_empty_sentence_rejected(demo_model):
    with pytest.raises(ValueError):
        tag_greedy(demo_model, parse_sentence_line("SFC[သည်/sf]။"))


def test_json_schema(demo_model, fig3_sentence):
    d = json.loads(tag_exact(demo_model, fig3_sentence).dumps())
    assert d["tags"] == FIG3_TAGS
    assert d["dropped"] == [9]
    assert d["decode_mode"] == "exact"
    assert d["text"] == FIG3_OUTPUT
    assert [it["index"] for it in d["items"]] == list(range(9))
    assert d["total_score"] == pytest.approx(sum(it["score"] for it in d["items"]))


def test_untagged_input_text_round(demo_model):
    assert tag_greedy(demo_model, parse_sentence_line(FIG3_INPUT)).to_text() == FIG3_OUTPUT
