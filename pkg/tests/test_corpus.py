import io
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from funtag.corpus import (AnnotatedSentence, Chunk, ChunkType, CorpusFormatError, ErrorKind,
                           FunctionTag, PosFeature, Token, head_feature, load_corpus,
                           parse_sentence_line, serialize_sentence)

from conftest import FIG3_INPUT
from oracles import random_sentence

FIG1_CLEAN = ("VC@Active[မိုးရွာ/verb.common]#CC@CCS[လျှင်/cc.sent]#NC@Subj[ကလေး/n.person,များ/part.number]"
              "#NC@Obj[ဘောလုံး/n.objects]#VC@Active [ကန်ကြဲ/verb.common]#SFC@Null[သည်/sf]။")


def test_fig1_first_and_last_chunks():
    s = parse_sentence_line("VC@Active[မိုးရွာ/verb.common]#SFC@Null[သည်/sf]။")
    assert s.terminated
    assert [(c.chunk_type, c.gold_tag, len(c.tokens)) for c in s.chunks] == [
        (ChunkType.VC, FunctionTag.Active, 1), (ChunkType.SFC, FunctionTag.Null, 1)]


def test_untagged_noun_chunk():
    s = parse_sentence_line("NC[သူတို့/pron.person]")
    assert not s.terminated
    (c,) = s.chunks
    assert c.chunk_type is ChunkType.NC and c.gold_tag is None and len(c.tokens) == 1


def test_two_token_chunk():
    (c,) = parse_sentence_line("NC@Subj[ကလေး/n.person,များ/part.number]").chunks
    assert [t.feature for t in c.tokens] == [PosFeature("n", "person"), PosFeature("part", "number")]


def test_verb_normalized_to_v():
    s = parse_sentence_line(FIG1_CLEAN)
    assert s.chunks[0].tokens[0].feature == PosFeature("v", "common")


@pytest.mark.parametrize("line", [
    "NC[သူတို့/pron.person]", "PPC[တွင်/ppm.place]", "AC[ရဲရင့်/adj.dem]", "RC[လျင်မြန်စွာ/adv.manner]",
    "CC[သို့မဟုတ်/cc.chunk]", "SFC[၏/sf.declarative]", "VC[ကူညီ/v.common]", FIG1_CLEAN, FIG3_INPUT,
])
def test_paper_fragments_parse(line):
    assert parse_sentence_line(line).chunks


@pytest.mark.parametrize("line, kind", [
    ("XX@Subj[a/b.c]", ErrorKind.CHUNK_TYPE),
    ("NC@Foo[a/n.x]", ErrorKind.FUNCTION_TAG),
    ("NC[]", ErrorKind.EMPTY_TOKENS),
    ("NC[a/n.x", ErrorKind.BRACKET),
    ("NC[a/n.x]]", ErrorKind.BRACKET),
    ("NC a/n.x]", ErrorKind.BRACKET),
    ("NC[a@b/n.x]", ErrorKind.RESERVED_CHAR),
    ("NC[a[b/n.x]", ErrorKind.RESERVED_CHAR),
    ("NC[ab]", ErrorKind.TOKEN),
    ("NC[a/n.x,]", ErrorKind.TOKEN),
    ("NC[a/n.x.y]", ErrorKind.TOKEN),
    ("SFC@Subj[သည်/sf]", ErrorKind.SFC_TAG),
    ("NC[a/n.x]။ extra", ErrorKind.BRACKET),
])
def test_error_kinds(line, kind):
    with pytest.raises(CorpusFormatError) as exc:
        parse_sentence_line(line)
    assert exc.value.kind is kind


def test_error_offset_is_in_bytes():
    # "မမ" is two 3-byte characters, so the bad tag starts at byte 3 + 6 + 2.
    with pytest.raises(CorpusFormatError) as exc:
        parse_sentence_line("NC[မမ/n.x]#NC@Zz[a/n.x]")
    assert exc.value.kind is ErrorKind.FUNCTION_TAG
    assert exc.value.offset == len("NC[မမ/n.x]#NC@".encode())


def test_whitespace_and_crlf_ignored():
    a = parse_sentence_line(" NC @ Subj [ a / n.x , b/part.y ] # VC[c/v.common] ။\r\n")
    b = parse_sentence_line("NC@Subj[a/n.x,b/part.y]#VC[c/v.common]။")
    assert a == b


def test_nfc_normalization():
    decomposed = "NC[é/n.x]"
    assert parse_sentence_line(decomposed).chunks[0].tokens[0].surface == "é"


def test_serialize_fig1():
    line = "VC@Active[မိုးရွာ/verb.common]#SFC@Null[သည်/sf]။"
    assert serialize_sentence(parse_sentence_line(line)) == line


def test_serialize_untagged_unterminated():
    s = AnnotatedSentence((Chunk(ChunkType.NC, (Token("သူ", PosFeature("pron", "person")),)),), False)
    assert serialize_sentence(s) == "NC[သူ/pron.person]"


def test_round_trip_random_sentences():
    rng = random.Random(7)
    for _ in range(20):
        s = random_sentence(rng)
        assert parse_sentence_line(serialize_sentence(s)) == s


@settings(max_examples=60)
@given(st.randoms(use_true_random=False))
def test_round_trip_property(rng):
    s = random_sentence(rng)
    assert parse_sentence_line(serialize_sentence(s)) == s


def test_pos_feature_render_parse():
    for text in ["n.person", "sf", "ppm.use"]:
        assert str(PosFeature.parse(text)) == text
    with pytest.raises(ValueError):
        PosFeature("", "x")
    with pytest.raises(ValueError):
        PosFeature("n", "")


@pytest.mark.parametrize("line, expected", [
    ("NC[ခွေး/n.animals,တစ်/part.number,ကောင်/part.type]", PosFeature("n", "animals")),
    ("NC[ဆောင်းရာသီ/n.time,သီးနှံပင်/n.food,များ/part.number]", PosFeature("n", "food")),
    ("VC[ကူညီ/v.common]", PosFeature("v", "common")),
    ("VC[ရွေးချယ်/v.common,ခဲ့/part.support]", PosFeature("v", "common")),
    ("NC[သူ/pron.person,တို့/part.number]", PosFeature("pron", "person")),
    ("PPC[အဖြစ်/part.eg]", PosFeature("part", "eg")),  # no ppm: first token
])
def test_head_feature(line, expected):
    (c,) = parse_sentence_line(line).chunks
    assert head_feature(c) == expected


def test_head_feature_total_and_member():
    rng = random.Random(3)
    for _ in range(200):
        for c in random_sentence(rng).chunks:
            f = head_feature(c)
            assert f == head_feature(c)
            assert f in [t.feature for t in c.tokens]


def test_load_corpus_skips_blank_and_comment_lines():
    text = "NC@Subj[a/n.x]\n\n% comment\nVC@Active[b/v.common]\n"
    c = load_corpus(io.StringIO(text))
    assert len(c) == 2 and c.line_numbers == [1, 4]


def test_load_corpus_three_lines_one_blank():
    c = load_corpus(io.StringIO("NC@Subj[a/n.x]\n\nVC@Active[b/v.common]\n"))
    assert c.line_numbers == [1, 3]


def test_load_corpus_collects_errors():
    text = "NC@Subj[a/n.x]\nNC@Bogus[a/n.x]\nVC@Active[b/v.common]\n"
    c = load_corpus(io.StringIO(text), strict=False)
    assert len(c) == 2
    assert [e.line_no for e in c.errors] == [2]
    assert c.errors[0].kind is ErrorKind.FUNCTION_TAG
    with pytest.raises(CorpusFormatError) as exc:
        load_corpus(io.StringIO(text), strict=True)
    assert exc.value.line_no == 2


def test_load_corpus_never_loses_lines():
    rng = random.Random(11)
    lines = []
    for i in range(60):
        line = serialize_sentence(random_sentence(rng))
        if i % 4 == 0:
            line = line.replace("[", "[@", 1)
        lines.append(line)
    c = load_corpus(io.StringIO("\n".join(lines)), strict=False)
    assert len(c.sentences) + len(c.errors) == 60
    assert len(c.errors) == 15


def test_sample_corpus_stats(sample_corpus):
    # Hand count of chunks per line: 10 8 6 7 9 8 8 6 6 6.
    assert len(sample_corpus) == 10
    assert sample_corpus.stats.chunks == 74
    assert sum(sample_corpus.stats.tags.values()) == 74
    assert sample_corpus.stats.tags["Null"] == 10
    assert all(s.fully_tagged for s in sample_corpus)


def test_stats_text_schema(sample_corpus):
    text = sample_corpus.stats.to_text()
    lines = text.splitlines()
    assert lines[0] == "sentences\t10" and lines[1] == "chunks\t74"
    assert "tag.PSubj\t9" in lines
    assert all(len(l.split("\t")) == 2 for l in lines)
