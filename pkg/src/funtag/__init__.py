"""Naive Bayes function tagging and CFG parsing for chunked Myanmar sentences."""

from .corpus import (AnnotatedSentence, Chunk, ChunkType, CorpusFormatError, FunctionTag,
                     PosFeature, Token, head_feature, load_corpus, parse_sentence_line,
                     serialize_sentence)
from .evaluation import EvalCounts, EvalReport, evaluate, metrics
from .grammar import Grammar, Production, Symbol, default_grammar, load_grammar
from .model import Model, load_model, save_model, train
from .parser import ParseTree, derivation, parse, recognize
from .tagger import TaggedSentence, tag_exact, tag_greedy

__version__ = "0.1.0"

__all__ = [
    "AnnotatedSentence", "Chunk", "ChunkType", "CorpusFormatError", "FunctionTag", "PosFeature",
    "Token", "head_feature", "load_corpus", "parse_sentence_line", "serialize_sentence",
    "EvalCounts", "EvalReport", "evaluate", "metrics",
    "Grammar", "Production", "Symbol", "default_grammar", "load_grammar",
    "Model", "load_model", "save_model", "train",
    "ParseTree", "derivation", "parse", "recognize",
    "TaggedSentence", "tag_exact", "tag_greedy",
]
