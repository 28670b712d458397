"""Command-line interface: funtag train|tag|parse|eval|render.

Exit codes: 0 ok, 1 input error, 2 parse rejections present.
Every option can also be set through an environment variable named
``FUNTAG_<OPTION>`` (e.g. ``FUNTAG_ALPHA=1``); command-line flags win.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .corpus import CorpusFormatError, iter_lines, load_corpus, parse_sentence_line
from .evaluation import Correctness, evaluate
from .grammar import GrammarError, default_grammar, load_grammar
from .model import ModelError, load_model, save_model, train
from .parser import DEFAULT_CAP, derivation, parse
from .render import render, tree_from_dict, tree_to_dict
from .tagger import DecodeMode, tag_sentence

log = logging.getLogger("funtag")

EXIT_OK, EXIT_INPUT, EXIT_REJECT = 0, 1, 2
ENV_PREFIX = "FUNTAG_"

FORMATS_HELP = """\
file formats:
  corpus   one sentence per line, UTF-8; '%' lines are comments
             TYPE[@TAG][surface/pos.category,...]#...။
           TYPE is NC PPC AC RC CC SFC VC; TAG is a function tag or Null.
  model    text, first line 'funtag-model v1', then tab-separated sections
             [params] [counts.tag_feat] [counts.feat] [counts.next_tag]
             [counts.tag] [prior] [transition] [checksum]
  grammar  one rule set per line, '#' comments
             LHS -> sym sym | sym ...      terminals quoted: 'PSubj'
"""


@dataclass
class Config:
    model: Optional[str] = None
    grammar: Optional[str] = None
    alpha: Optional[float] = None  # None: 0 for training, the stored value otherwise
    epsilon: Optional[float] = None  # None: 1e-9 for training, the stored value otherwise
    decode: str = "greedy"
    cap: int = DEFAULT_CAP
    correct: str = "match"
    strict: bool = True
    format: str = "text"

    def validate(self):
        if self.alpha is not None and self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if self.epsilon is not None and not self.epsilon > 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if self.cap < 1:
            raise ValueError(f"cap must be >= 1, got {self.cap}")
        DecodeMode(self.decode)
        Correctness(self.correct)
        if self.format not in ("text", "json"):
            raise ValueError(f"format must be text or json, got {self.format!r}")


def _env(name, default, conv=str):
    raw = os.environ.get(ENV_PREFIX + name.upper())
    if raw is None:
        return default
    if conv is bool:
        return raw.strip().lower() in ("1", "true", "yes", "on")
    return conv(raw)


def _open_in(path: str):
    if path == "-":
        return sys.stdin
    return open(path, encoding="utf-8", newline="")


def _grammar(cfg: Config):
    if cfg.grammar:
        return load_grammar(Path(cfg.grammar).read_text(encoding="utf-8"))
    return default_grammar()


def _model(cfg: Config):
    if not cfg.model:
        raise ValueError("--model is required")
    m = load_model(Path(cfg.model).read_bytes())
    if cfg.alpha is None and cfg.epsilon is None:
        return m
    return m.with_params(cfg.alpha, cfg.epsilon)


def cmd_train(args, cfg: Config) -> int:
    with _open_in(args.corpus) as f:
        try:
            corpus = load_corpus(f, strict=cfg.strict)
        except CorpusFormatError as exc:
            log.error("%s: %s", args.corpus, exc)
            return EXIT_INPUT
    if not corpus.sentences:
        log.error("empty corpus")
        return EXIT_INPUT
    try:
        m = train(corpus, cfg.alpha or 0.0, cfg.epsilon or 1e-9)
    except ModelError as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    Path(args.output).write_bytes(save_model(m))
    sys.stdout.write(corpus.stats.to_text())
    return EXIT_OK


def cmd_tag(args, cfg: Config) -> int:
    m = _model(cfg)
    with _open_in(args.input) as f:
        for no, line in iter_lines(f):
            try:
                tagged = tag_sentence(m, parse_sentence_line(line), cfg.decode)
            except (CorpusFormatError, ValueError) as exc:
                log.error("line %d: %s", no, exc)
                if cfg.strict:
                    return EXIT_INPUT
                continue
            print(tagged.dumps() if cfg.format == "json" else tagged.to_text())
    return EXIT_OK


def read_tag_line(line: str) -> list[str]:
    """Tags from a tagged line (``PSubj[..]#SubjP[..]။``) or a bare ``PSubj SubjP`` list."""
    if "[" in line:
        tags = []
        for part in line.strip().rstrip("။").split("#"):
            name = part.split("[", 1)[0].strip()
            if not part.strip() or "[" not in part:
                raise ValueError(f"malformed tagged chunk {part!r}")
            tags.append(name)
        return tags
    return line.split()


def cmd_parse(args, cfg: Config) -> int:
    g = _grammar(cfg)
    status = EXIT_OK
    with _open_in(args.input) as f:
        for no, line in iter_lines(f):
            try:
                tags = read_tag_line(line)
                result = parse(g, tags, cfg.cap)
            except ValueError as exc:
                log.error("line %d: %s", no, exc)
                if cfg.strict:
                    return EXIT_INPUT
                continue
            if not result:
                status = EXIT_REJECT
            if cfg.format == "json":
                obj = {"line": no, "tags": tags, "status": "accept" if result else "reject",
                       "trees": [tree_to_dict(t) for t in result], "truncated": result.truncated}
                if not result:
                    obj["prefix"] = result.prefix
                print(json.dumps(obj, ensure_ascii=False))
                continue
            if not result:
                print(f"REJECT\tprefix={result.prefix}\t{' '.join(tags)}")
                continue
            more = " (truncated)" if result.truncated else ""
            print(f"ACCEPT\t{len(result)} tree(s){more}\t{' '.join(tags)}")
            for tree in result:
                print(render(tree, args.tree_format))
                if args.derivation:
                    for st in derivation(tree):
                        print(f"  [{st.rule_applied}]")
    return status


def cmd_eval(args, cfg: Config) -> int:
    m = _model(cfg)
    g = _grammar(cfg)
    with _open_in(args.gold) as f:
        try:
            gold = load_corpus(f, strict=cfg.strict)
            report = evaluate(m, g, gold, cfg.decode, cfg.correct)
        except (CorpusFormatError, ValueError) as exc:
            log.error("%s: %s", args.gold, exc)
            return EXIT_INPUT
    sys.stdout.write(report.dumps() + "\n" if cfg.format == "json" else report.to_text())
    return EXIT_OK


def _trees_in(obj):
    if "symbol" in obj:
        yield tree_from_dict(obj)
    else:
        for t in obj.get("trees", ()):
            yield tree_from_dict(t)


def cmd_render(args, cfg: Config) -> int:
    with _open_in(args.input) as f:
        for no, line in iter_lines(f):
            try:
                trees = list(_trees_in(json.loads(line)))
            except ValueError as exc:
                log.error("line %d: %s", no, exc)
                if cfg.strict:
                    return EXIT_INPUT
                continue
            for tree in trees:
                print(render(tree, args.tree_format))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", default=_env("model", None), help="model file")
    common.add_argument("--grammar", default=_env("grammar", None), help="grammar file (default: built-in)")
    common.add_argument("--alpha", type=float, default=_env("alpha", None, float),
                        help="add-alpha smoothing (train default 0, i.e. relative frequencies; "
                             "overrides the stored value elsewhere)")
    common.add_argument("--epsilon", type=float, default=_env("epsilon", None, float),
                        help="probability floor for unseen transitions and features (default 1e-9)")
    common.add_argument("--decode", choices=[m.value for m in DecodeMode],
                        default=_env("decode", "greedy"))
    common.add_argument("--cap", type=int, default=_env("cap", DEFAULT_CAP, int),
                        help="maximum parse trees reported per sentence")
    common.add_argument("--correct", choices=[c.value for c in Correctness],
                        default=_env("correct", "match"),
                        help="eval: 'match' needs gold tags and acceptance, 'accept' only acceptance")
    common.add_argument("--strict", action=argparse.BooleanOptionalAction,
                        default=_env("strict", True, bool), help="stop at the first malformed input line")
    common.add_argument("--format", choices=["text", "json"], default=_env("format", "text"))
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="funtag", description=__doc__.splitlines()[0],
                                 epilog=FORMATS_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", parents=[common], help="count tables from an annotated corpus",
                       epilog=FORMATS_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("corpus")
    p.add_argument("-o", "--output", required=True, help="model file to write")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("tag", parents=[common], help="assign function tags to chunked sentences",
                       epilog=FORMATS_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("input", nargs="?", default="-")
    p.set_defaults(func=cmd_tag)

    tree_formats = ["ascii", "json", "dot"]
    p = sub.add_parser("parse", parents=[common], help="parse tagged lines or tag sequences",
                       epilog=FORMATS_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("--tree-format", choices=tree_formats, default="ascii")
    p.add_argument("--derivation", action="store_true", help="print the leftmost derivation too")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("eval", parents=[common], help="precision/recall/F by sentence type",
                       epilog=FORMATS_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("gold")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("render", parents=[common], help="render JSON trees from 'parse --format json'")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("--tree-format", choices=tree_formats, default="ascii")
    p.set_defaults(func=cmd_render)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("funtag: %(levelname)s: %(message)s"))
    log.addHandler(handler)
    log.setLevel(logging.INFO if args.verbose else logging.WARNING)
    cfg = Config(args.model, args.grammar, args.alpha, args.epsilon, args.decode, args.cap,
                 args.correct, args.strict, args.format)
    try:
        cfg.validate()
        return args.func(args, cfg)
    except (OSError, ValueError, GrammarError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    finally:
        log.removeHandler(handler)


if __name__ == "__main__":
    sys.exit(main())
