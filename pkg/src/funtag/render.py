"""Tree renderings: indented ascii, JSON, and Graphviz dot.

JSON node schema::

    {"symbol": "Subj", "kind": "nonterminal", "span": [0, 2], "children": [...]}

Terminal nodes have ``"kind": "terminal"`` and no children.
"""

from __future__ import annotations

import json
from typing import Any

from .grammar import Kind, Symbol
from .parser import ParseTree

FORMATS = ("ascii", "json", "dot")


def to_ascii(tree: ParseTree) -> str:
    lines = [str(tree.node)]

    def walk(t: ParseTree, prefix: str):
        for k, c in enumerate(t.children):
            last = k == len(t.children) - 1
            lines.append(f"{prefix}{'└── ' if last else '├── '}{c.node}")
            walk(c, prefix + ("    " if last else "│   "))

    walk(tree, "")
    return "\n".join(lines)


def tree_to_dict(tree: ParseTree) -> dict[str, Any]:
    d = {"symbol": tree.node.name, "kind": tree.node.kind.value, "span": list(tree.span)}
    if tree.children:
        d["children"] = [tree_to_dict(c) for c in tree.children]
    return d


def tree_from_dict(d: dict[str, Any]) -> ParseTree:
    try:
        sym = Symbol(d["symbol"], Kind(d["kind"]))
        start, end = d["span"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"not a tree node: {d!r}") from exc
    kids = tuple(tree_from_dict(c) for c in d.get("children", ()))
    return ParseTree(sym, kids, (int(start), int(end)))


def to_json(tree: ParseTree) -> str:
    return json.dumps(tree_to_dict(tree), ensure_ascii=False)


def from_json(text: str) -> ParseTree:
    return tree_from_dict(json.loads(text))


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def to_dot(tree: ParseTree, name: str = "parse") -> str:
    """One dot node per tree node; terminals are drawn as boxes."""
    lines = [f'digraph "{_dot_escape(name)}" {{', "  node [fontname=Helvetica];"]
    counter = 0

    def walk(t: ParseTree) -> str:
        nonlocal counter
        nid = f"n{counter}"
        counter += 1
        shape = "box" if t.node.is_terminal else "ellipse"
        lines.append(f'  {nid} [label="{_dot_escape(t.node.name)}", shape={shape}];')
        for c in t.children:
            cid = walk(c)
            lines.append(f"  {nid} -> {cid};")
        return nid

    walk(tree)
    lines.append("}")
    return "\n".join(lines) + "\n"


def render(tree: ParseTree, fmt: str = "ascii") -> str:
    if fmt == "ascii":
        return to_ascii(tree)
    if fmt == "json":
        return to_json(tree)
    if fmt == "dot":
        return to_dot(tree)
    raise ValueError(f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}")
