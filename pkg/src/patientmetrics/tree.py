"""Ordered labeled trees and their bracket-notation serialization.

A tree is written as ``{label child child ...}``, e.g. ``{a{b}{c}}`` is a root
``a`` with the ordered children ``b`` and ``c``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator


class TreeParseError(ValueError):
    """Malformed bracket notation; ``offset`` is the byte position of the fault."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.reason = message
        self.offset = offset


@dataclass(frozen=True)
class LabeledTree:
    label: str
    children: tuple[LabeledTree, ...] = field(default=())

    def __post_init__(self):
        if not isinstance(self.children, tuple):
            object.__setattr__(self, "children", tuple(self.children))
        if not self.label or self.label != self.label.strip():
            raise ValueError(f"invalid label {self.label!r}")
        if "{" in self.label or "}" in self.label:
            raise ValueError(f"label may not contain braces: {self.label!r}")

    def __str__(self) -> str:
        return serialize_tree(self)

    def iter_preorder(self) -> Iterator[LabeledTree]:
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def labels(self) -> list[str]:
        return [n.label for n in self.iter_preorder()]


def parse_tree(text: str) -> LabeledTree:
    """Parse one tree in bracket notation.

    Surrounding whitespace is ignored; anything else after the closing brace
    of the root is an error.
    """
    pos = 0
    n = len(text)

    def fail(message: str, at: int) -> TreeParseError:
        return TreeParseError(message, len(text[:at].encode("utf-8")))

    def skip_ws(i: int) -> int:
        while i < n and text[i].isspace():
            i += 1
        return i

    pos = skip_ws(pos)
    if pos >= n or text[pos] != "{":
        raise fail("expected '{'", pos)

    # iterative to survive deep trees; each frame is [label, children]
    stack: list[tuple[str, list[LabeledTree]]] = []
    root = None
    while True:
        pos = skip_ws(pos)
        if pos >= n:
            raise fail("unbalanced braces: unexpected end of input", pos)
        ch = text[pos]
        if ch == "{":
            start = pos + 1
            end = start
            while end < n and text[end] not in "{}":
                end += 1
            label = text[start:end].strip()
            if not label:
                raise fail("empty label", start)
            stack.append((label, []))
            pos = end
        elif ch == "}":
            if not stack:
                raise fail("unmatched '}'", pos)
            label, kids = stack.pop()
            node = LabeledTree(label, tuple(kids))
            pos += 1
            if stack:
                stack[-1][1].append(node)
            else:
                root = node
                break
        else:
            raise fail(f"unexpected character {ch!r}", pos)

    pos = skip_ws(pos)
    if pos != n:
        raise fail("trailing garbage", pos)
    return root


def serialize_tree(tree: LabeledTree) -> str:
    out: list[str] = []
    # (node, closing) pairs, so no recursion limit on deep trees
    stack: list[tuple[LabeledTree, bool]] = [(tree, False)]
    while stack:
        node, closing = stack.pop()
        if closing:
            out.append("}")
            continue
        out.append("{" + node.label)
        stack.append((node, True))
        for child in reversed(node.children):
            stack.append((child, False))
    return "".join(out)


def tree_size(tree: LabeledTree) -> int:
    return sum(1 for _ in tree.iter_preorder())


def read_trees(path: str | Path) -> list[LabeledTree]:
    """Read a ``.trees`` file: one tree per line, blank lines skipped."""
    trees = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                trees.append(parse_tree(line))
            except TreeParseError as exc:
                raise TreeParseError(f"line {lineno}: {exc.reason}", exc.offset) from None
    return trees


def write_trees(path: str | Path, trees: Iterable[LabeledTree]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for t in trees:
            fh.write(serialize_tree(t) + "\n")
