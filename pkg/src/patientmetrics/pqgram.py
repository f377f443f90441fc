"""pq-gram profiles and distances for ordered labeled trees.

A pq-gram pairs a stem (an anchor node plus its p-1 nearest ancestors) with a
base (q consecutive children of the anchor) in the tree extended by dummy
``*`` nodes. Two trees are compared through the bags of their pq-gram label
tuples.
"""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, TextIO

from .tree import LabeledTree

DUMMY = "*"


class ReservedLabelError(ValueError):
    pass


@dataclass(frozen=True)
class PQParams:
    p: int = 1
    q: int = 3

    def __post_init__(self):
        if int(self.p) != self.p or int(self.q) != self.q or self.p < 1 or self.q < 1:
            raise ValueError(f"p and q must be integers >= 1, got p={self.p}, q={self.q}")


@dataclass(frozen=True)
class PQGramProfile:
    grams: Counter
    p: int
    q: int

    def __len__(self) -> int:
        return sum(self.grams.values())

    def intersection_size(self, other: PQGramProfile) -> int:
        if (self.p, self.q) != (other.p, other.q):
            raise ValueError("profiles built with different (p, q)")
        small, large = sorted((self.grams, other.grams), key=len)
        return sum(min(c, large[g]) for g, c in small.items() if g in large)

    def union_size(self, other: PQGramProfile) -> int:
        return len(self) + len(other)

    def write_csv(self, fh: TextIO) -> None:
        """One row per distinct tuple, sorted, with its multiplicity."""
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"label_{i}" for i in range(1, self.p + self.q + 1)] + ["multiplicity"])
        for gram in sorted(self.grams):
            w.writerow(list(gram) + [self.grams[gram]])


def _check_labels(tree: LabeledTree) -> None:
    for node in tree.iter_preorder():
        if node.label == DUMMY:
            raise ReservedLabelError(f"tree contains the reserved dummy label {DUMMY!r}")


def extend_tree(tree: LabeledTree, params: PQParams) -> LabeledTree:
    """Return the (p, q)-extended tree with dummy nodes inserted."""
    _check_labels(tree)
    p, q = params.p, params.q

    def extend(node: LabeledTree) -> LabeledTree:
        if not node.children:
            kids = [LabeledTree(DUMMY)] * q
        else:
            pad = [LabeledTree(DUMMY)] * (q - 1)
            kids = pad + [extend(c) for c in node.children] + pad
        return LabeledTree(node.label, tuple(kids))

    out = extend(tree)
    for _ in range(p - 1):
        out = LabeledTree(DUMMY, (out,))
    return out


def pqgram_profile(tree: LabeledTree, params: PQParams) -> PQGramProfile:
    """Bag of all pq-gram label tuples of ``tree``.

    Walks the original tree once, padding stems and child windows with dummies
    on the fly rather than building the extended tree.
    """
    _check_labels(tree)
    p, q = params.p, params.q
    grams: Counter = Counter()
    pad = (DUMMY,) * (q - 1)
    stack = [(tree, (DUMMY,) * (p - 1))]
    while stack:
        node, ancestors = stack.pop()
        stem = (ancestors + (node.label,))[-p:]
        if not node.children:
            grams[stem + (DUMMY,) * q] += 1
            continue
        row = pad + tuple(c.label for c in node.children) + pad
        for i in range(len(row) - q + 1):
            grams[stem + row[i:i + q]] += 1
        child_anc = stem[1:] if p > 1 else ()
        stack.extend((c, child_anc) for c in node.children)
    return PQGramProfile(grams, p, q)


def profile_distance(a: PQGramProfile, b: PQGramProfile) -> int:
    return a.union_size(b) - 2 * a.intersection_size(b)


def profile_distance_norm(a: PQGramProfile, b: PQGramProfile) -> float:
    inter = a.intersection_size(b)
    denom = a.union_size(b) - inter
    if denom == 0:
        return 0.0
    return (a.union_size(b) - 2 * inter) / denom


def pqgram_distance(t1: LabeledTree, t2: LabeledTree, params: PQParams) -> int:
    return profile_distance(pqgram_profile(t1, params), pqgram_profile(t2, params))


def pqgram_distance_norm(t1: LabeledTree, t2: LabeledTree, params: PQParams) -> float:
    """Normalized pq-gram distance in [0, 1]; 0 for identical profiles."""
    return profile_distance_norm(pqgram_profile(t1, params), pqgram_profile(t2, params))


def profiles(trees: Iterable[LabeledTree], params: PQParams) -> list[PQGramProfile]:
    return [pqgram_profile(t, params) for t in trees]
