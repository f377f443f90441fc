"""Slow reference implementations the fast code paths are checked against.

Nothing here imports the code under test apart from the tree type.
"""

from collections import Counter

from patientmetrics.tree import LabeledTree


def naive_pqgram_bag(tree: LabeledTree, p: int, q: int) -> Counter:
    """Build the extended tree explicitly, then slide every stem/base window."""

    # node = [label, children, is_dummy]
    def copy(t):
        return [t.label, [copy(c) for c in t.children], False]

    def dummy():
        return ["*", [], True]

    def extend(node):
        label, kids, is_dummy = node
        if is_dummy:
            return
        if not kids:
            node[1] = [dummy() for _ in range(q)]
            return
        for c in kids:
            extend(c)
        node[1] = [dummy() for _ in range(q - 1)] + kids + [dummy() for _ in range(q - 1)]

    root = copy(tree)
    extend(root)
    for _ in range(p - 1):
        root = ["*", [root], True]

    bag = Counter()

    def visit(node, path):
        path = path + [node[0]]
        if not node[2] and len(path) >= p:
            stem = tuple(path[-p:])
            labels = [c[0] for c in node[1]]
            for i in range(len(labels) - q + 1):
                bag[stem + tuple(labels[i:i + q])] += 1
        for c in node[1]:
            visit(c, path)

    visit(root, [])
    return bag


def bag_distance(b1: Counter, b2: Counter) -> int:
    union = sum(b1.values()) + sum(b2.values())
    inter = sum((b1 & b2).values())
    return union - 2 * inter


def _postorder_with_ancestors(tree):
    labels, anc = [], []

    def walk(node, ancestors):
        for c in node.children:
            walk(c, ancestors + [node])
        labels.append(node.label)
        anc.append([id(a) for a in ancestors])
        ids.append(id(node))

    ids = []
    walk(tree, [])
    pos = {nid: i for i, nid in enumerate(ids)}
    ancestor_sets = [frozenset(pos[a] for a in al) for al in anc]
    return labels, ancestor_sets


def brute_force_ted(t1: LabeledTree, t2: LabeledTree) -> int:
    """Minimum unit cost over every valid edit mapping between t1 and t2.

    A mapping is valid when it is one-to-one and preserves both postorder and
    the ancestor relation; its cost is the unmapped nodes on both sides plus
    the mapped pairs whose labels differ.
    """
    lab1, anc1 = _postorder_with_ancestors(t1)
    lab2, anc2 = _postorder_with_ancestors(t2)
    n1, n2 = len(lab1), len(lab2)
    best = n1 + n2

    def search(i, min_j, pairs, relabels):
        nonlocal best
        if i == n1:
            m = len(pairs)
            best = min(best, n1 + n2 - 2 * m + relabels)
            return
        search(i + 1, min_j, pairs, relabels)
        for j in range(min_j, n2):
            # earlier-in-postorder nodes can only be descendants of i / j
            if all((i in anc1[a]) == (j in anc2[b]) for a, b in pairs):
                pairs.append((i, j))
                search(i + 1, j + 1, pairs, relabels + (lab1[i] != lab2[j]))
                pairs.pop()

    search(0, 0, [], 0)
    return best
