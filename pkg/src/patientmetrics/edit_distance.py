"""Unit-cost ordered tree edit distance (Zhang-Shasha keyroot dynamic program)."""

from __future__ import annotations

from .tree import LabeledTree, tree_size

INSERT_COST = 1
DELETE_COST = 1
RELABEL_COST = 1


def _postorder(tree: LabeledTree):
    """Postorder labels, leftmost-leaf indices and sorted keyroots (1-based)."""
    labels: list = [None]
    leftmost = [0]
    # frame: [node, next child position, leftmost leaf of first child]
    frames = [[tree, 0, None]]
    while frames:
        frame = frames[-1]
        node, pos, first_lml = frame
        if pos < len(node.children):
            frame[1] += 1
            frames.append([node.children[pos], 0, None])
            continue
        frames.pop()
        labels.append(node.label)
        lml = first_lml if first_lml is not None else len(labels) - 1
        leftmost.append(lml)
        if frames and frames[-1][2] is None:
            frames[-1][2] = lml

    highest = {}
    for i in range(1, len(labels)):
        highest[leftmost[i]] = i
    return labels, leftmost, sorted(highest.values())


def ted(t1: LabeledTree, t2: LabeledTree) -> int:
    """Minimum number of node inserts, deletes and relabels turning t1 into t2."""
    lab1, l1, kr1 = _postorder(t1)
    lab2, l2, kr2 = _postorder(t2)
    n1, n2 = len(lab1) - 1, len(lab2) - 1
    td = [[0] * (n2 + 1) for _ in range(n1 + 1)]

    for i in kr1:
        for j in kr2:
            li, lj = l1[i], l2[j]
            ioff, joff = li - 1, lj - 1
            rows, cols = i - ioff + 1, j - joff + 1
            fd = [[0] * cols for _ in range(rows)]
            for x in range(1, rows):
                fd[x][0] = fd[x - 1][0] + DELETE_COST
            for y in range(1, cols):
                fd[0][y] = fd[0][y - 1] + INSERT_COST
            for x in range(1, rows):
                a = x + ioff
                la = l1[a]
                fx, fx1 = fd[x], fd[x - 1]
                for y in range(1, cols):
                    b = y + joff
                    if la == li and l2[b] == lj:
                        sub = 0 if lab1[a] == lab2[b] else RELABEL_COST
                        v = min(fx1[y] + DELETE_COST, fx[y - 1] + INSERT_COST, fx1[y - 1] + sub)
                        fx[y] = v
                        td[a][b] = v
                    else:
                        fx[y] = min(
                            fx1[y] + DELETE_COST,
                            fx[y - 1] + INSERT_COST,
                            fd[la - 1 - ioff][l2[b] - 1 - joff] + td[a][b],
                        )
    return td[n1][n2]


def ted_norm(t1: LabeledTree, t2: LabeledTree) -> float:
    """Edit distance divided by the combined node count of both trees."""
    return ted(t1, t2) / (tree_size(t1) + tree_size(t2))
