import random

import pytest
from hypothesis import given, strategies as st

from conftest import random_tree
from patientmetrics.tree import (
    LabeledTree,
    TreeParseError,
    parse_tree,
    read_trees,
    serialize_tree,
    tree_size,
    write_trees,
)


def test_parse_single_node():
    assert parse_tree("{a}") == LabeledTree("a")


def test_parse_keeps_child_order():
    t = parse_tree("{a{b}{c}}")
    assert [c.label for c in t.children] == ["b", "c"]


@pytest.mark.parametrize(
    "text, offset",
    [
        ("{a{b}", 5),
        ("{a}}", 3),
        ("{}", 1),
        ("{a} x", 4),
        ("a", 0),
        ("", 0),
    ],
)
def test_parse_errors_carry_offset(text, offset):
    with pytest.raises(TreeParseError) as err:
        parse_tree(text)
    assert err.value.offset == offset


def test_parse_offset_counts_bytes():
    with pytest.raises(TreeParseError) as err:
        parse_tree("{é}}")
    assert err.value.offset == 4


def test_labels_are_trimmed_and_case_sensitive():
    t = parse_tree("{ a { B } }")
    assert t == LabeledTree("a", (LabeledTree("B"),))
    assert t != parse_tree("{a{b}}")


def test_serialize():
    assert serialize_tree(LabeledTree("a")) == "{a}"
    assert serialize_tree(LabeledTree("a", (LabeledTree("b"), LabeledTree("c")))) == "{a{b}{c}}"
    assert serialize_tree(LabeledTree("a", (LabeledTree("c"), LabeledTree("b")))) == "{a{c}{b}}"


@pytest.mark.parametrize("text, size", [("{a}", 1), ("{a{b}{c}}", 3), ("{a{b{c}}}", 3)])
def test_tree_size(text, size):
    assert tree_size(parse_tree(text)) == size


@pytest.mark.parametrize("label", ["", " a", "a{", "}"])
def test_invalid_labels_rejected(label):
    with pytest.raises(ValueError):
        LabeledTree(label)


labels = st.text(alphabet="abcXYZ019:.@ ", min_size=1, max_size=5).map(str.strip).filter(bool)
trees = st.recursive(
    labels.map(LabeledTree),
    lambda kids: st.builds(LabeledTree, labels, st.lists(kids, max_size=4).map(tuple)),
    max_leaves=25,
)


@given(trees)
def test_round_trip(t):
    assert parse_tree(serialize_tree(t)) == t


@given(trees)
def test_size_is_structural(t):
    assert tree_size(t) == 1 + sum(tree_size(c) for c in t.children)


def test_deep_tree_does_not_recurse():
    t = LabeledTree("x")
    for _ in range(5000):
        t = LabeledTree("x", (t,))
    assert tree_size(parse_tree(serialize_tree(t))) == 5001


def test_trees_file(tmp_path):
    rng = random.Random(3)
    ts = [random_tree(rng, 10) for _ in range(20)]
    path = tmp_path / "x.trees"
    write_trees(path, ts)
    assert read_trees(path) == ts
    path.write_text("{a}\n\n{b{c}\n")
    with pytest.raises(TreeParseError, match="line 3"):
        read_trees(path)
