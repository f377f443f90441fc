import random

import pytest

from conftest import random_tree
from oracles import brute_force_ted
from patientmetrics.edit_distance import ted, ted_norm
from patientmetrics.tree import parse_tree as T, tree_size


@pytest.mark.parametrize(
    "a, b, expected",
    [
        ("{a{b}}", "{a{c}}", 1),
        ("{a}", "{a{b}}", 1),
        ("{a}", "{b}", 1),
        ("{a{b}{c}}", "{a{c}{b}}", 2),
        ("{f{d{a}{c{b}}}{e}}", "{f{c{d{a}{b}}}{e}}", 2),
        ("{a{b{c}}}", "{a{c}}", 1),
    ],
)
def test_examples(a, b, expected):
    assert ted(T(a), T(b)) == expected
    assert brute_force_ted(T(a), T(b)) == expected


def test_norm_examples():
    assert ted_norm(T("{a{b}}"), T("{a{b}}")) == 0
    assert ted_norm(T("{a{b}}"), T("{a{c}}")) == pytest.approx(0.25, abs=1e-12)
    assert ted_norm(T("{a}"), T("{b}")) == pytest.approx(0.5, abs=1e-12)


def test_root_may_be_relabeled():
    assert ted(T("{x{b}{c}}"), T("{y{b}{c}}")) == 1


def test_matches_brute_force():
    rng = random.Random(2)
    for _ in range(200):
        a, b = random_tree(rng, 6), random_tree(rng, 6)
        assert ted(a, b) == brute_force_ted(a, b), (a, b)


def test_bounds_and_symmetry():
    rng = random.Random(9)
    for _ in range(200):
        a, b = random_tree(rng, 12), random_tree(rng, 12)
        d = ted(a, b)
        assert d == ted(b, a)
        assert 0 <= d <= tree_size(a) + tree_size(b)
        assert (d == 0) == (a == b)
        assert 0 <= ted_norm(a, b) < 1
