import io
import random

import pytest

from conftest import random_tree
from oracles import bag_distance, naive_pqgram_bag
from patientmetrics.pqgram import (
    PQParams,
    ReservedLabelError,
    extend_tree,
    pqgram_distance,
    pqgram_distance_norm,
    pqgram_profile,
)
from patientmetrics.tree import parse_tree as T, serialize_tree


def test_extend_single_node():
    assert serialize_tree(extend_tree(T("{a}"), PQParams(1, 1))) == "{a{*}}"


def test_extend_p2_q2():
    ext = extend_tree(T("{a{b}}"), PQParams(2, 2))
    assert serialize_tree(ext) == "{*{a{*}{b{*}{*}}{*}}}"


def test_extend_p1_adds_no_ancestors():
    rng = random.Random(0)
    for _ in range(20):
        t = random_tree(rng, 8)
        assert extend_tree(t, PQParams(1, rng.randint(1, 3))).label == t.label


def test_reserved_label():
    with pytest.raises(ReservedLabelError):
        pqgram_profile(T("{a{*}}"), PQParams(1, 1))
    with pytest.raises(ReservedLabelError):
        extend_tree(T("{*}"), PQParams(1, 1))


@pytest.mark.parametrize("bad", [(0, 1), (1, 0), (1.5, 2)])
def test_params_validated(bad):
    with pytest.raises(ValueError):
        PQParams(*bad)


def test_profile_examples():
    assert pqgram_profile(T("{a}"), PQParams(1, 1)).grams == {("a", "*"): 1}
    prof = pqgram_profile(T("{a{b}{c}}"), PQParams(1, 1))
    assert prof.grams == {("a", "b"): 1, ("a", "c"): 1, ("b", "*"): 1, ("c", "*"): 1}
    assert pqgram_profile(T("{a{b}{c}}"), PQParams(1, 1)) == prof


def test_profile_from_figure_shape():
    # a stem (*, root) with base (*, *, first child), as for p=2, q=3
    prof = pqgram_profile(T("{a6706022p{1}{2}}"), PQParams(2, 3))
    assert prof.grams[("*", "a6706022p", "*", "*", "1")] == 1


@pytest.mark.parametrize(
    "t1, t2, dist, norm",
    [
        ("{a{b}}", "{a{c}}", 4, 1.0),
        ("{a{b}{c}}", "{a{b}{d}}", 4, 4 / 6),
        ("{a{b}{c}}", "{a{b}{c}}", 0, 0.0),
    ],
)
def test_distance_examples(t1, t2, dist, norm):
    p = PQParams(1, 1)
    assert pqgram_distance(T(t1), T(t2), p) == dist
    assert pqgram_distance_norm(T(t1), T(t2), p) == pytest.approx(norm, abs=1e-12)


def test_matches_naive_enumeration():
    rng = random.Random(7)
    for _ in range(150):
        t = random_tree(rng, 30, alphabet="abcd")
        p, q = rng.randint(1, 3), rng.randint(1, 3)
        assert pqgram_profile(t, PQParams(p, q)).grams == naive_pqgram_bag(t, p, q)


def test_properties_on_random_pairs():
    rng = random.Random(11)
    for _ in range(300):
        a, b = random_tree(rng, 15), random_tree(rng, 15)
        params = PQParams(rng.randint(1, 3), rng.randint(1, 3))
        d = pqgram_distance(a, b, params)
        assert d == pqgram_distance(b, a, params) >= 0
        assert pqgram_distance(a, a, params) == 0
        assert 0.0 <= pqgram_distance_norm(a, b, params) <= 1.0
        na, nb = len(pqgram_profile(a, params)), len(pqgram_profile(b, params))
        if na % 2 == nb % 2:
            assert d % 2 == 0
        assert d == bag_distance(naive_pqgram_bag(a, params.p, params.q),
                                 naive_pqgram_bag(b, params.p, params.q))


def test_every_node_is_anchored():
    rng = random.Random(5)
    for _ in range(50):
        t = random_tree(rng, 20, alphabet="abcdefgh")
        params = PQParams(rng.randint(1, 3), rng.randint(1, 3))
        seen = {label for gram in pqgram_profile(t, params).grams for label in gram}
        assert set(t.labels()) <= seen


def test_profile_csv():
    buf = io.StringIO()
    pqgram_profile(T("{a{b}{b}}"), PQParams(1, 1)).write_csv(buf)
    assert buf.getvalue() == "label_1,label_2,multiplicity\na,b,2\nb,*,2\n"
