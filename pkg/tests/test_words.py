import math

import pytest

from triangular_lsd.errors import DomainError, ResourceLimitError
from triangular_lsd.words import (
    Word,
    balanced_prefixes,
    catalan_split,
    classify,
    enumerate_catalan,
    enumerate_class,
    enumerate_pair_matched,
    enumerate_symmetric,
    generating_vertices,
    partners,
    phi_map,
    rotate,
)


def w(text):
    return Word.parse(text)


def test_parse_forms_agree():
    assert w("abba") == w("1,2,2,1") == w("BAAB")
    assert str(w("1,2,2,1")) == "abba"


def test_non_canonical_word_rejected():
    with pytest.raises(ValueError):
        Word((2, 1, 1, 2))


@pytest.mark.parametrize("k, expected", [(1, 1), (2, 3), (3, 15), (4, 105), (5, 945)])
def test_pair_matched_count(k, expected):
    words = enumerate_pair_matched(k)
    assert len(words) == expected
    assert len(set(words)) == expected


@pytest.mark.parametrize("k, expected", [(1, 1), (2, 2), (3, 5), (4, 14), (5, 42)])
def test_catalan_count(k, expected):
    assert len(enumerate_catalan(k)) == expected


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_symmetric_count(k):
    assert len(enumerate_symmetric(k)) == math.factorial(k)


def test_catalan_words_length_six():
    assert [str(x) for x in enumerate_catalan(3)] == ["aabbcc", "aabccb", "abbacc", "abbcca", "abccba"]


def test_enumeration_caps():
    with pytest.raises(ResourceLimitError):
        enumerate_pair_matched(9)
    with pytest.raises(ResourceLimitError):
        enumerate_catalan(11)


def test_classify():
    c = classify(w("abab"))
    assert c.pair_matched and not c.catalan and not c.symmetric
    c = classify(w("abba"))
    assert c.pair_matched and c.catalan and c.symmetric
    c = classify(w("aab"))
    assert not c.pair_matched


def test_catalan_words_are_symmetric():
    for k in range(1, 5):
        assert all(classify(x).symmetric for x in enumerate_catalan(k))


def test_generating_vertices_and_partners():
    assert generating_vertices(w("abba")) == (0, 1, 2)
    assert generating_vertices(w("aabb")) == (0, 1, 3)
    assert partners(w("abba")) == {3: 2, 4: 1}


def test_phi_map():
    assert phi_map(w("abba")).phi == (0, 1, 2, 1, 0)
    assert phi_map(w("aabb")).phi == (0, 1, 0, 3, 0)
    with pytest.raises(DomainError):
        phi_map(w("abab"))


def test_rotate():
    assert rotate(w("abba"), 1) == w("aabb")
    assert rotate(w("abbacc"), 0) == w("abbacc")
    assert rotate(w("abbacc"), 6) == w("abbacc")
    assert classify(rotate(w("abccba"), 2)).catalan


def test_catalan_split_and_prefixes():
    assert catalan_split(w("abbacc")) == ((2, 2), (3, 3))
    assert catalan_split(w("aabb")) == ((), (2, 2))
    assert balanced_prefixes((1, 1, 2, 2)) == [0, 2, 4]
    assert balanced_prefixes((1, 2, 2, 1)) == [0, 4]


@pytest.mark.parametrize("word_class, count", [("all", 15), ("pair", 15), ("catalan", 5), ("symmetric", 6)])
def test_enumerate_class(word_class, count):
    assert len(enumerate_class(word_class, 3)) == count


def test_enumerate_class_rejects_unknown():
    with pytest.raises(ValueError):
        enumerate_class("pair-matched", 2)
