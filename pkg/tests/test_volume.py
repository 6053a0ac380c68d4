import math
from fractions import Fraction

import pytest

from triangular_lsd.errors import DomainError, ResourceLimitError
from triangular_lsd.patterns import LinkPattern
from triangular_lsd.volume import (
    ZERO,
    PuValue,
    count_circuits,
    extrapolate,
    g_closed_form,
    g_polynomial,
    g_recursive,
    grid_count_hankel,
    grid_count_wigner,
    hankel_forms,
    pu_estimate,
    pu_exact_wigner,
    pu_grid_hankel,
    pu_grid_wigner,
    qw_polynomial,
    richardson,
    verify_appendix,
)
from triangular_lsd.words import Word, enumerate_catalan


def w(text):
    return Word.parse(text)


def test_qw_of_single_pair():
    assert qw_polynomial(w("aa")).coefficients == (Fraction(1), Fraction(-1))


@pytest.mark.parametrize("word, expected", [
    ("aa", Fraction(1, 2)),
    ("aabb", Fraction(1, 3)),
    ("abba", Fraction(1, 3)),
    ("aabbcc", Fraction(1, 4)),
    ("abbcca", Fraction(1, 4)),
    ("aabccb", Fraction(5, 24)),
    ("abbacc", Fraction(5, 24)),
    ("abccba", Fraction(5, 24)),
])
def test_exact_wigner_table(word, expected):
    assert pu_exact_wigner(w(word)) == expected


@pytest.mark.parametrize("k", range(1, 7))
def test_catalan_sum_is_closed_moment(k):
    total = sum(pu_exact_wigner(word) for word in enumerate_catalan(k))
    assert total == Fraction(k ** k, math.factorial(k + 1))


def test_non_catalan_word_is_domain_error():
    with pytest.raises(DomainError):
        pu_exact_wigner(w("abab"))


@pytest.mark.parametrize("n", range(0, 8))
def test_generating_polynomial_identities(n):
    assert g_polynomial(n) == g_closed_form(n) == g_recursive(n)


def test_generating_polynomial_rejects_negative():
    with pytest.raises(ValueError):
        g_closed_form(-1)


@pytest.mark.parametrize("n", [1, 5, 12])
def test_wigner_counts_exact(n):
    assert count_circuits(LinkPattern.WIGNER, w("aa"), n) == n * (n + 1) // 2
    expected = n * (n + 1) * (2 * n + 1) // 6
    assert count_circuits(LinkPattern.WIGNER, w("abba"), n) == expected
    assert count_circuits(LinkPattern.WIGNER, w("aabb"), n) == expected


@pytest.mark.parametrize("pattern", [LinkPattern.TOEPLITZ, LinkPattern.SYMMETRIC_CIRCULANT])
def test_single_pair_counts(pattern):
    assert count_circuits(pattern, w("aa"), 9) == 45


def test_full_matrix_counts_exceed_triangular():
    full = count_circuits(LinkPattern.HANKEL, w("aa"), 10, triangular=False)
    tri = count_circuits(LinkPattern.HANKEL, w("aa"), 10)
    assert full == 100
    assert tri == 55


def test_crossing_word_decays():
    ratios = [count_circuits(LinkPattern.WIGNER, w("abab"), n) / n ** 3 for n in (10, 20, 40)]
    assert ratios[0] > ratios[1] > ratios[2]
    assert ratios[2] < 0.1


def test_count_rejects_unmatched_word():
    with pytest.raises(DomainError):
        count_circuits(LinkPattern.WIGNER, Word((1, 2, 1, 3)), 5)


def test_count_caps():
    with pytest.raises(ResourceLimitError):
        count_circuits(LinkPattern.WIGNER, w("aabbccddee"), 3)
    with pytest.raises(ResourceLimitError):
        count_circuits(LinkPattern.WIGNER, w("abba"), 50, work_cap=1000)


def test_count_workers_do_not_change_result():
    serial = count_circuits(LinkPattern.TOEPLITZ, w("abab"), 15, workers=1)
    threaded = count_circuits(LinkPattern.TOEPLITZ, w("abab"), 15, workers=4)
    assert serial == threaded


def test_richardson_removes_first_order_term():
    sizes = [10, 20, 40]
    values = [0.25 + 3.0 / n for n in sizes]
    assert richardson(sizes, values) == pytest.approx([0.25, 0.25])
    estimate, error_bar = extrapolate(sizes, values)
    assert estimate == pytest.approx(0.25)
    assert error_bar == pytest.approx(3.0 / 40)


def test_extrapolate_input_checks():
    with pytest.raises(ValueError):
        extrapolate([10, 20], [1.0, 1.0])
    with pytest.raises(ValueError):
        extrapolate([10, 10, 20], [1.0, 1.0, 1.0])


def test_estimate_brackets_exact_value():
    value = pu_estimate(LinkPattern.WIGNER, w("abba"), (20, 40, 80))
    assert not value.is_exact
    assert value.n_list == (20, 40, 80)
    assert abs(value.estimate - 1.0 / 3.0) <= value.error_bar


def test_toeplitz_single_pair_estimate():
    value = pu_estimate(LinkPattern.TOEPLITZ, w("aa"), (10, 20, 40))
    assert value.estimate == pytest.approx(0.5)


def test_estimate_needs_three_sizes():
    with pytest.raises(ValueError):
        pu_estimate(LinkPattern.WIGNER, w("aa"), (10, 20))


def test_hankel_forms():
    closed = hankel_forms(w("abba"))
    assert closed.closure_identity
    assert closed.generating == (0, 1, 2)
    assert closed.forms[3] == (0, 1, 0)
    assert hankel_forms(w("aabb")).closure_identity
    assert not hankel_forms(w("abab")).closure_identity


@pytest.mark.parametrize("word", ["aa", "aabb", "abba", "aabbcc", "abccba", "abbcca"])
@pytest.mark.parametrize("n", [7, 12])
def test_wigner_grid_matches_circuit_count(word, n):
    assert grid_count_wigner(w(word), n) == count_circuits(LinkPattern.WIGNER, w(word), n)


@pytest.mark.parametrize("word", ["aa", "aabb", "abba"])
def test_hankel_grid_matches_circuit_count(word):
    assert grid_count_hankel(w(word), 8) == count_circuits(LinkPattern.HANKEL, w(word), 8)


def test_grid_values():
    assert pu_grid_wigner(w("aa"), 40).estimate == pytest.approx(0.5)
    assert pu_grid_hankel(w("aa"), 40).estimate == pytest.approx(0.5)
    assert pu_grid_hankel(w("aabb"), 80).estimate == pytest.approx(1.0 / 3.0, abs=1e-3)
    assert pu_grid_hankel(w("abab"), 40) == ZERO
    assert pu_grid_hankel(w("aa"), 40, triangular=False).estimate == pytest.approx(1.0)


@pytest.mark.parametrize("word", ["aa", "aabb", "abba"])
def test_hankel_grid_agrees_with_circuit_estimate(word):
    grid = pu_grid_hankel(w(word), 160)
    counted = pu_estimate(LinkPattern.HANKEL, w(word), (20, 40, 80))
    assert abs(grid.estimate - counted.estimate) <= grid.error_bar + counted.error_bar + 1e-9


def test_hankel_estimate_of_aabb():
    value = pu_estimate(LinkPattern.HANKEL, w("aabb"), (40, 80, 160))
    assert value.estimate == pytest.approx(1.0 / 3.0, abs=1e-3)
    assert value.error_bar <= 0.01


def test_grid_resolution_checks():
    with pytest.raises(ValueError):
        pu_grid_hankel(w("aa"), 10)
    with pytest.raises(ValueError):
        pu_grid_wigner(w("aa"), 4)


def test_grid_work_cap(monkeypatch):
    monkeypatch.setenv("TRILSD_MAX_WORK", "100")
    with pytest.raises(ResourceLimitError):
        grid_count_hankel(w("aabbcc"), 40)


def test_grid_workers_do_not_change_result():
    assert grid_count_hankel(w("abccba"), 20, workers=1) == grid_count_hankel(w("abccba"), 20, workers=3)


def test_pu_value_arithmetic_and_dict():
    total = PuValue.from_exact(Fraction(1, 3)) + PuValue.from_exact(Fraction(1, 6))
    assert total.is_exact
    assert total.to_dict() == {"mode": "exact", "value": "1/2"}
    mixed = total + PuValue.from_estimate(0.25, 0.01, [10, 20, 40])
    assert not mixed.is_exact
    assert mixed.value == pytest.approx(0.75)
    data = mixed.to_dict()
    assert data["mode"] == "estimated"
    assert data["n_list"] == [10, 20, 40]
    assert data["error_bar"] == pytest.approx(0.01)


def test_appendix_checks_pass():
    report = verify_appendix(4)
    assert report.passed
    names = [c.name for c in report.clauses]
    assert names == ["a", "b", "c", "d", "e"]
    assert all(c.checked > 0 for c in report.clauses)
    assert report.to_dict()["passed"] is True


def test_appendix_range():
    with pytest.raises(ValueError):
        verify_appendix(7)
    with pytest.raises(ValueError):
        verify_appendix(0)
