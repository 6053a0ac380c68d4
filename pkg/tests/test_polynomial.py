from fractions import Fraction

import pytest

from triangular_lsd.polynomial import RationalPolynomial

X = RationalPolynomial.x()


def test_normalization_and_zero():
    assert RationalPolynomial([1, 2, 0, 0]).coefficients == (Fraction(1), Fraction(2))
    assert RationalPolynomial([0, 0]).is_zero()
    assert RationalPolynomial().degree == -1


def test_arithmetic():
    one_plus_x = 1 + X
    assert one_plus_x ** 2 == RationalPolynomial([1, 2, 1])
    assert (one_plus_x * (1 - X)) == RationalPolynomial([1, 0, -1])
    assert (X - X).is_zero()
    assert RationalPolynomial([2, 4]) / 2 == RationalPolynomial([1, 2])
    assert RationalPolynomial.constant(3) == 3


def test_negative_power_rejected():
    with pytest.raises(ValueError):
        X ** -1


def test_compose():
    p = RationalPolynomial([0, 0, 1])
    assert p.compose(1 - X) == RationalPolynomial([1, -2, 1])


def test_antiderivative_and_integral():
    p = RationalPolynomial([1, 1])
    assert p.antiderivative() == RationalPolynomial([0, 1, Fraction(1, 2)])
    assert p.integrate() == Fraction(3, 2)
    assert (1 - X).integrate(0, 1) == Fraction(1, 2)


def test_evaluation():
    p = RationalPolynomial([1, Fraction(1, 3)])
    assert p(Fraction(3)) == 2
    assert isinstance(p(3), Fraction)
    assert p(0.5) == pytest.approx(1 + 1 / 6)


def test_str():
    assert str(1 - X) == "1 - x"
    assert str(RationalPolynomial()) == "0"
    assert str(RationalPolynomial([0, 0, Fraction(1, 2)])) == "1/2*x^2"


def test_hash_matches_equality():
    assert hash(RationalPolynomial([1, 2])) == hash(1 + 2 * X)
