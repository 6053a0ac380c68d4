from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Tuple, Union

Scalar = Union[int, Fraction]


def _normalize(coeffs: Iterable[Scalar]) -> Tuple[Fraction, ...]:
    # Strip trailing zeros; the zero polynomial is the empty tuple.
    out = [Fraction(c) for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


class RationalPolynomial:
    """
    Exact one-variable polynomial with Fraction coefficients, ascending degree.

    [1, 10, 5] represents 1 + 10x + 5x**2. Arithmetic never rounds.
    """

    __slots__ = ("coefficients",)

    def __init__(self, coefficients: Iterable[Scalar] = ()):
        self.coefficients: Tuple[Fraction, ...] = _normalize(coefficients)

    @classmethod
    def constant(cls, c: Scalar) -> RationalPolynomial:
        return cls([c])

    @classmethod
    def x(cls) -> RationalPolynomial:
        return cls([0, 1])

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def is_zero(self) -> bool:
        return not self.coefficients

    def _coerce(self, other) -> RationalPolynomial:
        if isinstance(other, RationalPolynomial):
            return other
        if isinstance(other, (int, Fraction)):
            return RationalPolynomial.constant(other)
        return NotImplemented

    def __add__(self, other) -> RationalPolynomial:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.coefficients, other.coefficients
        if len(a) < len(b):
            a, b = b, a
        res = list(a)
        for i, c in enumerate(b):
            res[i] += c
        return RationalPolynomial(res)

    __radd__ = __add__

    def __neg__(self) -> RationalPolynomial:
        return RationalPolynomial(-c for c in self.coefficients)

    def __sub__(self, other) -> RationalPolynomial:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> RationalPolynomial:
        return (-self) + other

    def __mul__(self, other) -> RationalPolynomial:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.coefficients, other.coefficients
        if not a or not b:
            return RationalPolynomial()
        res = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca == 0:
                continue
            for j, cb in enumerate(b):
                res[i + j] += ca * cb
        return RationalPolynomial(res)

    __rmul__ = __mul__

    def __truediv__(self, other: Scalar) -> RationalPolynomial:
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        return RationalPolynomial(c / other for c in self.coefficients)

    def __pow__(self, power: int) -> RationalPolynomial:
        if power < 0:
            raise ValueError("Negative powers are not polynomials")
        result = RationalPolynomial.constant(1)
        base = self
        while power:
            if power & 1:
                result = result * base
            base = base * base
            power >>= 1
        return result

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.coefficients == other.coefficients

    def __hash__(self) -> int:
        return hash(self.coefficients)

    def __call__(self, x):
        # Horner; exact for int / Fraction arguments, float otherwise.
        if isinstance(x, (int, Fraction)):
            acc = Fraction(0)
            for c in reversed(self.coefficients):
                acc = acc * x + c
            return acc
        acc = 0.0
        for c in reversed(self.coefficients):
            acc = acc * x + float(c)
        return acc

    def compose(self, inner: RationalPolynomial) -> RationalPolynomial:
        """self(inner(x))."""
        result = RationalPolynomial()
        for c in reversed(self.coefficients):
            result = result * inner + c
        return result

    def antiderivative(self) -> RationalPolynomial:
        """The primitive vanishing at 0."""
        return RationalPolynomial([0] + [c / (i + 1) for i, c in enumerate(self.coefficients)])

    def integrate(self, lo: Scalar = 0, hi: Scalar = 1) -> Fraction:
        prim = self.antiderivative()
        return prim(Fraction(hi)) - prim(Fraction(lo))

    def __repr__(self) -> str:
        return f"RationalPolynomial({[str(c) for c in self.coefficients]})"

    def __str__(self) -> str:
        if not self.coefficients:
            return "0"
        terms = []
        for i, c in enumerate(self.coefficients):
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if mono and abs(c) == 1:
                coef = "-" if c < 0 else ""
            else:
                coef = str(c) + ("*" if mono else "")
            terms.append(coef + mono)
        return " + ".join(terms).replace("+ -", "- ")
