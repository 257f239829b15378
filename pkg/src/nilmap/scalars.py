"""Exact scalars: Gaussian rationals Q(i) and the quotient ring Q(i)[lam]/(lam^d - c)."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

from gmpy2 import mpq

from .errors import ModulusMismatchError

__all__ = ["GaussianRational", "ExtensionScalar", "as_gr", "as_mpq", "ZERO", "ONE", "I"]

_MPQ_ZERO = mpq(0)
_MPQ_ONE = mpq(1)


def as_mpq(value) -> mpq:
    """Convert an exact rational-like value to ``mpq``.

    Floats are rejected: all arithmetic in this package is exact.
    """
    if isinstance(value, type(_MPQ_ZERO)):
        return value
    if isinstance(value, bool):
        return mpq(int(value))
    if isinstance(value, int):
        return mpq(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, Rational):
        return mpq(int(value.numerator), int(value.denominator))
    if isinstance(value, str):
        return mpq(Fraction(value.strip()))
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


class GaussianRational:
    """An element re + im*i of Q(i), with arbitrary precision rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, GaussianRational):
            if im:
                raise TypeError("cannot combine a GaussianRational with an imaginary part")
            self.re, self.im = re.re, re.im
            return
        self.re = as_mpq(re)
        self.im = as_mpq(im)

    @classmethod
    def _raw(cls, re: mpq, im: mpq) -> GaussianRational:
        obj = cls.__new__(cls)
        obj.re = re
        obj.im = im
        return obj

    # arithmetic -------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return GaussianRational._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return GaussianRational._raw(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return GaussianRational._raw(a * c, _MPQ_ZERO)
        return GaussianRational._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __neg__(self):
        return GaussianRational._raw(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        result = ONE
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self) -> GaussianRational:
        norm = self.re * self.re + self.im * self.im
        if not norm:
            raise ZeroDivisionError("division by zero in Q(i)")
        return GaussianRational._raw(self.re / norm, -self.im / norm)

    def conjugate(self) -> GaussianRational:
        return GaussianRational._raw(self.re, -self.im)

    def norm(self) -> mpq:
        """|z|^2 as an exact rational."""
        return self.re * self.re + self.im * self.im

    # predicates -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def is_real(self) -> bool:
        return not self.im

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return False
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def to_fractions(self) -> tuple[Fraction, Fraction]:
        return (Fraction(int(self.re.numerator), int(self.re.denominator)),
                Fraction(int(self.im.numerator), int(self.im.denominator)))

    def __repr__(self):
        return f"GaussianRational({_fmt_q(self.re)!r}, {_fmt_q(self.im)!r})"

    def __str__(self):
        return format_coefficient(self)


def _fmt_q(q: mpq) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def format_coefficient(z: GaussianRational) -> str:
    """Canonical text for a coefficient: ``a/b``, ``i``, ``a/b*i`` or ``(a/b+c/d*i)``."""
    re, im = z.re, z.im
    if not im:
        return _fmt_q(re)
    if not re:
        if im == 1:
            return "i"
        if im == -1:
            return "-i"
        return f"{_fmt_q(im)}*i"
    if im == 1:
        imag = "+i"
    elif im == -1:
        imag = "-i"
    elif im > 0:
        imag = f"+{_fmt_q(im)}*i"
    else:
        imag = f"{_fmt_q(im)}*i"
    return f"({_fmt_q(re)}{imag})"


def _coerce(value):
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, complex):
        return NotImplemented
    try:
        return GaussianRational._raw(as_mpq(value), _MPQ_ZERO)
    except TypeError:
        return NotImplemented


def as_gr(value) -> GaussianRational:
    """Coerce ints, rationals and GaussianRationals to GaussianRational."""
    if isinstance(value, GaussianRational):
        return value
    return GaussianRational(value)


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)


class ExtensionScalar:
    """Element sum_j a_j lam^j of Q(i)[lam]/(lam^d - c).

    Only the single relation lam^d = c is supported; ``d`` and ``c`` are
    carried by every value and must agree between operands.
    """

    __slots__ = ("d", "c", "coords")

    def __init__(self, d: int, c, coords=()):
        if d < 1:
            raise ValueError("modulus degree must be positive")
        self.d = d
        self.c = as_gr(c)
        values = [as_gr(a) for a in coords]
        if len(values) > d:
            values = _reduce_coords(values, d, self.c)
        values.extend([ZERO] * (d - len(values)))
        self.coords = tuple(values)

    @classmethod
    def embed(cls, value, d: int, c) -> ExtensionScalar:
        """The image of a Gaussian rational under Q(i) -> Q(i)[lam]/(lam^d - c)."""
        return cls(d, c, [value])

    @classmethod
    def generator(cls, d: int, c) -> ExtensionScalar:
        """The class of lam itself (equals ``c`` when d == 1)."""
        return cls(d, c, [ZERO, ONE])

    def _check(self, other):
        if not isinstance(other, ExtensionScalar):
            other = ExtensionScalar.embed(other, self.d, self.c)
        elif other.d != self.d or other.c != self.c:
            raise ModulusMismatchError(
                f"lam^{self.d} = {self.c} versus lam^{other.d} = {other.c}")
        return other

    def __add__(self, other):
        other = self._check(other)
        return ExtensionScalar(self.d, self.c, [a + b for a, b in zip(self.coords, other.coords)])

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        return ExtensionScalar(self.d, self.c, [a - b for a, b in zip(self.coords, other.coords)])

    def __neg__(self):
        return ExtensionScalar(self.d, self.c, [-a for a in self.coords])

    def __mul__(self, other):
        other = self._check(other)
        prod = [ZERO] * (2 * self.d - 1)
        for i, a in enumerate(self.coords):
            if not a:
                continue
            for j, b in enumerate(other.coords):
                if b:
                    prod[i + j] = prod[i + j] + a * b
        return ExtensionScalar(self.d, self.c, _reduce_coords(prod, self.d, self.c))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            return NotImplemented
        result = ExtensionScalar.embed(ONE, self.d, self.c)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, ExtensionScalar):
            try:
                other = ExtensionScalar.embed(other, self.d, self.c)
            except TypeError:
                return False
        return (self.d, self.c, self.coords) == (other.d, other.c, other.coords)

    def __hash__(self):
        return hash((self.d, self.c, self.coords))

    def is_zero(self) -> bool:
        return all(a.is_zero() for a in self.coords)

    def __repr__(self):
        terms = " + ".join(f"({a})*lam^{j}" for j, a in enumerate(self.coords) if a) or "0"
        return f"ExtensionScalar[lam^{self.d}={self.c}]({terms})"


def _reduce_coords(values, d, c):
    """Fold coefficients of lam^j, j >= d, back using lam^d = c."""
    values = list(values)
    for j in range(len(values) - 1, d - 1, -1):
        a = values[j]
        if a:
            values[j - d] = values[j - d] + a * c
    return values[:d]
