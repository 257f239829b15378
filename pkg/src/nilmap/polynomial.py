"""Sparse multivariate polynomials over the Gaussian rationals.

A polynomial keeps its real and imaginary coefficient parts in two separate
sparse maps ``monomial -> mpq``.  Monomials are exponent tuples, one entry per
ring variable.  Maps never hold zero coefficients, so equality of canonical
forms is equality of polynomials.  Real-coefficient inputs (the common case)
never touch the imaginary map, which keeps products cheap.
"""

from __future__ import annotations

from operator import add as _add
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

from .errors import DimensionError, RingMismatchError
from .scalars import GaussianRational, as_gr, format_coefficient

__all__ = ["Polynomial", "MAX_EXPONENT", "grlex_key"]

# Exponents are treated as machine-width integers.
MAX_EXPONENT = 2**31 - 1

_Q0 = mpq(0)
_Q1 = mpq(1)


def grlex_key(mono):
    """Sort key putting monomials in descending graded-lex order."""
    return (-sum(mono), tuple(-e for e in mono))


def _accumulate(out: dict, src: Mapping, scale=None):
    """out += scale * src, dropping cancelled entries."""
    get = out.get
    if scale is None:
        for m, c in src.items():
            v = get(m)
            if v is None:
                out[m] = c
            else:
                v = v + c
                if v:
                    out[m] = v
                else:
                    del out[m]
    else:
        for m, c in src.items():
            c = c * scale
            v = get(m)
            if v is None:
                out[m] = c
            else:
                v = v + c
                if v:
                    out[m] = v
                else:
                    del out[m]


def _mul_into(out: dict, a: Mapping, b: Mapping, negate=False):
    """out += a*b (or -= when ``negate``); zero entries may linger."""
    if len(a) > len(b):
        a, b = b, a
    get = out.get
    bitems = list(b.items())
    for ma, ca in a.items():
        if negate:
            ca = -ca
        for mb, cb in bitems:
            m = tuple(map(_add, ma, mb))
            v = get(m)
            out[m] = ca * cb if v is None else v + ca * cb


def _prune(d: dict) -> dict:
    return {m: c for m, c in d.items() if c}


class Polynomial:
    """An immutable element of Q(i)[x_1, ..., x_n].

    ``ring`` is the tuple of variable names; two polynomials can only be
    combined when their rings are equal.
    """

    __slots__ = ("ring", "_re", "_im", "_hash")

    def __init__(self, ring: Sequence[str], terms: Mapping | None = None):
        self.ring = tuple(ring)
        n = len(self.ring)
        re: dict = {}
        im: dict = {}
        if terms:
            for mono, coeff in terms.items():
                mono = tuple(int(e) for e in mono)
                if len(mono) != n:
                    raise DimensionError(f"monomial {mono} does not fit ring {self.ring}")
                if any(e < 0 for e in mono):
                    raise ValueError(f"negative exponent in {mono}")
                c = as_gr(coeff)
                if c.re:
                    re[mono] = re.get(mono, _Q0) + c.re
                if c.im:
                    im[mono] = im.get(mono, _Q0) + c.im
        self._re = _prune(re)
        self._im = _prune(im)
        self._hash = None

    @classmethod
    def _make(cls, ring: tuple, re: dict, im: dict) -> Polynomial:
        obj = cls.__new__(cls)
        obj.ring = ring
        obj._re = re
        obj._im = im
        obj._hash = None
        return obj

    # constructors -------------------------------------------------------

    @classmethod
    def zero(cls, ring) -> Polynomial:
        return cls._make(tuple(ring), {}, {})

    @classmethod
    def constant(cls, ring, value) -> Polynomial:
        ring = tuple(ring)
        c = as_gr(value)
        mono = (0,) * len(ring)
        return cls._make(ring, {mono: c.re} if c.re else {}, {mono: c.im} if c.im else {})

    @classmethod
    def var(cls, ring, which) -> Polynomial:
        """The variable ``which`` (name or index) as a polynomial."""
        ring = tuple(ring)
        j = ring.index(which) if isinstance(which, str) else int(which)
        if not 0 <= j < len(ring):
            raise IndexError(f"variable index {j} out of range for {ring}")
        mono = tuple(1 if k == j else 0 for k in range(len(ring)))
        return cls._make(ring, {mono: _Q1}, {})

    @classmethod
    def monomial(cls, ring, exponents, coeff=1) -> Polynomial:
        return cls(ring, {tuple(exponents): coeff})

    @classmethod
    def variables(cls, ring) -> list[Polynomial]:
        return [cls.var(ring, j) for j in range(len(ring))]

    # structure -----------------------------------------------------------

    @property
    def nvars(self) -> int:
        return len(self.ring)

    @property
    def terms(self) -> dict:
        """Canonical map monomial -> GaussianRational."""
        out = {}
        for m in self._monomials():
            out[m] = GaussianRational._raw(self._re.get(m, _Q0), self._im.get(m, _Q0))
        return out

    def _monomials(self):
        if not self._im:
            return self._re.keys()
        if not self._re:
            return self._im.keys()
        return self._re.keys() | self._im.keys()

    def monomials(self) -> list[tuple[int, ...]]:
        return sorted(self._monomials(), key=grlex_key)

    def coefficient(self, mono) -> GaussianRational:
        mono = tuple(mono)
        return GaussianRational._raw(self._re.get(mono, _Q0), self._im.get(mono, _Q0))

    def __len__(self):
        if not self._im:
            return len(self._re)
        return len(self._monomials())

    def is_zero(self) -> bool:
        return not self._re and not self._im

    def __bool__(self):
        return not self.is_zero()

    def is_real(self) -> bool:
        return not self._im

    def is_constant(self) -> bool:
        zero = (0,) * len(self.ring)
        return all(m == zero for m in self._monomials())

    def constant_term(self) -> GaussianRational:
        return self.coefficient((0,) * len(self.ring))

    def degree(self) -> int:
        """Total degree; the zero polynomial has degree 0 by convention."""
        return max((sum(m) for m in self._monomials()), default=0)

    def degree_in(self, j: int) -> int:
        return max((m[j] for m in self._monomials()), default=0)

    def uses_variable(self, j: int) -> bool:
        return any(m[j] for m in self._monomials())

    def support_variables(self) -> set[int]:
        used = set()
        for m in self._monomials():
            used.update(k for k, e in enumerate(m) if e)
        return used

    def is_homogeneous(self, k: int | None = None) -> bool:
        degrees = {sum(m) for m in self._monomials()}
        if not degrees:
            return True
        if len(degrees) != 1:
            return False
        return k is None or degrees == {k}

    def as_constant(self) -> GaussianRational:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.constant_term()

    def as_variable_index(self) -> int | None:
        """Index k when this polynomial is exactly the variable x_k, else None."""
        if self._im or len(self._re) != 1:
            return None
        (m, c), = self._re.items()
        if c != 1 or sum(m) != 1:
            return None
        return m.index(1)

    # ring plumbing ---------------------------------------------------------

    def _check(self, other: Polynomial):
        if self.ring is not other.ring and self.ring != other.ring:
            raise RingMismatchError(f"ring {self.ring} versus {other.ring}")

    def _lift(self, other):
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        try:
            return Polynomial.constant(self.ring, other)
        except TypeError:
            return NotImplemented

    def relabel(self, ring: Sequence[str]) -> Polynomial:
        """Same exponent data, different variable names (same arity)."""
        ring = tuple(ring)
        if len(ring) != len(self.ring):
            raise DimensionError(f"cannot relabel {self.ring} as {ring}")
        return Polynomial._make(ring, self._re, self._im)

    def embed(self, ring: Sequence[str], positions: Sequence[int]) -> Polynomial:
        """Move into a larger ring; variable j goes to position ``positions[j]``."""
        ring = tuple(ring)
        n = len(ring)
        if len(positions) != len(self.ring):
            raise DimensionError("one target position per variable required")

        def move(m):
            out = [0] * n
            for j, e in enumerate(m):
                if e:
                    out[positions[j]] += e
            return tuple(out)

        return Polynomial._make(ring, {move(m): c for m, c in self._re.items()},
                                {move(m): c for m, c in self._im.items()})

    def drop_variables(self, ring: Sequence[str], keep: Sequence[int]) -> Polynomial:
        """Project to a smaller ring keeping the listed variable positions.

        The dropped variables must not occur.
        """
        ring = tuple(ring)
        keep = list(keep)
        dropped = set(range(len(self.ring))) - set(keep)
        for m in self._monomials():
            if any(m[j] for j in dropped):
                raise ValueError("cannot drop a variable that occurs in the polynomial")

        def shrink(m):
            return tuple(m[j] for j in keep)

        return Polynomial._make(ring, {shrink(m): c for m, c in self._re.items()},
                                {shrink(m): c for m, c in self._im.items()})

    # arithmetic --------------------------------------------------------------

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        re = dict(self._re)
        _accumulate(re, other._re)
        if self._im or other._im:
            im = dict(self._im)
            _accumulate(im, other._im)
        else:
            im = {}
        return Polynomial._make(self.ring, re, im)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._make(self.ring, {m: -c for m, c in self._re.items()},
                                {m: -c for m, c in self._im.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        re = dict(self._re)
        _accumulate(re, other._re, -_Q1)
        if self._im or other._im:
            im = dict(self._im)
            _accumulate(im, other._im, -_Q1)
        else:
            im = {}
        return Polynomial._make(self.ring, re, im)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            self._check(other)
            return self._mul_poly(other)
        try:
            c = as_gr(other)
        except TypeError:
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def _mul_poly(self, other: Polynomial) -> Polynomial:
        if self.is_zero() or other.is_zero():
            return Polynomial._make(self.ring, {}, {})
        if self.degree() + other.degree() > MAX_EXPONENT:
            raise OverflowError("exponent overflow in polynomial product")
        ar, ai, br, bi = self._re, self._im, other._re, other._im
        re: dict = {}
        _mul_into(re, ar, br)
        if not ai and not bi:
            return Polynomial._make(self.ring, _prune(re), {})
        im: dict = {}
        if ai and bi:
            _mul_into(re, ai, bi, negate=True)
        if bi:
            _mul_into(im, ar, bi)
        if ai:
            _mul_into(im, ai, br)
        return Polynomial._make(self.ring, _prune(re), _prune(im))

    def scale(self, c) -> Polynomial:
        c = as_gr(c)
        if c.is_zero():
            return Polynomial._make(self.ring, {}, {})
        a, b = c.re, c.im
        if not b:
            return Polynomial._make(self.ring, {m: v * a for m, v in self._re.items()},
                                    {m: v * a for m, v in self._im.items()})
        re: dict = {}
        im: dict = {}
        # (x + iy)(a + ib) = (xa - yb) + i(xb + ya)
        _accumulate(re, self._re, a)
        _accumulate(re, self._im, -b)
        _accumulate(im, self._re, b)
        _accumulate(im, self._im, a)
        return Polynomial._make(self.ring, re, im)

    def __pow__(self, e):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            raise ValueError("negative exponent")
        if e > 1 and self.degree() * e > MAX_EXPONENT:
            raise OverflowError("exponent overflow in polynomial power")
        result = Polynomial.constant(self.ring, 1)
        base = self
        while e:
            if e & 1:
                result = result._mul_poly(base)
            e >>= 1
            if e:
                base = base._mul_poly(base)
        return result

    def mul_truncated(self, other: Polynomial, max_degree: int) -> Polynomial:
        """Product with all terms of total degree above ``max_degree`` discarded."""
        self._check(other)
        out = []
        for parts in ((self._re, other._re, False), (self._im, other._im, True),
                      (self._re, other._im, False), (self._im, other._re, False)):
            a, b, neg = parts
            acc: dict = {}
            if a and b:
                bl = [(m, sum(m), c) for m, c in b.items()]
                for ma, ca in a.items():
                    room = max_degree - sum(ma)
                    if room < 0:
                        continue
                    if neg:
                        ca = -ca
                    for mb, db, cb in bl:
                        if db <= room:
                            m = tuple(map(_add, ma, mb))
                            v = acc.get(m)
                            acc[m] = ca * cb if v is None else v + ca * cb
            out.append(acc)
        re = out[0]
        _accumulate(re, out[1])
        im = out[2]
        _accumulate(im, out[3])
        return Polynomial._make(self.ring, _prune(re), _prune(im))

    def truncate(self, max_degree: int) -> Polynomial:
        return Polynomial._make(self.ring,
                                {m: c for m, c in self._re.items() if sum(m) <= max_degree},
                                {m: c for m, c in self._im.items() if sum(m) <= max_degree})

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self._re == other._re and self._im == other._im
        try:
            return self == Polynomial.constant(self.ring, other)
        except TypeError:
            return False

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self._re.items()), frozenset(self._im.items())))
        return self._hash

    # calculus and slicing ------------------------------------------------------

    def derivative(self, j: int) -> Polynomial:
        """Formal partial derivative with respect to variable index ``j``."""
        if not 0 <= j < len(self.ring):
            raise IndexError(f"variable index {j} out of range for {self.ring}")

        def diff(src):
            out = {}
            for m, c in src.items():
                e = m[j]
                if e:
                    out[m[:j] + (e - 1,) + m[j + 1:]] = c * e
            return out

        return Polynomial._make(self.ring, diff(self._re), diff(self._im))

    def gradient(self) -> list[Polynomial]:
        return [self.derivative(j) for j in range(len(self.ring))]

    def homogeneous_component(self, k: int) -> Polynomial:
        """Sum of the terms of total degree exactly ``k``."""
        return Polynomial._make(self.ring,
                                {m: c for m, c in self._re.items() if sum(m) == k},
                                {m: c for m, c in self._im.items() if sum(m) == k})

    def homogeneous_components(self) -> dict[int, Polynomial]:
        """All nonzero graded pieces keyed by degree."""
        re: dict = {}
        im: dict = {}
        for m, c in self._re.items():
            re.setdefault(sum(m), {})[m] = c
        for m, c in self._im.items():
            im.setdefault(sum(m), {})[m] = c
        return {k: Polynomial._make(self.ring, re.get(k, {}), im.get(k, {}))
                for k in sorted(re.keys() | im.keys())}

    def coefficient_of_power(self, j: int, k: int) -> Polynomial:
        """The polynomial c with x_j-free coefficient of x_j^k, so p = sum_k c_k x_j^k."""

        def pick(src):
            return {m[:j] + (0,) + m[j + 1:]: c for m, c in src.items() if m[j] == k}

        return Polynomial._make(self.ring, pick(self._re), pick(self._im))

    def real_part(self) -> Polynomial:
        """Coefficient-wise real part (not the real part of the function)."""
        return Polynomial._make(self.ring, dict(self._re), {})

    def imag_part(self) -> Polynomial:
        """Coefficient-wise imaginary part, as a real-coefficient polynomial."""
        return Polynomial._make(self.ring, dict(self._im), {})

    def conjugate_coefficients(self) -> Polynomial:
        return Polynomial._make(self.ring, dict(self._re), {m: -c for m, c in self._im.items()})

    # substitution and evaluation --------------------------------------------------

    def substitute(self, images: Sequence, max_degree: int | None = None) -> Polynomial:
        """Ring homomorphism sending variable j to ``images[j]``.

        Images are polynomials over one common target ring; plain numbers are
        allowed and are read as constants of that ring.  With ``max_degree``
        the result is truncated, and so is every intermediate product.
        """
        if len(images) != len(self.ring):
            raise DimensionError(
                f"{len(images)} images for {len(self.ring)} variables")
        target = None
        for img in images:
            if isinstance(img, Polynomial):
                if target is None:
                    target = img.ring
                elif img.ring != target:
                    raise RingMismatchError("substitution images live in different rings")
        if target is None:
            target = ()
        imgs = [img if isinstance(img, Polynomial) else Polynomial.constant(target, img)
                for img in images]
        nt = len(target)

        # Images that are plain target variables only shift exponents; the rest
        # are multiplied out, grouping terms that share the same general part.
        rename: list[tuple[int, int]] = []
        general: list[int] = []
        for j, img in enumerate(imgs):
            k = img.as_variable_index()
            if k is None:
                general.append(j)
            else:
                rename.append((j, k))

        groups: dict = {}
        for src, slot in ((self._re, 0), (self._im, 1)):
            for m, c in src.items():
                tm = [0] * nt
                for j, k in rename:
                    if m[j]:
                        tm[k] += m[j]
                key = tuple(m[j] for j in general)
                entry = groups.get(key)
                if entry is None:
                    entry = groups[key] = ({}, {})
                bucket = entry[slot]
                tm = tuple(tm)
                v = bucket.get(tm)
                bucket[tm] = c if v is None else v + c

        powers: dict = {}
        if max_degree is None:
            def mul(a, b):
                return a._mul_poly(b)
        else:
            imgs = [img.truncate(max_degree) for img in imgs]

            def mul(a, b):
                return a.mul_truncated(b, max_degree)

        def power(j, e):
            key = (j, e)
            p = powers.get(key)
            if p is None:
                if e == 1:
                    p = imgs[j]
                elif e % 2 == 0:
                    half = power(j, e // 2)
                    p = mul(half, half)
                else:
                    p = mul(power(j, e - 1), imgs[j])
                powers[key] = p
            return p

        re: dict = {}
        im: dict = {}
        for key, (gre, gim) in groups.items():
            coeff = Polynomial._make(target, _prune(gre), _prune(gim))
            if max_degree is not None:
                coeff = coeff.truncate(max_degree)
            if coeff.is_zero():
                continue
            for pos, e in zip(general, key):
                if e:
                    coeff = mul(coeff, power(pos, e))
                    if coeff.is_zero():
                        break
            _accumulate(re, coeff._re)
            _accumulate(im, coeff._im)
        return Polynomial._make(target, re, im)

    def evaluate(self, point: Sequence) -> GaussianRational:
        """Exact value at a point of Q(i)^n."""
        if len(point) != len(self.ring):
            raise DimensionError(f"point of length {len(point)} for {len(self.ring)} variables")
        pts = [as_gr(v) for v in point]
        cache: dict = {}

        def power(j, e):
            key = (j, e)
            v = cache.get(key)
            if v is None:
                v = pts[j] ** e
                cache[key] = v
            return v

        total_re = _Q0
        total_im = _Q0
        for src, is_im in ((self._re, False), (self._im, True)):
            for m, c in src.items():
                val = GaussianRational._raw(c, _Q0) if not is_im else GaussianRational._raw(_Q0, c)
                for j, e in enumerate(m):
                    if e:
                        val = val * power(j, e)
                total_re += val.re
                total_im += val.im
        return GaussianRational._raw(total_re, total_im)

    def exact_divide(self, divisor: Polynomial) -> Polynomial:
        """Quotient q with self == q * divisor; raises ArithmeticError if inexact."""
        self._check(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if divisor.is_constant():
            return self.scale(divisor.constant_term().inverse())
        lead = min(divisor._monomials(), key=grlex_key)
        lead_inv = divisor.coefficient(lead).inverse()
        rem = self
        q_terms: dict = {}
        while not rem.is_zero():
            m = min(rem._monomials(), key=grlex_key)
            shift = tuple(a - b for a, b in zip(m, lead))
            if any(e < 0 for e in shift):
                raise ArithmeticError("division is not exact")
            c = rem.coefficient(m) * lead_inv
            q_terms[shift] = c
            step = Polynomial._make(self.ring, {shift: c.re} if c.re else {},
                                    {shift: c.im} if c.im else {})
            rem = rem - step._mul_poly(divisor)
        return Polynomial(self.ring, q_terms)

    # text --------------------------------------------------------------------

    def to_text(self) -> str:
        """Canonical infix text in descending graded-lex order."""
        if self.is_zero():
            return "0"
        pieces = []
        for m in self.monomials():
            c = self.coefficient(m)
            sign, body = _term_text(c, m, self.ring)
            pieces.append((sign, body))
        first_sign, first_body = pieces[0]
        out = ("-" if first_sign < 0 else "") + first_body
        for sign, body in pieces[1:]:
            out += (" - " if sign < 0 else " + ") + body
        return out

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"Polynomial({list(self.ring)!r}, {self.to_text()!r})"


def _mono_text(m, ring) -> str:
    parts = []
    for name, e in zip(ring, m):
        if e == 1:
            parts.append(name)
        elif e:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def _term_text(c: GaussianRational, m, ring):
    mono = _mono_text(m, ring)
    sign = 1
    if c.re and c.im:
        coeff = format_coefficient(c)
    else:
        if (c.re < 0) or (not c.re and c.im < 0):
            sign = -1
            c = -c
        coeff = format_coefficient(c)
    if not mono:
        return sign, coeff
    if coeff == "1":
        return sign, mono
    return sign, f"{coeff}*{mono}"


def poly_arith(a: Polynomial, b: Polynomial, op: str) -> Polynomial:
    """Dispatch ``add``, ``sub`` or ``mul`` on two polynomials of one ring."""
    a._check(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def poly_pow(a: Polynomial, e: int) -> Polynomial:
    return a ** e


def sum_polys(ring, polys: Iterable[Polynomial]) -> Polynomial:
    re: dict = {}
    im: dict = {}
    ring = tuple(ring)
    for p in polys:
        if p.ring != ring:
            raise RingMismatchError(f"ring {p.ring} versus {ring}")
        _accumulate(re, p._re)
        _accumulate(im, p._im)
    return Polynomial._make(ring, re, im)


def dot(ring, pairs: Iterable[tuple[Polynomial, Polynomial]]) -> Polynomial:
    """sum of a*b over the pairs, accumulated in one pass."""
    ring = tuple(ring)
    re: dict = {}
    im: dict = {}
    for a, b in pairs:
        if not a or not b:
            continue
        if a.ring != ring or b.ring != ring:
            raise RingMismatchError(f"ring {a.ring}/{b.ring} versus {ring}")
        _mul_into(re, a._re, b._re)
        if a._im and b._im:
            _mul_into(re, a._im, b._im, negate=True)
        if b._im:
            _mul_into(im, a._re, b._im)
        if a._im:
            _mul_into(im, a._im, b._re)
    return Polynomial._make(ring, _prune(re), _prune(im))
