"""Exact rational functions in ``v = q^{1/2}`` with integer coefficients.

A :class:`Scalar` is stored as ``v^shift * num(v) / den(v)`` where ``num`` and
``den`` are integer polynomials given as ascending coefficient tuples.  The
canonical form has

* ``num`` and ``den`` coprime, both with nonzero constant term;
* ``den`` with positive leading coefficient;
* the integer content of the whole fraction removed, so ``2v^2/4`` is stored
  as ``v^2 / 2``.

The common case in this package is a Laurent polynomial (``den == (1,)``),
which takes a gcd-free fast path.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from fractions import Fraction
from functools import reduce
from typing import Union

from sympy.polys.densearith import dup_exquo
from sympy.polys.domains import ZZ
from sympy.polys.euclidtools import dup_gcd

__all__ = [
    "ONE",
    "ZERO",
    "PoleError",
    "Q",
    "Scalar",
    "ScalarLike",
    "V",
    "as_scalar",
    "evaluate",
    "normalize",
]


class PoleError(ZeroDivisionError):
    """Raised when a denominator vanishes at the evaluation point."""


def _trim(coeffs: list[int]) -> tuple[int, tuple[int, ...]]:
    """Strip zeros at both ends; return (number of low zeros removed, coeffs)."""
    lo = 0
    n = len(coeffs)
    while lo < n and coeffs[lo] == 0:
        lo += 1
    if lo == n:
        return 0, ()
    hi = n
    while coeffs[hi - 1] == 0:
        hi -= 1
    return lo, tuple(int(c) for c in coeffs[lo:hi])


def _conv(a: tuple[int, ...], b: tuple[int, ...]) -> list[int]:
    if len(a) == 1:
        c = a[0]
        return [c * x for x in b]
    if len(b) == 1:
        c = b[0]
        return [c * x for x in a]
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _content(coeffs: tuple[int, ...]) -> int:
    return reduce(math.gcd, coeffs, 0)


def _poly_gcd(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    # sympy dense polynomials are stored highest degree first
    g = dup_gcd([ZZ(c) for c in reversed(a)], [ZZ(c) for c in reversed(b)], ZZ)
    return tuple(int(c) for c in reversed(g))


def _poly_exquo(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    qt = dup_exquo([ZZ(c) for c in reversed(a)], [ZZ(c) for c in reversed(b)], ZZ)
    return tuple(int(c) for c in reversed(qt))


class Scalar:
    """Immutable element of Q(v) with v = q^{1/2}."""

    __slots__ = ("_den", "_hash", "_num", "_shift")

    def __init__(self, shift: int, num: tuple[int, ...], den: tuple[int, ...] = (1,), *, _canonical: bool = False):
        if _canonical:
            self._shift = shift
            self._num = num
            self._den = den
        else:
            s, n, d = _canonicalize(shift, list(num), 0, list(den))
            self._shift, self._num, self._den = s, n, d
        self._hash = None

    # construction helpers -------------------------------------------------
    @staticmethod
    def from_int(n: int) -> Scalar:
        if n == 0:
            return ZERO
        return Scalar(0, (int(n),), (1,), _canonical=True)

    @staticmethod
    def from_fraction(x: Fraction) -> Scalar:
        x = Fraction(x)
        if x.numerator == 0:
            return ZERO
        return Scalar(0, (x.numerator,), (x.denominator,), _canonical=True)

    @staticmethod
    def v_power(k: int) -> Scalar:
        return Scalar(k, (1,), (1,), _canonical=True)

    @staticmethod
    def q_power(k: int) -> Scalar:
        return Scalar(2 * k, (1,), (1,), _canonical=True)

    @staticmethod
    def laurent(terms: Mapping[int, int]) -> Scalar:
        """Build a Laurent polynomial from a ``{v-exponent: coefficient}`` map."""
        terms = {e: c for e, c in terms.items() if c}
        if not terms:
            return ZERO
        lo = min(terms)
        hi = max(terms)
        coeffs = [0] * (hi - lo + 1)
        for e, c in terms.items():
            coeffs[e - lo] = int(c)
        return Scalar(lo, tuple(coeffs), (1,))

    # accessors -------------------------------------------------------------
    @property
    def shift(self) -> int:
        return self._shift

    @property
    def numerator(self) -> tuple[int, ...]:
        return self._num

    @property
    def denominator(self) -> tuple[int, ...]:
        return self._den

    def is_zero(self) -> bool:
        return not self._num

    def is_laurent(self) -> bool:
        return self._den == (1,)

    def is_monomial(self) -> bool:
        """True for ``c * v^k`` with c a nonzero rational."""
        return len(self._num) == 1 and len(self._den) == 1

    def laurent_terms(self) -> dict[int, int]:
        if not self.is_laurent():
            raise ValueError("not a Laurent polynomial")
        return {self._shift + i: c for i, c in enumerate(self._num) if c}

    # arithmetic -------------------------------------------------------------
    def __add__(self, other: ScalarLike) -> Scalar:
        other = as_scalar(other)
        if not other._num:
            return self
        if not self._num:
            return other
        if self._den == (1,) and other._den == (1,):
            return _laurent_add(self._shift, self._num, other._shift, other._num, 1)
        return _general_add(self, other, 1)

    __radd__ = __add__

    def __sub__(self, other: ScalarLike) -> Scalar:
        other = as_scalar(other)
        if not other._num:
            return self
        if not self._num:
            return -other
        if self._den == (1,) and other._den == (1,):
            return _laurent_add(self._shift, self._num, other._shift, other._num, -1)
        return _general_add(self, other, -1)

    def __rsub__(self, other: ScalarLike) -> Scalar:
        return as_scalar(other) - self

    def __neg__(self) -> Scalar:
        if not self._num:
            return self
        return Scalar(self._shift, tuple(-c for c in self._num), self._den, _canonical=True)

    def __mul__(self, other: ScalarLike) -> Scalar:
        other = as_scalar(other)
        if not self._num or not other._num:
            return ZERO
        if self._den == (1,) and other._den == (1,):
            return Scalar(self._shift + other._shift, tuple(_conv(self._num, other._num)), (1,), _canonical=True)
        return Scalar(
            0,
            tuple(_conv(self._num, other._num)),
            tuple(_conv(self._den, other._den)),
        )._with_shift(self._shift + other._shift)

    __rmul__ = __mul__

    def inverse(self) -> Scalar:
        if not self._num:
            raise ZeroDivisionError("inverse of zero scalar")
        if len(self._num) == 1:
            c = self._num[0]
            den = self._den
            if c < 0:
                den = tuple(-x for x in den)
                c = -c
            if len(den) == 1:
                g = math.gcd(den[0], c)
                return Scalar(-self._shift, (den[0] // g,), (c // g,), _canonical=True)
            g = math.gcd(_content(den), c)
            return Scalar(-self._shift, tuple(x // g for x in den), (c // g,), _canonical=True)
        return Scalar(0, self._den, self._num)._with_shift(-self._shift)

    def __truediv__(self, other: ScalarLike) -> Scalar:
        return self * as_scalar(other).inverse()

    def __rtruediv__(self, other: ScalarLike) -> Scalar:
        return as_scalar(other) * self.inverse()

    def __pow__(self, k: int) -> Scalar:
        if k < 0:
            return self.inverse() ** (-k)
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def _with_shift(self, extra: int) -> Scalar:
        if not self._num:
            return ZERO
        return Scalar(self._shift + extra, self._num, self._den, _canonical=True)

    # comparison -------------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if isinstance(other, Scalar):
            return self._num == other._num and self._shift == other._shift and self._den == other._den
        if isinstance(other, (int, Fraction)):
            return self == as_scalar(other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._shift, self._num, self._den))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self._num)

    # evaluation and printing ------------------------------------------------
    def evaluate(self, q: float) -> float:
        return evaluate(self, q)

    def __repr__(self) -> str:
        return f"Scalar({self})"

    def __str__(self) -> str:
        if not self._num:
            return "0"
        num = _poly_str(self._shift, self._num)
        if self._den == (1,):
            return num
        den = _poly_str(0, self._den)
        if _term_count(self._num) > 1:
            num = f"({num})"
        if _term_count(self._den) > 1:
            den = f"({den})"
        return f"{num}/{den}"


ScalarLike = Union[Scalar, int, Fraction]


def as_scalar(x: ScalarLike) -> Scalar:
    if isinstance(x, Scalar):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(x, int):
        return Scalar.from_int(x)
    if isinstance(x, Fraction):
        return Scalar.from_fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to Scalar")


def _laurent_add(s1: int, a: tuple[int, ...], s2: int, b: tuple[int, ...], sign: int) -> Scalar:
    lo = min(s1, s2)
    hi = max(s1 + len(a), s2 + len(b))
    out = [0] * (hi - lo)
    off = s1 - lo
    for i, c in enumerate(a):
        out[off + i] += c
    off = s2 - lo
    if sign == 1:
        for i, c in enumerate(b):
            out[off + i] += c
    else:
        for i, c in enumerate(b):
            out[off + i] -= c
    k, coeffs = _trim(out)
    if not coeffs:
        return ZERO
    return Scalar(lo + k, coeffs, (1,), _canonical=True)


def _general_add(x: Scalar, y: Scalar, sign: int) -> Scalar:
    s = min(x._shift, y._shift)
    xn = (0,) * (x._shift - s) + x._num
    yn = (0,) * (y._shift - s) + y._num
    a = _conv(xn, y._den)
    b = _conv(yn, x._den)
    if len(a) < len(b):
        a = a + [0] * (len(b) - len(a))
    else:
        b = b + [0] * (len(a) - len(b))
    num = [p + sign * r for p, r in zip(a, b)]
    den = _conv(x._den, y._den)
    shift, n, d = _canonicalize(0, num, 0, den)
    if not n:
        return ZERO
    return Scalar(shift + s, n, d, _canonical=True)


def _canonicalize(
    nshift: int, num: list[int], dshift: int, den: list[int]
) -> tuple[int, tuple[int, ...], tuple[int, ...]]:
    k, n = _trim(num)
    if not n:
        return 0, (), (1,)
    j, d = _trim(den)
    if not d:
        raise ZeroDivisionError("zero denominator")
    shift = nshift + k - dshift - j
    if len(d) > 1 and len(n) > 1:
        g = _poly_gcd(n, d)
        if len(g) > 1:
            n = _poly_exquo(n, g)
            d = _poly_exquo(d, g)
    if d[-1] < 0:
        n = tuple(-c for c in n)
        d = tuple(-c for c in d)
    g = math.gcd(_content(n), _content(d))
    if g > 1:
        n = tuple(c // g for c in n)
        d = tuple(c // g for c in d)
    return shift, n, d


def normalize(num: Mapping[int, int], den: Mapping[int, int]) -> Scalar:
    """Canonical form of the fraction ``num / den`` of two Laurent polynomials.

    Both arguments map v-exponents to integer coefficients.
    """
    if not any(den.values()):
        raise ZeroDivisionError("zero denominator")
    if not any(num.values()):
        return ZERO
    nlo = min(e for e, c in num.items() if c)
    dlo = min(e for e, c in den.items() if c)
    nhi = max(e for e, c in num.items() if c)
    dhi = max(e for e, c in den.items() if c)
    nl = [int(num.get(e, 0)) for e in range(nlo, nhi + 1)]
    dl = [int(den.get(e, 0)) for e in range(dlo, dhi + 1)]
    shift, n, d = _canonicalize(nlo, nl, dlo, dl)
    return Scalar(shift, n, d, _canonical=True)


def _horner(coeffs: tuple[int, ...], v: float) -> float:
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * v + c
    return acc


def evaluate(s: Scalar, q: float) -> float:
    """Substitute ``v = sqrt(q)`` and evaluate in double precision."""
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    if not s._num:
        return 0.0
    v = math.sqrt(q)
    den = _horner(s._den, v)
    if den == 0.0:
        raise PoleError(f"denominator of {s} vanishes at q={q}")
    return _horner(s._num, v) * v**s._shift / den


def _term_count(coeffs: tuple[int, ...]) -> int:
    return sum(1 for c in coeffs if c)


def _poly_str(shift: int, coeffs: tuple[int, ...]) -> str:
    parts: list[str] = []
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        e = shift + i
        if e == 0:
            mono = ""
        elif e == 1:
            mono = "v"
        else:
            mono = f"v^{e}"
        mag = abs(c)
        if mono and mag == 1:
            body = mono
        elif mono:
            body = f"{mag}*{mono}"
        else:
            body = str(mag)
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(parts)


ZERO = Scalar(0, (), (1,), _canonical=True)
ONE = Scalar(0, (1,), (1,), _canonical=True)
V = Scalar(1, (1,), (1,), _canonical=True)
Q = Scalar(2, (1,), (1,), _canonical=True)
