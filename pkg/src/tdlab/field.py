"""Exact arithmetic in Q(sqrt(D)) and the q-combinatorics built on it."""
from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import cached_property
from math import isqrt

from gmpy2 import mpq

from .errors import FieldMismatchError, ParseError, UsageError

_ZERO = mpq(0)
_ONE = mpq(1)
_MPQ = type(_ZERO)
_alloc = object.__new__

_SCALAR_RE = re.compile(
    r"^(?P<x>[+-]?\d+(?:/\d+)?)?"
    r"(?:(?P<sign>[+-])?(?:(?P<y>\d+(?:/\d+)?)\*)?sqrt\((?P<D>-?\d+)\))?$"
)


def _squarefree(n: int) -> bool:
    n = abs(n)
    if n < 2:
        return n == 1
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        p += 1
    return True


def _rational_sqrt(r) -> mpq | None:
    """Square root of a non-negative rational, or None when irrational."""
    if r < 0:
        return None
    num, den = int(r.numerator), int(r.denominator)
    rn, rd = isqrt(num), isqrt(den)
    if rn * rn == num and rd * rd == den:
        return mpq(rn, rd)
    return None


def to_mpq(value) -> mpq:
    if isinstance(value, str):
        try:
            return mpq(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"not a rational number: {value!r}") from exc
    if isinstance(value, bool):
        raise ParseError("booleans are not scalars")
    return mpq(value)


@dataclass(frozen=True)
class FieldConfig:
    """Ground field Q(sqrt(D)) together with the deformation parameter q.

    D = 0 means plain Q.  q must be rational with q != 0 and |q| != 1, which
    makes it automatically not a root of unity.  ``i_max`` bounds the search
    in :meth:`q_power_ratio`.
    """

    q: Fraction
    D: int = 0
    i_max: int = 64
    _cache: dict = dc_field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        q = Fraction(self.q) if not isinstance(self.q, str) else Fraction(self.q.strip())
        if q == 0 or abs(q) == 1:
            raise UsageError(f"q must satisfy q != 0 and |q| != 1, got {q}")
        if self.D != 0 and (self.D == 1 or not _squarefree(self.D)):
            raise UsageError(f"D must be 0 or a square-free integer other than 1, got {self.D}")
        if self.i_max < 0:
            raise UsageError("i_max must be non-negative")
        object.__setattr__(self, "q", q)

    # construction -------------------------------------------------------

    def scalar(self, value, y=0) -> Scalar:
        """Coerce ``value`` (int, Fraction, str, Scalar) into this field."""
        if isinstance(value, Scalar):
            if value.field is not self and value.field.D != self.D:
                raise FieldMismatchError(f"scalar from Q(sqrt({value.field.D})) used in Q(sqrt({self.D}))")
            if y:
                return value + self.scalar(0, y)
            return value if value.field is self else _new(value.x, value.y, self)
        if isinstance(value, str):
            return self.parse(value)
        x = to_mpq(value)
        yy = to_mpq(y)
        if yy and self.D == 0:
            raise FieldMismatchError("irrational part requires D != 0")
        return _new(x, yy, self)

    def parse(self, text: str) -> Scalar:
        m = _SCALAR_RE.match(text.replace(" ", ""))
        if m is None or not text.strip():
            raise ParseError(f"cannot parse scalar {text!r}")
        x = to_mpq(m.group("x")) if m.group("x") else _ZERO
        y = _ZERO
        if m.group("D") is not None:
            if int(m.group("D")) != self.D or self.D == 0:
                raise FieldMismatchError(f"{text!r} does not live in Q(sqrt({self.D}))")
            y = to_mpq(m.group("y")) if m.group("y") else _ONE
            if m.group("sign") == "-":
                y = -y
        elif m.group("sign") is not None:
            raise ParseError(f"cannot parse scalar {text!r}")
        return _new(x, y, self)

    @cached_property
    def zero(self) -> Scalar:
        return _new(_ZERO, _ZERO, self)

    @cached_property
    def one(self) -> Scalar:
        return _new(_ONE, _ZERO, self)

    @cached_property
    def q_scalar(self) -> Scalar:
        return _new(mpq(self.q), _ZERO, self)

    def qpow(self, n: int) -> Scalar:
        """q**n as a cached Scalar."""
        cache = self._cache
        key = ("qpow", n)
        val = cache.get(key)
        if val is None:
            base = mpq(self.q)
            val = _new(base**n if n >= 0 else 1 / base ** (-n), _ZERO, self)
            cache[key] = val
        return val

    # q-combinatorics ----------------------------------------------------

    def q_integer(self, n: int) -> Scalar:
        """[n] = (q^n - q^{-n}) / (q - q^{-1})."""
        key = ("qint", n)
        val = self._cache.get(key)
        if val is None:
            val = (self.qpow(n) - self.qpow(-n)) / (self.qpow(1) - self.qpow(-1))
            self._cache[key] = val
        return val

    def q_factorial(self, n: int) -> Scalar:
        if n < 0:
            raise UsageError("q_factorial needs n >= 0")
        out = self.one
        for j in range(1, n + 1):
            out = out * self.q_integer(j)
        return out

    def q_binomial(self, n: int, k: int) -> Scalar:
        if k < 0 or k > n:
            raise UsageError(f"q_binomial({n}, {k}) is out of range")
        num = self.one
        den = self.one
        for j in range(k):
            num = num * self.q_integer(n - j)
            den = den * self.q_integer(j + 1)
        return num / den

    @cached_property
    def _power_table(self) -> dict:
        base = mpq(self.q)
        table = {}
        for i in range(-self.i_max, self.i_max + 1):
            table[base**i if i >= 0 else 1 / base ** (-i)] = i
        return table

    def q_power_ratio(self, a: Scalar, b: Scalar) -> int | None:
        """The integer i with |i| <= i_max and b = a q^i, or None."""
        a = self.scalar(a)
        b = self.scalar(b)
        if not a or not b:
            raise UsageError("q_power_ratio needs nonzero arguments")
        r = b / a
        if r.y:
            return None
        return self._power_table.get(r.x)

    @cached_property
    def constants(self) -> Constants:
        return Constants(self)

    def sqrt(self, value: Scalar) -> Scalar | None:
        """A square root of ``value`` inside this field, or None."""
        value = self.scalar(value)
        x, y, D = value.x, value.y, self.D
        if not y:
            r = _rational_sqrt(x)
            if r is not None:
                return _new(r, _ZERO, self)
            if D:
                r = _rational_sqrt(x / D)
                if r is not None:
                    return _new(_ZERO, r, self)
            return None
        # (p + r sqrt(D))^2 = x + y sqrt(D) gives 4p^4 - 4x p^2 + D y^2 = 0
        n = _rational_sqrt(x * x - D * y * y)
        if n is None:
            return None
        for p2 in ((x + n) / 2, (x - n) / 2):
            p = _rational_sqrt(p2)
            if p:
                cand = _new(p, y / (2 * p), self)
                if cand * cand == value:
                    return cand
        return None

    def __reduce__(self):
        return (FieldConfig, (self.q, self.D, self.i_max))


def _new(x, y, f: FieldConfig) -> Scalar:
    s = _alloc(Scalar)
    s.x = x
    s.y = y
    s.field = f
    return s


class Scalar:
    """An element x + y sqrt(D) of the ground field; immutable."""

    __slots__ = ("x", "y", "field")

    def __init__(self, x, y=0, field: FieldConfig | None = None):
        if field is None:
            raise UsageError("Scalar needs a FieldConfig")
        s = field.scalar(x, y)
        self.x = s.x
        self.y = s.y
        self.field = field

    def _coerce(self, other) -> Scalar:
        if type(other) is Scalar:
            if other.field is not self.field and other.field.D != self.field.D:
                raise FieldMismatchError("scalars from different fields")
            return other
        if isinstance(other, (int, Fraction)) or type(other) is _MPQ:
            return _new(mpq(other), _ZERO, self.field)
        return NotImplemented

    def __add__(self, other):
        if type(other) is not Scalar or (other.field is not self.field and other.field.D != self.field.D):
            other = self._coerce(other)
            if other is NotImplemented:
                return other
        s = _alloc(Scalar)
        s.x = self.x + other.x
        s.y = self.y + other.y if (self.y or other.y) else _ZERO
        s.field = self.field
        return s

    __radd__ = __add__

    def __sub__(self, other):
        if type(other) is not Scalar or (other.field is not self.field and other.field.D != self.field.D):
            other = self._coerce(other)
            if other is NotImplemented:
                return other
        s = _alloc(Scalar)
        s.x = self.x - other.x
        s.y = self.y - other.y if (self.y or other.y) else _ZERO
        s.field = self.field
        return s

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return _new(o.x - self.x, o.y - self.y, self.field)

    def __neg__(self):
        return _new(-self.x, -self.y, self.field)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if type(other) is not Scalar or (other.field is not self.field and other.field.D != self.field.D):
            other = self._coerce(other)
            if other is NotImplemented:
                return other
        s = _alloc(Scalar)
        s.field = self.field
        if not self.y and not other.y:
            s.x = self.x * other.x
            s.y = _ZERO
        else:
            D = self.field.D
            s.x = self.x * other.x + D * self.y * other.y
            s.y = self.x * other.y + self.y * other.x
        return s

    __rmul__ = __mul__

    def inverse(self) -> Scalar:
        if not self.y:
            if not self.x:
                raise ZeroDivisionError("inverse of zero")
            return _new(1 / self.x, _ZERO, self.field)
        norm = self.x * self.x - self.field.D * self.y * self.y
        return _new(self.x / norm, -self.y / norm, self.field)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if not o.y:
            if not o.x:
                raise ZeroDivisionError("division by zero scalar")
            return _new(self.x / o.x, self.y / o.x, self.field)
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out = self.field.one
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __bool__(self):
        return bool(self.x) or bool(self.y)

    def __eq__(self, other):
        if type(other) is Scalar:
            return self.x == other.x and self.y == other.y and (
                other.field is self.field or other.field.D == self.field.D)
        if isinstance(other, (int, Fraction)):
            return not self.y and self.x == other
        return NotImplemented

    def __hash__(self):
        if not self.y:
            return hash(self.x)
        return hash((self.x, self.y))

    def conjugate(self) -> Scalar:
        return _new(self.x, -self.y, self.field)

    def norm(self):
        return self.x * self.x - self.field.D * self.y * self.y

    def is_rational(self) -> bool:
        return not self.y

    def sort_key(self) -> tuple:
        """Lexicographic (x, y) order used for deterministic tie-breaks."""
        return (self.x, self.y)

    def __str__(self):
        xs = _fmt(self.x)
        if not self.y:
            return xs
        D = self.field.D
        y = self.y
        ys = "" if abs(y) == 1 else _fmt(abs(y)) + "*"
        if not self.x:
            return f"{'-' if y < 0 else ''}{ys}sqrt({D})"
        return f"{xs}{'-' if y < 0 else '+'}{ys}sqrt({D})"

    def __repr__(self):
        return f"Scalar({str(self)!r})"

    def __reduce__(self):
        return (_unpickle_scalar, (str(self.x), str(self.y), self.field))


def _unpickle_scalar(x, y, f):
    return _new(mpq(x), mpq(y), f)


def _fmt(r) -> str:
    if r.denominator == 1:
        return str(r.numerator)
    return f"{r.numerator}/{r.denominator}"


class Constants:
    """The structure constants beta, delta, delta', alpha and Q_d for a given q."""

    def __init__(self, field: FieldConfig):
        self.field = field
        f = field
        q = f.qpow

        def diff(n):
            return q(n) - q(-n)

        self.beta = q(2) + q(-2)
        self.delta = -(diff(2) * diff(2))
        self.delta_prime = -(diff(1) * diff(2) * diff(3) * q(4))
        self.alpha = -(q(-1) * diff(1) * diff(1))

    def q_d_norm(self, d: int) -> Scalar:
        """Q_d = (-1)^d prod_{j=1..d} (q^j - q^{-j})^2."""
        f = self.field
        out = f.one
        for j in range(1, d + 1):
            diff = f.qpow(j) - f.qpow(-j)
            out = out * diff * diff
        return -out if d % 2 else out


def q_integer(n: int, field: FieldConfig) -> Scalar:
    return field.q_integer(n)


def q_binomial(n: int, k: int, field: FieldConfig) -> Scalar:
    return field.q_binomial(n, k)


def q_power_ratio(a: Scalar, b: Scalar, field: FieldConfig | None = None) -> int | None:
    field = field or a.field
    return field.q_power_ratio(a, b)
