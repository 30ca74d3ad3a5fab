"""Univariate polynomials in lambda with Scalar coefficients."""
from __future__ import annotations

from .field import FieldConfig, Scalar


class Polynomial:
    """Immutable polynomial; ``coeffs`` are stored constant term first."""

    __slots__ = ("coeffs", "field")

    def __init__(self, coeffs, field: FieldConfig):
        cs = [field.scalar(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs = tuple(cs)
        self.field = field

    @classmethod
    def constant(cls, c, field: FieldConfig) -> Polynomial:
        return cls([c], field)

    @classmethod
    def linear(cls, c, field: FieldConfig) -> Polynomial:
        """lambda + c."""
        return cls([c, 1], field)

    @classmethod
    def from_roots(cls, roots, field: FieldConfig) -> Polynomial:
        p = cls([1], field)
        for r in roots:
            p = p * cls([-field.scalar(r), 1], field)
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def __call__(self, value) -> Scalar:
        value = self.field.scalar(value)
        out = self.field.zero
        for c in reversed(self.coeffs):
            out = out * value + c
        return out

    def _lift(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            return other
        return Polynomial([other], self.field)

    def __add__(self, other):
        o = self._lift(other)
        n = max(len(self.coeffs), len(o.coeffs))
        z = self.field.zero
        a = self.coeffs + (z,) * (n - len(self.coeffs))
        b = o.coeffs + (z,) * (n - len(o.coeffs))
        return Polynomial([x + y for x, y in zip(a, b)], self.field)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial([-c for c in self.coeffs], self.field)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __mul__(self, other):
        o = self._lift(other)
        if not self.coeffs or not o.coeffs:
            return Polynomial([], self.field)
        out = [self.field.zero] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(o.coeffs):
                out[i + j] = out[i + j] + a * b
        return Polynomial(out, self.field)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coeffs]

    def __str__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if i == 0 else ("lambda" if i == 1 else f"lambda^{i}")
            if not mono:
                terms.append(f"({c})")
            elif c == 1:
                terms.append(mono)
            else:
                terms.append(f"({c})*{mono}")
        return " + ".join(reversed(terms)) or "0"

    def __repr__(self):
        return f"Polynomial({self.to_json()})"
