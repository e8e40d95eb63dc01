"""Exact linear expressions over named rule amounts.

Charge computations are written once and evaluated in two modes: with a
concrete table (plain Fractions) or with a symbolic table whose entries are
LinExpr values.  Addition and scalar multiplication are enough for every
charge formula, so LinExpr supports exactly those.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, Mapping, Tuple

Scalar = int | Fraction


def _as_fraction(x: Scalar) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


class LinExpr:
    """Immutable linear form ``const + sum coeff_v * v`` with exact coefficients."""

    __slots__ = ("const", "coeffs")

    def __init__(self, coeffs: Mapping[str, Scalar] | None = None, const: Scalar = 0):
        self.const = _as_fraction(const)
        items: Dict[str, Fraction] = {}
        if coeffs:
            for name, c in coeffs.items():
                c = _as_fraction(c)
                if c != 0:
                    items[name] = c
        self.coeffs = items

    @staticmethod
    def var(name: str) -> "LinExpr":
        return LinExpr({name: 1})

    @staticmethod
    def of(value: Scalar | "LinExpr") -> "LinExpr":
        if isinstance(value, LinExpr):
            return value
        return LinExpr(const=value)

    def is_constant(self) -> bool:
        return not self.coeffs

    def variables(self) -> Iterable[str]:
        return self.coeffs.keys()

    def evaluate(self, point: Mapping[str, Fraction]) -> Fraction:
        total = self.const
        for name, c in self.coeffs.items():
            if name not in point:
                raise KeyError(f"no value for variable {name!r}")
            total += c * point[name]
        return total

    def key(self) -> Tuple:
        """Hashable canonical form, used for constraint deduplication."""
        return (self.const, tuple(sorted(self.coeffs.items())))

    def __add__(self, other: "LinExpr | Scalar") -> "LinExpr":
        o = LinExpr.of(other)
        coeffs = dict(self.coeffs)
        for name, c in o.coeffs.items():
            coeffs[name] = coeffs.get(name, Fraction(0)) + c
        return LinExpr(coeffs, self.const + o.const)

    __radd__ = __add__

    def __neg__(self) -> "LinExpr":
        return LinExpr({n: -c for n, c in self.coeffs.items()}, -self.const)

    def __sub__(self, other: "LinExpr | Scalar") -> "LinExpr":
        return self + (-LinExpr.of(other))

    def __rsub__(self, other: "LinExpr | Scalar") -> "LinExpr":
        return LinExpr.of(other) + (-self)

    def __mul__(self, k: Scalar) -> "LinExpr":
        k = _as_fraction(k)
        return LinExpr({n: c * k for n, c in self.coeffs.items()}, self.const * k)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.const == other
        if isinstance(other, LinExpr):
            return self.key() == other.key()
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        parts = [] if self.const == 0 else [str(self.const)]
        for name, c in sorted(self.coeffs.items()):
            parts.append(f"{c}*{name}" if c != 1 else name)
        return " + ".join(parts) if parts else "0"
