"""Coefficient fields: prime fields F_p and the rationals.

Only exact fields are supported.  A field is described by a small
immutable object carrying its characteristic; all matrix arithmetic
lives in :mod:`krfoam.linalg`.
"""

from __future__ import annotations

from fractions import Fraction


class FieldError(ValueError):
    pass


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class Field:
    """A prime field F_p (char = p) or the rationals (char = 0)."""

    __slots__ = ("char",)

    def __init__(self, char: int):
        if char != 0 and not _is_prime(char):
            raise FieldError(f"field characteristic must be 0 or prime, got {char}")
        object.__setattr__(self, "char", char)

    def __setattr__(self, *a):
        raise AttributeError("Field is immutable")

    @property
    def is_rational(self) -> bool:
        return self.char == 0

    @property
    def name(self) -> str:
        return "q" if self.char == 0 else f"f{self.char}"

    def __eq__(self, other):
        return isinstance(other, Field) and other.char == self.char

    def __hash__(self):
        return hash(("Field", self.char))

    def __repr__(self):
        return f"Field({self.name})"

    def coerce(self, x):
        if self.char == 0:
            return Fraction(x)
        return int(x) % self.char


QQ = Field(0)
F2 = Field(2)
F3 = Field(3)
F5 = Field(5)


def parse_field(spec: str) -> Field:
    """Parse a CLI field spec: ``q`` for rationals, ``f<p>`` for F_p."""
    s = spec.strip().lower()
    if s in ("q", "qq", "rational", "rationals"):
        return QQ
    if s.startswith("f"):
        try:
            p = int(s[1:])
        except ValueError:
            raise FieldError(f"bad field spec {spec!r}") from None
        return Field(p)
    raise FieldError(f"bad field spec {spec!r} (use q or f<prime>)")
