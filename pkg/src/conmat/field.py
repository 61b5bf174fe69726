"""Arithmetic in the prime field GF(p)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_MODULUS = 1 << 16


def is_prime(p: int) -> bool:
    """Trial-division primality test (moduli are capped at 2^16)."""
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def check_modulus(p: int) -> int:
    if not isinstance(p, (int, np.integer)):
        raise ValueError(f"field modulus must be an integer, got {p!r}")
    p = int(p)
    if p > MAX_MODULUS:
        raise ValueError(f"field modulus {p} exceeds cap {MAX_MODULUS}")
    if not is_prime(p):
        raise ValueError(f"field modulus {p} is not prime")
    return p


class GF:
    """GF(p) operations on plain int residues in [0, p)."""

    __slots__ = ("p", "_inv_table")

    def __init__(self, p: int):
        self.p = check_modulus(p)
        self._inv_table = None

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.p

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("0 has no inverse in GF(%d)" % self.p)
        return pow(a, self.p - 2, self.p)

    def inv_table(self) -> np.ndarray:
        """int64 table with inv_table[a] = a^-1 (index 0 unused), for kernels."""
        if self._inv_table is None:
            t = np.zeros(self.p, dtype=np.int64)
            for a in range(1, self.p):
                t[a] = pow(a, self.p - 2, self.p)
            self._inv_table = t
        return self._inv_table

    def __eq__(self, other):
        return isinstance(other, GF) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    def __repr__(self):
        return f"GF({self.p})"


@dataclass(frozen=True)
class FieldElement:
    """A residue in GF(p); arithmetic raises on modulus mismatch."""

    value: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "p", check_modulus(self.p))
        object.__setattr__(self, "value", int(self.value) % self.p)

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.p != self.p:
                raise ValueError(f"modulus mismatch: GF({self.p}) vs GF({other.p})")
            return other
        if isinstance(other, (int, np.integer)):
            return FieldElement(int(other), self.p)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return FieldElement(self.value + other.value, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return FieldElement(self.value - other.value, self.p)

    def __neg__(self):
        return FieldElement(-self.value, self.p)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return FieldElement(self.value * other.value, self.p)

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        if self.value == 0:
            raise ZeroDivisionError("0 has no inverse in GF(%d)" % self.p)
        return FieldElement(pow(self.value, self.p - 2, self.p), self.p)

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"FieldElement({self.value}, p={self.p})"


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def inverse(a: FieldElement) -> FieldElement:
    return a.inverse()
