"""Integer polynomials in one variable t, used for f- and Poincare polynomials."""

from __future__ import annotations


class IntPolynomial:
    """Sparse polynomial with integer coefficients, keyed by degree."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        self.coeffs = {}
        if coeffs:
            for d, c in dict(coeffs).items():
                if c:
                    self.coeffs[int(d)] = int(c)

    @classmethod
    def from_counts(cls, counts) -> "IntPolynomial":
        """Build sum_i counts[i] t^i from a sequence indexed by degree."""
        return cls({i: int(c) for i, c in enumerate(counts)})

    def coefficient(self, degree: int) -> int:
        return self.coeffs.get(degree, 0)

    def degrees(self):
        return sorted(self.coeffs)

    def __add__(self, other: "IntPolynomial") -> "IntPolynomial":
        out = dict(self.coeffs)
        for d, c in other.coeffs.items():
            out[d] = out.get(d, 0) + c
        return IntPolynomial(out)

    def __eq__(self, other):
        if isinstance(other, IntPolynomial):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __bool__(self):
        return bool(self.coeffs)

    def __call__(self, t: int) -> int:
        return sum(c * t**d for d, c in self.coeffs.items())

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for d in self.degrees():
            c = self.coeffs[d]
            if d == 0:
                parts.append(str(c))
            elif c == 1:
                parts.append(f"t^{d}")
            else:
                parts.append(f"{c}t^{d}")
        return " + ".join(parts)

    def __repr__(self):
        return f"IntPolynomial({self})"


def parse_polynomial(text: str) -> IntPolynomial:
    """Inverse of str(): parse '9t^0 + 14t^1' / '1 + t^1' / '0'."""
    text = text.strip()
    if text == "0":
        return IntPolynomial()
    coeffs = {}
    for part in text.split("+"):
        part = part.strip()
        if "t^" in part:
            c, _, d = part.partition("t^")
            coeffs[int(d)] = coeffs.get(int(d), 0) + (int(c) if c else 1)
        else:
            coeffs[0] = coeffs.get(0, 0) + int(part)
    return IntPolynomial(coeffs)
