"""Radical-inverse maps over Cantor-series digit systems.

A Cantor base is a chain of moduli 1 = Q_1 | Q_2 | Q_3 | ... with
Q_j < Q_{j+1}. Every natural a has a unique expansion
a = sum_j a_j Q_j with 0 <= a_j < Q_{j+1}/Q_j, and the radical inverse
reflects the digits about the radix point: gamma(a) = sum_j a_j / Q_{j+1}.
Base-p van der Corput (Q_j = p^(j-1)) and the factorial map (Q_j = j!) are
the two named special cases.

All values are exact :class:`~fractions.Fraction` instances; natural-number
arguments start at 1.
"""

from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from sympy.ntheory.modular import solve_congruence

from .errors import InvalidParameters, ModulusMismatch, NotRepresentable
from .exact import factorial

__all__ = [
    "CantorBase",
    "digits",
    "from_digits",
    "reflect",
    "unreflect",
    "vdc",
    "vdc_inverse",
    "factorial_digits",
    "cantor_factorial",
    "cantor_factorial_inverse",
    "mixed_radix_point",
    "mixed_radix_inverse",
    "SequenceSpec",
    "multidim_point",
    "image_interval",
    "class_of_interval",
    "box_class",
]

_MAX_INVERSE_DIGITS = 100_000


@dataclass(frozen=True)
class CantorBase:
    """Moduli Q_1 = 1 | Q_2 | ... given as a finite list, a geometric rule, or factorials."""

    kind: str  # "list", "geometric" or "factorial"
    moduli: tuple[int, ...] = ()
    base: int = 0

    def __post_init__(self):
        if self.kind == "geometric":
            if self.base < 2:
                raise InvalidParameters(f"base must be >= 2, got {self.base}")
        elif self.kind == "list":
            q = tuple(int(m) for m in self.moduli)
            object.__setattr__(self, "moduli", q)
            if len(q) < 2 or q[0] != 1:
                raise InvalidParameters("moduli must start 1, Q_2, ... with at least two entries")
            for a, b in zip(q, q[1:]):
                if b <= a or b % a:
                    raise InvalidParameters(f"moduli must increase with Q_n | Q_n+1: {a}, {b}")
        elif self.kind != "factorial":
            raise InvalidParameters(f"unknown Cantor base kind {self.kind!r}")

    @classmethod
    def geometric(cls, base: int) -> CantorBase:
        return cls("geometric", base=base)

    @classmethod
    def factorial(cls) -> CantorBase:
        return cls("factorial")

    @classmethod
    def from_moduli(cls, moduli: Sequence[int]) -> CantorBase:
        return cls("list", tuple(moduli))

    @property
    def length(self) -> int | None:
        """Number of moduli available, None if unbounded."""
        return len(self.moduli) if self.kind == "list" else None

    def modulus(self, j: int) -> int:
        """Q_j, 1-based."""
        if j < 1:
            raise InvalidParameters(f"modulus index must be >= 1, got {j}")
        if self.kind == "geometric":
            return self.base ** (j - 1)
        if self.kind == "factorial":
            return factorial(j)
        if j > len(self.moduli):
            raise InvalidParameters(f"Cantor base has only {len(self.moduli)} moduli")
        return self.moduli[j - 1]

    def radix(self, j: int) -> int:
        """Q_{j+1} / Q_j: the number of values digit j can take."""
        if self.kind == "geometric":
            return self.base
        if self.kind == "factorial":
            return j + 1
        return self.modulus(j + 1) // self.modulus(j)

    def level_of(self, modulus: int) -> int:
        """The n with Q_n == modulus; raises ModulusMismatch otherwise."""
        j = 1
        while True:
            try:
                q = self.modulus(j)
            except InvalidParameters:
                break
            if q == modulus:
                return j
            if q > modulus:
                break
            j += 1
        raise ModulusMismatch(f"{modulus} is not one of the moduli of {self.describe()}")

    def describe(self) -> str:
        if self.kind == "geometric":
            return f"Q_j={self.base}^(j-1)"
        if self.kind == "factorial":
            return "Q_j=j!"
        return "Q=" + ",".join(map(str, self.moduli))


def digits(base: CantorBase, a: int) -> list[int]:
    """Digits a_1, a_2, ... of a >= 0 (no trailing zeros)."""
    if a < 0:
        raise InvalidParameters(f"cannot expand a negative integer: {a}")
    out = []
    j = 1
    while a:
        if base.length is not None and j >= base.length:
            raise NotRepresentable(f"{a} exceeds the range of {base.describe()}")
        a, d = divmod(a, base.radix(j))
        out.append(d)
        j += 1
    return out


def from_digits(base: CantorBase, ds: Sequence[int]) -> int:
    value = 0
    for j, d in enumerate(ds, 1):
        if not 0 <= d < base.radix(j):
            raise InvalidParameters(f"digit {d} at position {j} out of range for {base.describe()}")
        value += d * base.modulus(j)
    return value


def reflect(base: CantorBase, a: int) -> Fraction:
    """gamma(a) for a >= 0; gamma(0) = 0."""
    ds = digits(base, a)
    num, den = 0, 1
    for j in range(len(ds), 0, -1):
        num += ds[j - 1] * den
        den *= base.radix(j)
    return Fraction(num, den)


def unreflect(base: CantorBase, q: Fraction) -> int:
    """Inverse of :func:`reflect`; q must have a finite expansion."""
    q = Fraction(q)
    if not 0 <= q < 1:
        raise InvalidParameters(f"{q} is outside [0, 1)")
    if base.kind == "geometric":
        d = q.denominator
        g = math.gcd(d, base.base)
        while g > 1:
            d //= g
            g = math.gcd(d, base.base)
        if d != 1:
            raise NotRepresentable(f"{q} has no finite base-{base.base} expansion")
    num, den = q.numerator, q.denominator
    a, j, mod = 0, 1, 1
    while num:
        if j > _MAX_INVERSE_DIGITS or (base.length is not None and j >= base.length):
            raise NotRepresentable(f"{q} has no finite expansion in {base.describe()}")
        num *= base.radix(j)
        d, num = divmod(num, den)
        a += d * mod
        mod *= base.radix(j)
        j += 1
    return a


def _natural(n: int) -> int:
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InvalidParameters(f"indices are positive integers, got {n!r}")
    return n


@lru_cache(maxsize=None)
def _geometric(p: int) -> CantorBase:
    return CantorBase.geometric(p)


_FACTORIAL_BASE = CantorBase.factorial()


def vdc(p: int, n: int) -> Fraction:
    """Base-p radical inverse g_p(n)."""
    if not isinstance(p, int) or p < 2:
        raise InvalidParameters(f"invalid base {p!r}")
    return reflect(_geometric(p), _natural(n))


def vdc_inverse(p: int, q) -> int:
    if not isinstance(p, int) or p < 2:
        raise InvalidParameters(f"invalid base {p!r}")
    n = unreflect(_geometric(p), Fraction(q))
    if n == 0:
        raise NotRepresentable("0 has no preimage among the positive integers")
    return n


def factorial_digits(n: int) -> list[int]:
    """b_1, b_2, ... with n = sum b_i i! and 0 <= b_i <= i."""
    return digits(_FACTORIAL_BASE, n)


def cantor_factorial(n: int) -> Fraction:
    """g_v(n) = sum b_i / (i+1)!."""
    return reflect(_FACTORIAL_BASE, _natural(n))


def cantor_factorial_inverse(q) -> int:
    n = unreflect(_FACTORIAL_BASE, Fraction(q))
    if n == 0:
        raise NotRepresentable("0 has no preimage among the positive integers")
    return n


def mixed_radix_point(base: CantorBase | Sequence[int], n: int) -> Fraction:
    if not isinstance(base, CantorBase):
        base = CantorBase.from_moduli(base)
    return reflect(base, _natural(n))


def mixed_radix_inverse(base: CantorBase | Sequence[int], q) -> int:
    if not isinstance(base, CantorBase):
        base = CantorBase.from_moduli(base)
    n = unreflect(base, Fraction(q))
    if n == 0:
        raise NotRepresentable("0 has no preimage among the positive integers")
    return n


# -- sequence descriptors ------------------------------------------------------


@dataclass(frozen=True)
class SequenceSpec:
    """One-dimensional radical-inverse sequence over a Cantor base."""

    kind: str  # "vdc", "cantor" or "mixed"
    base: CantorBase

    @classmethod
    def vdc(cls, p: int) -> SequenceSpec:
        return cls("vdc", CantorBase.geometric(p))

    @classmethod
    def cantor(cls) -> SequenceSpec:
        return cls("cantor", CantorBase.factorial())

    @classmethod
    def mixed(cls, moduli: Sequence[int] | CantorBase) -> SequenceSpec:
        base = moduli if isinstance(moduli, CantorBase) else CantorBase.from_moduli(moduli)
        return cls("mixed", base)

    def point(self, n: int) -> Fraction:
        return reflect(self.base, _natural(n))

    def inverse(self, q) -> int:
        n = unreflect(self.base, Fraction(q))
        if n == 0:
            raise NotRepresentable("0 has no preimage among the positive integers")
        return n

    def points(self, count: int, start: int = 1) -> list[Fraction]:
        return [self.point(n) for n in range(start, start + count)]

    def describe(self) -> str:
        if self.kind == "vdc":
            return f"vdc({self.base.base})"
        if self.kind == "cantor":
            return "cantor-factorial"
        return f"mixed({self.base.describe()})"


def multidim_point(specs: Sequence[SequenceSpec], n: int) -> tuple[Fraction, ...]:
    if not specs:
        raise InvalidParameters("need at least one coordinate")
    return tuple(s.point(n) for s in specs)


def image_interval(spec: SequenceSpec, residue: int, modulus: int) -> tuple[Fraction, Fraction]:
    """Image of the class residue + (modulus) as the half-open interval [v, v + 1/modulus).

    The modulus must be one of the base's moduli; the image of the class is the
    interval intersected with the range of the map.
    """
    spec.base.level_of(modulus)
    v = reflect(spec.base, residue % modulus)
    return v, v + Fraction(1, modulus)


def class_of_interval(spec: SequenceSpec, index: int, modulus: int) -> int:
    """Residue b with gamma(b + (modulus)) = [index/modulus, (index+1)/modulus)."""
    spec.base.level_of(modulus)
    if not 0 <= index < modulus:
        raise InvalidParameters(f"interval index {index} out of range for modulus {modulus}")
    return unreflect(spec.base, Fraction(index, modulus))


def box_class(
    specs: Sequence[SequenceSpec], moduli: Sequence[int], indices: Sequence[int]
) -> tuple[int, int] | None:
    """Indices n whose multidimensional point lies in the aligned box
    prod_k [i_k/M_k, (i_k+1)/M_k), as one residue class (b, modulus).

    Each coordinate contributes a class b_k + (M_k); the classes are combined
    by the Chinese remainder theorem. None if they are incompatible.
    """
    if not (len(specs) == len(moduli) == len(indices)):
        raise InvalidParameters("specs, moduli and indices must have equal length")
    congruences = [(class_of_interval(s, i, m), m) for s, m, i in zip(specs, moduli, indices)]
    solved = solve_congruence(*congruences)
    if solved is None:
        return None
    b, m = solved
    return int(b), int(m)
