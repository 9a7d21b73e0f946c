"""Free abelian semigroup on generators p_1, p_2, ... and exponent-set algebra.

Elements are stored as dense exponent tuples with trailing zeros stripped,
so equal elements have equal representations. Generator indices are 1-based
throughout, matching the descriptors printed by the CLI.

:class:`ExpSet` is an eventually periodic subset of the nonnegative integers.
:class:`Box` is a product of ExpSets, one per generator; every predicate in
the set vocabulary that factors coordinatewise compiles to a Box, and the
closed-form divisor and coset counts are products over its coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import InvalidParameters

__all__ = [
    "SemigroupElement",
    "ExpSet",
    "Box",
    "FULL_BOX",
    "EMPTY_BOX",
]


@dataclass(frozen=True, order=True)
class SemigroupElement:
    exponents: tuple[int, ...] = ()

    def __post_init__(self):
        exps = tuple(int(e) for e in self.exponents)
        if any(e < 0 for e in exps):
            raise InvalidParameters(f"exponents must be nonnegative: {exps}")
        while exps and exps[-1] == 0:
            exps = exps[:-1]
        object.__setattr__(self, "exponents", exps)

    @classmethod
    def from_support(cls, support: Mapping[int, int]) -> SemigroupElement:
        if not support:
            return cls()
        if min(support) < 1:
            raise InvalidParameters("generator indices are 1-based")
        exps = [0] * max(support)
        for i, e in support.items():
            exps[i - 1] = e
        return cls(tuple(exps))

    @classmethod
    def generator(cls, i: int, power: int = 1) -> SemigroupElement:
        return cls.from_support({i: power})

    def exponent(self, i: int) -> int:
        return self.exponents[i - 1] if i <= len(self.exponents) else 0

    def dense(self, n: int) -> tuple[int, ...]:
        exps = self.exponents[:n]
        return exps + (0,) * (n - len(exps))

    @property
    def support(self) -> dict[int, int]:
        return {i + 1: e for i, e in enumerate(self.exponents) if e}

    def __mul__(self, other: SemigroupElement) -> SemigroupElement:
        n = max(len(self.exponents), len(other.exponents))
        return SemigroupElement(tuple(a + b for a, b in zip(self.dense(n), other.dense(n))))

    def divides(self, other: SemigroupElement) -> bool:
        return all(e <= other.exponent(i + 1) for i, e in enumerate(self.exponents))

    def quotient(self, divisor: SemigroupElement) -> SemigroupElement:
        if not divisor.divides(self):
            raise InvalidParameters(f"{divisor} does not divide {self}")
        n = len(self.exponents)
        return SemigroupElement(tuple(a - b for a, b in zip(self.dense(n), divisor.dense(n))))

    def __str__(self):
        if not self.exponents:
            return "1"
        return "*".join(f"p{i}" if e == 1 else f"p{i}^{e}" for i, e in self.support.items())


@dataclass(frozen=True)
class ExpSet:
    """Exponent set: ``finite`` below ``start``; from ``start`` on, v is a member
    iff ``v % period`` is in ``residues``."""

    finite: frozenset = frozenset()
    start: int = 0
    period: int = 1
    residues: frozenset = frozenset({0})

    def __post_init__(self):
        if self.start < 0 or self.period < 1:
            raise InvalidParameters("ExpSet needs start >= 0 and period >= 1")
        if any(v < 0 or v >= self.start for v in self.finite):
            raise InvalidParameters("finite part must lie in [0, start)")
        object.__setattr__(self, "residues", frozenset(r % self.period for r in self.residues))

    @classmethod
    def everything(cls) -> ExpSet:
        return cls()

    @classmethod
    def nothing(cls) -> ExpSet:
        return cls(residues=frozenset())

    @classmethod
    def values(cls, vals: Iterable[int]) -> ExpSet:
        vals = frozenset(int(v) for v in vals)
        if any(v < 0 for v in vals):
            raise InvalidParameters("exponents are nonnegative")
        return cls(vals, max(vals, default=-1) + 1, 1, frozenset())

    @classmethod
    def residue_classes(cls, residues: Iterable[int], modulus: int) -> ExpSet:
        return cls(frozenset(), 0, modulus, frozenset(residues))

    @classmethod
    def multiples(cls, s: int) -> ExpSet:
        return cls.residue_classes({0}, s)

    @classmethod
    def at_least(cls, r: int) -> ExpSet:
        return cls(frozenset(), max(r, 0), 1, frozenset({0}))

    def __contains__(self, v: int) -> bool:
        if v < 0:
            return False
        if v < self.start:
            return v in self.finite
        return v % self.period in self.residues

    def is_empty(self) -> bool:
        return not self.finite and not self.residues

    def is_everything(self) -> bool:
        return len(self.residues) == self.period and len(self.finite) == self.start

    def _combine(self, other: ExpSet, op) -> ExpSet:
        start = max(self.start, other.start)
        period = math.lcm(self.period, other.period)
        finite = frozenset(v for v in range(start) if op(v in self, v in other))
        residues = frozenset(v % period for v in range(start, start + period) if op(v in self, v in other))
        return ExpSet(finite, start, period, residues)

    def __and__(self, other: ExpSet) -> ExpSet:
        return self._combine(other, lambda a, b: a and b)

    def __or__(self, other: ExpSet) -> ExpSet:
        return self._combine(other, lambda a, b: a or b)

    def complement(self) -> ExpSet:
        return ExpSet(
            frozenset(range(self.start)) - self.finite,
            self.start,
            self.period,
            frozenset(range(self.period)) - self.residues,
        )

    def shift(self, a: int) -> ExpSet:
        """{v + a : v in self}."""
        if a == 0:
            return self
        finite = frozenset(v + a for v in self.finite)
        return ExpSet(finite, self.start + a, self.period, frozenset(r + a for r in self.residues))

    def smallest(self, at_least: int = 0) -> int | None:
        for v in range(at_least, max(self.start, at_least) + self.period):
            if v in self:
                return v
        return None

    def count_upto(self, n: int) -> int:
        """|self ∩ [0, n]|."""
        if n < 0:
            return 0
        count = sum(1 for v in self.finite if v <= n)
        if n < self.start:
            return count
        span = n - self.start + 1
        full, rest = divmod(span, self.period)
        count += full * len(self.residues)
        base = self.start + full * self.period
        count += sum(1 for v in range(base, base + rest) if v % self.period in self.residues)
        return count

    def class_meets(self, j: int, n: int) -> bool:
        """Does {j, j+n, j+2n, ...} meet the set? Requires 0 <= j."""
        if any(v >= j and (v - j) % n == 0 for v in self.finite):
            return True
        g = math.gcd(n, self.period)
        return any((r - j) % g == 0 for r in self.residues)

    def class_member(self, j: int, n: int) -> int | None:
        """Smallest member of {j + t n : t >= 0}, or None."""
        if not self.class_meets(j, n):
            return None
        v = j
        while v not in self:
            v += n
        return v

    def class_covered(self, j: int, n: int) -> bool:
        """Is {j, j+n, j+2n, ...} contained in the set?"""
        return self.class_outsider(j, n) is None

    def class_outsider(self, j: int, n: int) -> int | None:
        """Smallest element of {j + t n} outside the set, or None."""
        # past start + lcm the pattern repeats, so this range is exhaustive
        bound = max(self.start, j) + math.lcm(n, self.period) + n
        for v in range(j, bound, n):
            if v not in self:
                return v
        return None

    def describe(self) -> str:
        if self.is_everything():
            return "N0"
        if self.is_empty():
            return "{}"
        parts = [str(v) for v in sorted(self.finite)]
        if self.residues:
            if self.period == 1:
                parts.append(f">={self.start}")
            else:
                res = ",".join(str(r) for r in sorted(self.residues))
                parts.append(f">={self.start} & {{{res}}} mod {self.period}")
        return "{" + "; ".join(parts) + "}"


_ALL = ExpSet.everything()


@dataclass(frozen=True)
class Box:
    """Product set: coordinate i ranges over ``head[i-1]`` for i <= len(head),
    over ``tail`` beyond. Only finitely supported elements exist, so a tail
    without 0 makes the box empty."""

    head: tuple[ExpSet, ...] = ()
    tail: ExpSet = field(default_factory=ExpSet.everything)

    def coord(self, i: int) -> ExpSet:
        return self.head[i - 1] if i <= len(self.head) else self.tail

    def widened(self, n: int) -> tuple[ExpSet, ...]:
        return self.head + (self.tail,) * max(0, n - len(self.head))

    def contains(self, x: SemigroupElement) -> bool:
        k = max(len(self.head), len(x.exponents))
        if any(x.exponent(i) not in self.coord(i) for i in range(1, k + 1)):
            return False
        return 0 in self.tail

    def is_empty(self) -> bool:
        return 0 not in self.tail or any(c.is_empty() for c in self.head)

    def __and__(self, other: Box) -> Box:
        k = max(len(self.head), len(other.head))
        head = tuple(a & b for a, b in zip(self.widened(k), other.widened(k)))
        return Box(head, self.tail & other.tail)

    def translate(self, a: SemigroupElement) -> Box:
        k = max(len(self.head), len(a.exponents))
        head = tuple(c.shift(a.exponent(i + 1)) for i, c in enumerate(self.widened(k)))
        return Box(head, self.tail)

    def permute(self, sigma: Mapping[int, int]) -> Box:
        """Image under the automorphism p_i -> p_sigma(i)."""
        k = max([len(self.head), *sigma.keys(), *sigma.values()], default=0)
        old = self.widened(k)
        new = list(old)
        for i, j in sigma.items():
            new[j - 1] = old[i - 1]
        return Box(tuple(new), self.tail)

    def _beyond(self, n: int) -> tuple[ExpSet, ...]:
        return self.head[n:]

    # -- divisors of P_n = (p_1 ... p_n)^n -------------------------------------

    def divisor_count(self, n: int) -> int:
        """|Box ∩ U(P_n)|: coordinates i <= n range over [0, n], the rest are 0."""
        if 0 not in self.tail or any(0 not in c for c in self._beyond(n)):
            return 0
        total = 1
        for c in self.head[:n]:
            total *= c.count_upto(n)
        extra = n - min(n, len(self.head))
        if extra:
            total *= self.tail.count_upto(n) ** extra
        return total

    # -- cosets a_j F_n, a_j = p_1^{j_1} ... p_n^{j_n}, 0 <= j_i < n ------------

    def coset_classes(self, n: int) -> list[list[int]]:
        """Per coordinate i <= n, the residues j with class j mod n meeting the box.
        Empty list if no coset meets it."""
        if 0 not in self.tail or any(c.is_empty() for c in self._beyond(n)):
            return []
        return [[j for j in range(n) if c.class_meets(j, n)] for c in self.widened(n)[:n]]

    def coset_count(self, n: int) -> int:
        classes = self.coset_classes(n)
        return math.prod(len(c) for c in classes) if classes else 0

    def covered_classes(self, n: int) -> list[list[int]]:
        """Per coordinate i <= n, residues j whose class lies inside the box.
        Empty list if the coordinates beyond n are not all free."""
        if not self.tail.is_everything() or any(not c.is_everything() for c in self._beyond(n)):
            return []
        return [[j for j in range(n) if c.class_covered(j, n)] for c in self.widened(n)[:n]]

    def covered_coset_count(self, n: int) -> int:
        classes = self.covered_classes(n)
        return math.prod(len(c) for c in classes) if classes else 0

    def meets_coset(self, j: tuple[int, ...], n: int) -> SemigroupElement | None:
        """A witness in ``a_j F_n`` ∩ box, or None when the intersection is empty."""
        if 0 not in self.tail:
            return None
        exps = []
        for i in range(1, n + 1):
            v = self.coord(i).class_member(j[i - 1], n)
            if v is None:
                return None
            exps.append(v)
        for c in self._beyond(n):
            v = c.smallest()
            if v is None:
                return None
            exps.append(v)
        return SemigroupElement(tuple(exps))

    def escapes_coset(self, j: tuple[int, ...], n: int) -> SemigroupElement | None:
        """A witness in ``a_j F_n`` outside the box, or None if the coset is covered."""
        base = list(j)
        for i in range(1, n + 1):
            v = self.coord(i).class_outsider(j[i - 1], n)
            if v is not None:
                base[i - 1] = v
                return SemigroupElement(tuple(base))
        for i in range(n + 1, max(n, len(self.head)) + 2):
            c = self.coord(i)
            if not c.is_everything():
                v = c.complement().smallest()
                exps = base + [0] * (i - 1 - n) + [v]
                return SemigroupElement(tuple(exps))
        return None

    def describe(self) -> str:
        parts = [f"e{i}∈{c.describe()}" for i, c in enumerate(self.head, 1) if not c.is_everything()]
        if not self.tail.is_everything():
            parts.append(f"e>{len(self.head)}∈{self.tail.describe()}")
        return " & ".join(parts) or "F"


FULL_BOX = Box()
EMPTY_BOX = Box((ExpSet.nothing(),))
