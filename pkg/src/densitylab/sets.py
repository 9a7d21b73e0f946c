"""Symbolic set descriptions.

Every :class:`SetSpec` answers membership for the point types it understands
(natural numbers, rationals, :class:`SemigroupElement`, digit tuples).
Membership is written directly from the definitions; the closed forms used by
the systems live elsewhere so that brute-force checks stay independent.

Semigroup predicates compile to a :class:`~densitylab.semigroup.Box` via
:func:`to_box`. :class:`FullSupportMin` is window-relative: its membership
depends on the divisor level ``n`` (all of the first ``n`` exponents are at
least ``r``), so it is not a fixed subset of the semigroup. Callers pass the
level as ``window``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import ClassVar

from sympy import integer_nthroot

from .errors import InvalidParameters, PointOutsideGroundSet
from .exact import as_fraction, is_squarefree, lcm_all, nth_prime, valuation
from .semigroup import EMPTY_BOX, FULL_BOX, Box, ExpSet, SemigroupElement


class SetSpec:
    """Base class for set descriptions."""

    def contains(self, x, window: int | None = None) -> bool:
        raise NotImplementedError

    def __invert__(self):
        return Complement(self)

    def __or__(self, other):
        return Union((self, other))

    def __and__(self, other):
        return Intersection((self, other))


def _point_error(spec, x):
    return PointOutsideGroundSet(f"{type(spec).__name__} cannot test membership of {x!r}")


@dataclass(frozen=True)
class Full(SetSpec):
    def contains(self, x, window=None):
        return True


@dataclass(frozen=True)
class Empty(SetSpec):
    def contains(self, x, window=None):
        return False


@dataclass(frozen=True)
class ResidueUnion(SetSpec):
    """Union of arithmetic progressions a + (m) inside the positive integers."""

    classes: tuple[tuple[int, int], ...]

    def __post_init__(self):
        norm = []
        for a, m in self.classes:
            a, m = int(a), int(m)
            if m < 1:
                raise InvalidParameters(f"modulus must be >= 1, got {m}")
            norm.append((a % m, m))
        object.__setattr__(self, "classes", tuple(sorted(set(norm), key=lambda c: (c[1], c[0]))))

    @classmethod
    def single(cls, a: int, m: int) -> ResidueUnion:
        return cls(((a, m),))

    @property
    def period(self) -> int:
        return lcm_all(m for _, m in self.classes)

    def residues(self, period: int | None = None) -> frozenset[int]:
        """Members of the union reduced mod ``period`` (a multiple of every modulus)."""
        period = period or self.period
        return frozenset(r for r in range(period) if any(r % m == a for a, m in self.classes))

    def contains(self, x, window=None):
        if not isinstance(x, int) or isinstance(x, bool):
            raise _point_error(self, x)
        return any(x % m == a for a, m in self.classes)


@dataclass(frozen=True)
class IntervalUnion(SetSpec):
    """Union of half-open rational intervals [lo, hi) inside [0, 1]."""

    intervals: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        norm = []
        for lo, hi in self.intervals:
            lo, hi = as_fraction(lo), as_fraction(hi)
            if not (0 <= lo <= hi <= 1):
                raise InvalidParameters(f"interval [{lo},{hi}) not inside [0,1]")
            norm.append((lo, hi))
        object.__setattr__(self, "intervals", tuple(norm))

    @classmethod
    def single(cls, lo, hi) -> IntervalUnion:
        return cls(((lo, hi),))

    def merged(self) -> list[tuple[Fraction, Fraction]]:
        out: list[list[Fraction]] = []
        for lo, hi in sorted(i for i in self.intervals if i[0] < i[1]):
            if out and lo <= out[-1][1]:
                out[-1][1] = max(out[-1][1], hi)
            else:
                out.append([lo, hi])
        return [(lo, hi) for lo, hi in out]

    def complement(self) -> IntervalUnion:
        out, cur = [], Fraction(0)
        for lo, hi in self.merged():
            if cur < lo:
                out.append((cur, lo))
            cur = hi
        if cur < 1:
            out.append((cur, Fraction(1)))
        return IntervalUnion(tuple(out))

    def measure(self) -> Fraction:
        return sum((hi - lo for lo, hi in self.merged()), Fraction(0))

    def contains(self, x, window=None):
        if not isinstance(x, (int, Fraction)) or isinstance(x, bool):
            raise _point_error(self, x)
        return any(lo <= x < hi for lo, hi in self.intervals)


@dataclass(frozen=True)
class FiniteSet(SetSpec):
    """Explicitly finite set of points."""

    elements: frozenset

    def contains(self, x, window=None):
        return x in self.elements


@dataclass(frozen=True)
class Complement(SetSpec):
    of: SetSpec

    def contains(self, x, window=None):
        return not self.of.contains(x, window)


@dataclass(frozen=True)
class Union(SetSpec):
    parts: tuple[SetSpec, ...]

    def contains(self, x, window=None):
        return any(p.contains(x, window) for p in self.parts)


@dataclass(frozen=True)
class Intersection(SetSpec):
    parts: tuple[SetSpec, ...]

    def contains(self, x, window=None):
        return all(p.contains(x, window) for p in self.parts)


# -- named predicates ----------------------------------------------------------


class Predicate(SetSpec):
    name: ClassVar[str]

    def params(self) -> dict:
        return {}


@dataclass(frozen=True)
class Squarefree(Predicate):
    name: ClassVar[str] = "squarefree"

    def contains(self, x, window=None):
        if isinstance(x, SemigroupElement):
            return all(e <= 1 for e in x.exponents)
        if isinstance(x, int) and not isinstance(x, bool):
            return is_squarefree(x)
        raise _point_error(self, x)


@dataclass(frozen=True)
class PerfectPower(Predicate):
    """s-th powers: F^s in the semigroup, k**s among the naturals."""

    s: int
    name: ClassVar[str] = "perfect-power"

    def __post_init__(self):
        if self.s < 1:
            raise InvalidParameters("perfect-power exponent must be >= 1")

    def params(self):
        return {"s": self.s}

    def contains(self, x, window=None):
        if isinstance(x, SemigroupElement):
            return all(e % self.s == 0 for e in x.exponents)
        if isinstance(x, int) and not isinstance(x, bool):
            return x >= 1 and bool(integer_nthroot(x, self.s)[1])
        raise _point_error(self, x)


@dataclass(frozen=True)
class SubsemigroupH(Predicate):
    """Semigroup generated by p_1^a_1, ..., p_k^a_k, p_{k+1}, p_{k+2}, ..."""

    alphas: tuple[int, ...]
    name: ClassVar[str] = "subsemigroup-h"

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(int(a) for a in self.alphas))
        if any(a < 1 for a in self.alphas):
            raise InvalidParameters("subsemigroup exponents must be positive")

    def params(self):
        return {"alphas": list(self.alphas)}

    def contains(self, x, window=None):
        if not isinstance(x, SemigroupElement):
            raise _point_error(self, x)
        return all(x.exponent(i) % a == 0 for i, a in enumerate(self.alphas, 1))


@dataclass(frozen=True)
class SparseMin(Predicate):
    """Elements whose every nonzero exponent is at least r."""

    r: int
    name: ClassVar[str] = "sparse-min"

    def __post_init__(self):
        if self.r < 1:
            raise InvalidParameters("r must be >= 1")

    def params(self):
        return {"r": self.r}

    def contains(self, x, window=None):
        if not isinstance(x, SemigroupElement):
            raise _point_error(self, x)
        return all(e == 0 or e >= self.r for e in x.exponents)


@dataclass(frozen=True)
class FullSupportMin(Predicate):
    """Window-relative: the first ``window`` exponents are all at least r, and
    every other nonzero exponent is at least r as well."""

    r: int
    name: ClassVar[str] = "full-support-min"

    def __post_init__(self):
        if self.r < 1:
            raise InvalidParameters("r must be >= 1")

    def params(self):
        return {"r": self.r}

    def contains(self, x, window=None):
        if not isinstance(x, SemigroupElement):
            raise _point_error(self, x)
        if window is None:
            raise InvalidParameters("full-support-min membership needs a window (the divisor level n)")
        head = all(x.exponent(i) >= self.r for i in range(1, window + 1))
        return head and all(e == 0 or e >= self.r for e in x.exponents[window:])


@dataclass(frozen=True)
class OrderIntervalAtMostOne(Predicate):
    """(0, 1] among the positive rationals."""

    name: ClassVar[str] = "order-interval-at-most-one"

    def contains(self, x, window=None):
        if not isinstance(x, (int, Fraction)) or x <= 0:
            raise _point_error(self, x)
        return x <= 1


@dataclass(frozen=True)
class OrderIntervalAboveOne(Predicate):
    """(1, oo) among the positive rationals."""

    name: ClassVar[str] = "order-interval-above-one"

    def contains(self, x, window=None):
        if not isinstance(x, (int, Fraction)) or x <= 0:
            raise _point_error(self, x)
        return x > 1


PREDICATES: dict[str, type[Predicate]] = {
    cls.name: cls
    for cls in (
        Squarefree,
        PerfectPower,
        SubsemigroupH,
        SparseMin,
        FullSupportMin,
        OrderIntervalAtMostOne,
        OrderIntervalAboveOne,
    )
}


# -- exponent-level sets -------------------------------------------------------


def exponent_vector(x, indices) -> dict[int, int]:
    """Exponents of ``x`` at the given 1-based generator indices.

    Semigroup elements read off directly; positive rationals are factored over
    the primes p_i; digit tuples read coordinate i.
    """
    if isinstance(x, SemigroupElement):
        return {i: x.exponent(i) for i in indices}
    if isinstance(x, tuple):
        return {i: (x[i - 1] if i <= len(x) else 0) for i in indices}
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool) and x > 0:
        q = Fraction(x)
        return {i: valuation(q.numerator, nth_prime(i)) - valuation(q.denominator, nth_prime(i)) for i in indices}
    raise InvalidParameters(f"no exponent vector for {x!r}")


@dataclass(frozen=True)
class ExponentBox(SetSpec):
    """Per-coordinate constraints ``(index, allowed, modulus)``.

    With ``modulus > 0`` the exponent reduced mod ``modulus`` must be in
    ``allowed``; with ``modulus == 0`` the exponent itself must be. Unlisted
    coordinates are unconstrained.
    """

    constraints: tuple[tuple[int, frozenset, int], ...]

    def __post_init__(self):
        norm = []
        for i, allowed, m in self.constraints:
            i, m = int(i), int(m)
            if i < 1 or m < 0:
                raise InvalidParameters("exponent box needs indices >= 1 and moduli >= 0")
            allowed = frozenset(int(a) % m if m else int(a) for a in allowed)
            norm.append((i, allowed, m))
        object.__setattr__(self, "constraints", tuple(sorted(norm, key=lambda c: (c[0], c[2], sorted(c[1])))))

    @classmethod
    def congruences(cls, residues: dict[int, int], modulus: int) -> ExponentBox:
        return cls(tuple((i, frozenset({r}), modulus) for i, r in residues.items()))

    def contains(self, x, window=None):
        exps = exponent_vector(x, [i for i, _, _ in self.constraints])
        return all((exps[i] % m if m else exps[i]) in allowed for i, allowed, m in self.constraints)


@dataclass(frozen=True)
class Translate(SetSpec):
    """a·S: for semigroup elements x ∈ aS iff a | x and x/a ∈ S; for rationals x/a ∈ S."""

    by: object
    of: SetSpec

    def contains(self, x, window=None):
        if isinstance(x, SemigroupElement):
            if not isinstance(self.by, SemigroupElement):
                raise _point_error(self, x)
            return self.by.divides(x) and self.of.contains(x.quotient(self.by), window)
        if isinstance(x, (int, Fraction)) and not isinstance(x, bool) and x > 0:
            return self.of.contains(Fraction(x) / Fraction(self.by), window)
        raise _point_error(self, x)


@dataclass(frozen=True)
class Permute(SetSpec):
    """Image of S under the automorphism p_i -> p_sigma(i) (finite window)."""

    mapping: tuple[tuple[int, int], ...]
    of: SetSpec

    def __post_init__(self):
        mapping = tuple(sorted((int(i), int(j)) for i, j in self.mapping))
        src = [i for i, _ in mapping]
        dst = [j for _, j in mapping]
        if sorted(src) != sorted(dst) or len(set(src)) != len(src) or min(src, default=1) < 1:
            raise InvalidParameters(f"not a permutation of a finite window: {mapping}")
        object.__setattr__(self, "mapping", mapping)

    @property
    def sigma(self) -> dict[int, int]:
        return dict(self.mapping)

    def contains(self, x, window=None):
        if not isinstance(x, SemigroupElement):
            raise _point_error(self, x)
        inv = {j: i for i, j in self.mapping}
        k = max([len(x.exponents), *inv.keys()], default=0)
        # preimage y with y_i = x_sigma(i)
        pre = [x.exponent(i) for i in range(1, k + 1)]
        for j, i in inv.items():
            pre[i - 1] = x.exponent(j)
        return self.of.contains(SemigroupElement(tuple(pre)), window)


# -- compilation to product boxes ----------------------------------------------


def _exponent_box_to_box(spec: ExponentBox) -> Box:
    coords: dict[int, ExpSet] = {}
    for i, allowed, m in spec.constraints:
        cs = ExpSet.residue_classes(allowed, m) if m else ExpSet.values(allowed)
        coords[i] = coords[i] & cs if i in coords else cs
    k = max(coords, default=0)
    return Box(tuple(coords.get(i, ExpSet.everything()) for i in range(1, k + 1)))


def to_box(spec: SetSpec, window: int | None = None) -> Box | None:
    """Compile a coordinatewise-decomposable semigroup set to a Box, else None."""
    if isinstance(spec, Full):
        return FULL_BOX
    if isinstance(spec, Empty):
        return EMPTY_BOX
    if isinstance(spec, Squarefree):
        return Box((), ExpSet.values({0, 1}))
    if isinstance(spec, PerfectPower):
        return Box((), ExpSet.multiples(spec.s))
    if isinstance(spec, SubsemigroupH):
        return Box(tuple(ExpSet.multiples(a) for a in spec.alphas))
    if isinstance(spec, SparseMin):
        return Box((), ExpSet.values({0}) | ExpSet.at_least(spec.r))
    if isinstance(spec, FullSupportMin):
        if window is None:
            return None
        return Box((ExpSet.at_least(spec.r),) * window, ExpSet.values({0}) | ExpSet.at_least(spec.r))
    if isinstance(spec, ExponentBox):
        return _exponent_box_to_box(spec)
    if isinstance(spec, Translate) and isinstance(spec.by, SemigroupElement):
        inner = to_box(spec.of, window)
        return inner.translate(spec.by) if inner is not None else None
    if isinstance(spec, Permute):
        inner = to_box(spec.of, window)
        return inner.permute(spec.sigma) if inner is not None else None
    if isinstance(spec, Intersection):
        boxes = [to_box(p, window) for p in spec.parts]
        if any(b is None for b in boxes):
            return None
        out = FULL_BOX
        for b in boxes:
            out = out & b
        return out
    return None


def translate_set(spec: SetSpec, a) -> SetSpec:
    """Symbolic a·S."""
    if isinstance(spec, Empty):
        return spec
    return Translate(a, spec)


def permute_set(spec: SetSpec, sigma: dict[int, int]) -> SetSpec:
    pairs = tuple((i, j) for i, j in sigma.items() if i != j)
    if not pairs:
        return spec
    return Permute(pairs, spec)


def residue_normal_form(spec: SetSpec) -> tuple[frozenset[int], int] | None:
    """Boolean combinations of residue unions as (residues, period); else None."""
    if isinstance(spec, Full):
        return frozenset({0}), 1
    if isinstance(spec, Empty):
        return frozenset(), 1
    if isinstance(spec, ResidueUnion):
        return spec.residues(), spec.period
    if isinstance(spec, Complement):
        inner = residue_normal_form(spec.of)
        if inner is None:
            return None
        res, period = inner
        return frozenset(range(period)) - res, period
    if isinstance(spec, (Union, Intersection)):
        parts = [residue_normal_form(p) for p in spec.parts]
        if any(p is None for p in parts):
            return None
        period = lcm_all(p for _, p in parts)
        op = any if isinstance(spec, Union) else all
        return frozenset(r for r in range(period) if op(r % p in res for res, p in parts)), period
    return None


def interval_normal_form(spec: SetSpec) -> IntervalUnion | None:
    """Boolean combinations of interval unions as one merged IntervalUnion."""
    if isinstance(spec, Full):
        return IntervalUnion.single(0, 1)
    if isinstance(spec, Empty):
        return IntervalUnion(())
    if isinstance(spec, IntervalUnion):
        return IntervalUnion(tuple(spec.merged()))
    if isinstance(spec, Complement):
        inner = interval_normal_form(spec.of)
        return inner.complement() if inner is not None else None
    if isinstance(spec, Union):
        parts = [interval_normal_form(p) for p in spec.parts]
        if any(p is None for p in parts):
            return None
        joined = IntervalUnion(tuple(i for p in parts for i in p.intervals))
        return IntervalUnion(tuple(joined.merged()))
    if isinstance(spec, Intersection):
        parts = [interval_normal_form(p) for p in spec.parts]
        if any(p is None for p in parts):
            return None
        # A ∩ B = (A^c ∪ B^c)^c
        union = IntervalUnion(tuple(i for p in parts for i in p.complement().intervals))
        return IntervalUnion(tuple(union.merged())).complement()
    return None


def is_window_relative(spec: SetSpec) -> bool:
    if isinstance(spec, FullSupportMin):
        return True
    for attr in ("of",):
        inner = getattr(spec, attr, None)
        if isinstance(inner, SetSpec) and is_window_relative(inner):
            return True
    return any(is_window_relative(p) for p in getattr(spec, "parts", ()))


__all__ = [
    "SetSpec",
    "Full",
    "Empty",
    "ResidueUnion",
    "IntervalUnion",
    "FiniteSet",
    "Complement",
    "Union",
    "Intersection",
    "Predicate",
    "Squarefree",
    "PerfectPower",
    "SubsemigroupH",
    "SparseMin",
    "FullSupportMin",
    "OrderIntervalAtMostOne",
    "OrderIntervalAboveOne",
    "PREDICATES",
    "ExponentBox",
    "Translate",
    "Permute",
    "to_box",
    "translate_set",
    "permute_set",
    "residue_normal_form",
    "interval_normal_form",
    "exponent_vector",
    "is_window_relative",
]
