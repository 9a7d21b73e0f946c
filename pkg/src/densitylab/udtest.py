"""Empirical uniform-distribution machinery.

Counting sets, u.d.-in-Z deviations, Buck-u.d. necessary-condition checks,
exact star discrepancy, Weyl sums, and the distribution function of a mass
assignment on factorial residue classes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .core import DecompositionSystem, outer_density
from .errors import IncoherentDelta, IncompatibleLevel, InvalidParameters
from .exact import factorial
from .radix import CantorBase, reflect, unreflect
from .sets import SetSpec

# -- drivers -------------------------------------------------------------------------


@dataclass(frozen=True)
class DriverSequence:
    """Integer sequence s_1, s_2, ...: identity, affine a n + b, or the identity
    shuffled within consecutive blocks by a seeded permutation."""

    kind: str = "identity"
    a: int = 1
    b: int = 0
    seed: int | None = None
    block: int = 64

    def __post_init__(self):
        if self.kind not in ("identity", "affine", "shuffle"):
            raise InvalidParameters(f"unknown driver kind {self.kind!r}")
        if self.kind == "affine" and (self.a < 1 or self.a + self.b < 1):
            raise InvalidParameters("affine drivers need a >= 1 and positive values")
        if self.kind == "shuffle" and (self.seed is None or self.block < 1):
            raise InvalidParameters("shuffle drivers need a seed and a positive block size")

    @classmethod
    def identity(cls) -> DriverSequence:
        return cls()

    @classmethod
    def affine(cls, a: int, b: int = 0) -> DriverSequence:
        return cls("affine", a, b)

    @classmethod
    def shuffle(cls, seed: int, block: int = 64) -> DriverSequence:
        return cls("shuffle", seed=seed, block=block)

    def values(self, count: int) -> list[int]:
        if self.kind == "identity":
            return list(range(1, count + 1))
        if self.kind == "affine":
            return [self.a * n + self.b for n in range(1, count + 1)]
        out: list[int] = []
        for blk in range(-(-count // self.block)):
            # each block has its own stream, so prefixes agree for every count
            rng = np.random.default_rng([self.seed, blk])
            perm = rng.permutation(self.block) + blk * self.block + 1
            out.extend(int(v) for v in perm)
        return out[:count]

    def describe(self) -> str:
        if self.kind == "identity":
            return "identity"
        if self.kind == "affine":
            return f"affine({self.a},{self.b})"
        return f"shuffle({self.seed},{self.block})"


def default_drivers() -> list[DriverSequence]:
    return [
        DriverSequence.identity(),
        DriverSequence.affine(1, 1000),
        DriverSequence.shuffle(1),
        DriverSequence.shuffle(2),
        DriverSequence.shuffle(3),
    ]


def parse_driver(text: str) -> DriverSequence:
    """``identity``, ``affine:A,B``, ``shift:B`` or ``shuffle:SEED[,BLOCK]``."""
    name, _, arg = text.strip().partition(":")
    nums = [int(v) for v in arg.split(",") if v.strip()] if arg else []
    if name == "identity":
        return DriverSequence.identity()
    if name == "affine":
        return DriverSequence.affine(*nums)
    if name == "shift":
        return DriverSequence.affine(1, *nums)
    if name == "shuffle":
        return DriverSequence.shuffle(*nums)
    raise InvalidParameters(f"unknown driver {text!r}")


# -- counting sets --------------------------------------------------------------------


def _points(x: Callable[[int], object] | Sequence, count: int) -> list:
    if callable(x):
        return [x(n) for n in range(1, count + 1)]
    if len(x) < count:
        raise InvalidParameters(f"need {count} points, got {len(x)}")
    return list(x[:count])


def counting_set(spec: SetSpec, x: Callable[[int], object] | Sequence, count: int) -> list[int]:
    """A(S; x) ∩ [1, N]: the indices n <= N with x_n in S, ascending."""
    return [n for n, p in enumerate(_points(x, count), 1) if spec.contains(p)]


@dataclass(frozen=True)
class UDRow:
    modulus: int
    residue: int
    deviation: Fraction


@dataclass(frozen=True)
class UDReport:
    driver: str
    count: int
    rows: tuple[UDRow, ...]

    @property
    def max_deviation(self) -> Fraction:
        return max(r.deviation for r in self.rows)


def ud_in_Z_report(driver: DriverSequence, moduli: Sequence[int], count: int) -> UDReport:  # noqa: N802
    """|#{n <= N : s_n = a mod m}/N - 1/m| for every class a + (m)."""
    if not moduli or min(moduli) < 1:
        raise InvalidParameters("moduli must be positive")
    if count < max(moduli):
        raise InvalidParameters("N must be at least the largest modulus")
    s = driver.values(count)
    rows = []
    for m in moduli:
        tally = [0] * m
        for v in s:
            tally[v % m] += 1
        rows.extend(UDRow(m, a, abs(Fraction(tally[a], count) - Fraction(1, m))) for a in range(m))
    return UDReport(driver.describe(), count, tuple(rows))


@dataclass(frozen=True)
class BudRow:
    driver: str
    set_label: str
    empirical: Fraction
    level_density: Fraction
    deviation: Fraction
    verdict: str


@dataclass(frozen=True)
class BudReport:
    count: int
    level: int
    tolerance: Fraction
    rows: tuple[BudRow, ...]

    @property
    def verdict(self) -> str:
        """"disproved" if any driver/set pair fails, else "consistent" (never "proved")."""
        return "disproved" if any(r.verdict == "disproved" for r in self.rows) else "consistent"


def bud_report(
    system: DecompositionSystem,
    sets: Sequence[SetSpec],
    x: Callable[[int], object],
    drivers: Sequence[DriverSequence],
    count: int,
    level: int,
    *,
    tolerance: Fraction | float = Fraction(1, 100),
    labels: Sequence[str] | None = None,
) -> BudReport:
    """Compare the empirical density of A(S; x_{s_n}) up to N with the level outer density."""
    labels = list(labels) if labels is not None else [repr(s) for s in sets]
    tol = Fraction(tolerance)
    nus = [outer_density(system, s, level).value for s in sets]
    rows = []
    for d in drivers:
        pts = [x(v) for v in d.values(count)]
        for s, label, nu in zip(sets, labels, nus):
            emp = Fraction(sum(1 for p in pts if s.contains(p)), count)
            dev = abs(emp - nu)
            rows.append(BudRow(d.describe(), label, emp, nu, dev, "disproved" if dev > tol else "consistent"))
    return BudReport(count, level, tol, tuple(rows))


# -- discrepancy and Weyl sums ----------------------------------------------------------


def star_discrepancy(points: Iterable) -> Fraction | float:
    """D*_N = max_i max(i/N - x_(i), x_(i) - (i-1)/N) over the sorted points.

    Exact when every point is an int or Fraction."""
    xs = sorted(points)
    if not xs:
        raise InvalidParameters("need at least one point")
    if xs[0] < 0 or xs[-1] >= 1:
        raise InvalidParameters("points must lie in [0, 1)")
    n = len(xs)
    exact = all(isinstance(v, (int, Fraction)) for v in xs)
    best: Fraction | float = 0
    for i, v in enumerate(xs, 1):
        if exact:
            cand = max(Fraction(i, n) - v, v - Fraction(i - 1, n))
        else:
            cand = max(i / n - v, v - (i - 1) / n)
        best = max(best, cand)
    return best


def weyl_sum(points: Sequence, h: int) -> float:
    """|N^{-1} sum_n exp(2 pi i h x_n)|."""
    if h == 0:
        raise InvalidParameters("h must be nonzero")
    if len(points) == 0:
        raise InvalidParameters("need at least one point")
    # reduce h x mod 1 exactly before going to floating point
    phases = np.array([float((h * v) % 1) for v in points])
    return float(abs(np.exp(2j * np.pi * phases).mean()))


# -- distribution functions on factorial classes ------------------------------------------


class DeltaFamily:
    """Masses Delta(r + (n!)) for every level n."""

    name = "delta"

    def __call__(self, level: int, r: int) -> Fraction:
        raise NotImplementedError


class UniformDelta(DeltaFamily):
    name = "uniform"

    def __call__(self, level, r):
        return Fraction(1, factorial(level))


class PointMassDelta(DeltaFamily):
    """All mass on the class of 0."""

    name = "point-mass"

    def __call__(self, level, r):
        return Fraction(1 if r % factorial(level) == 0 else 0)


class TableDelta(DeltaFamily):
    """Explicit masses ``{level: {residue: mass}}``; missing residues carry 0."""

    name = "table"

    def __init__(self, table: dict[int, dict[int, Fraction]]):
        self.table = {lv: {r: Fraction(m) for r, m in row.items()} for lv, row in table.items()}

    def __call__(self, level, r):
        if level not in self.table:
            raise IncompatibleLevel(f"no masses given at level {level}")
        return self.table[level].get(r % factorial(level), Fraction(0))


class DistributionDelta(DeltaFamily):
    """Delta(r + (n!)) = F(right end) - F(left end) of the class's image interval."""

    name = "from-distribution"

    def __init__(self, f: Callable[[Fraction], Fraction]):
        self.f = f

    def __call__(self, level, r):
        m = factorial(level)
        v = reflect(_FACT, r % m)
        return Fraction(self.f(v + Fraction(1, m))) - Fraction(self.f(v))


_FACT = CantorBase.factorial()


def delta_from_distribution(f: Callable[[Fraction], Fraction]) -> DistributionDelta:
    return DistributionDelta(f)


def distribution_function(delta: DeltaFamily, level: int, xs: Iterable) -> list[Fraction]:
    """f(x) = sum of Delta(r + (n!)) over classes whose image interval lies in [0, x).

    Each x must be a multiple of 1/n! in [0, 1]."""
    m = factorial(level)
    # mass per image interval, in interval order
    by_interval = [delta(level, unreflect(_FACT, Fraction(b, m))) for b in range(m)]
    prefix = [Fraction(0)]
    for v in by_interval:
        prefix.append(prefix[-1] + v)
    out = []
    for x in xs:
        q = Fraction(x)
        if not 0 <= q <= 1 or (q * m).denominator != 1:
            raise IncompatibleLevel(f"{q} is not on the 1/{m} grid in [0, 1]")
        out.append(prefix[int(q * m)])
    return out


@dataclass(frozen=True)
class ContinuityReport:
    levels: tuple[int, ...]
    maxima: tuple[Fraction, ...]
    decreasing: bool


def check_coherence(delta: DeltaFamily, levels: Sequence[int]) -> None:
    """Children r + t n! + ((n+1)!) must sum to Delta(r + (n!)); raises IncoherentDelta."""
    for n in levels:
        m = factorial(n)
        if sum((delta(n, r) for r in range(m)), Fraction(0)) != 1:
            raise IncoherentDelta(f"masses at level {n} do not sum to 1")
    for n in levels:
        if n + 1 not in levels:
            continue
        m = factorial(n)
        for r in range(m):
            kids = sum((delta(n + 1, r + t * m) for t in range(n + 1)), Fraction(0))
            if kids != delta(n, r):
                raise IncoherentDelta(f"class {r}+({m}) carries {delta(n, r)}, its children {kids}")


def uniform_continuity_check(delta: DeltaFamily, levels: Sequence[int]) -> ContinuityReport:
    """max_r Delta(r + (n!)) per level, and whether it strictly decreases across the range."""
    levels = tuple(sorted(levels))
    if not levels or levels[0] < 1:
        raise InvalidParameters("levels must be positive")
    check_coherence(delta, levels)
    maxima = tuple(max(delta(n, r) for r in range(factorial(n))) for n in levels)
    decreasing = all(a > b for a, b in zip(maxima, maxima[1:]))
    return ContinuityReport(levels, maxima, decreasing)


__all__ = [
    "DriverSequence",
    "default_drivers",
    "parse_driver",
    "counting_set",
    "UDRow",
    "UDReport",
    "ud_in_Z_report",
    "BudRow",
    "BudReport",
    "bud_report",
    "star_discrepancy",
    "weyl_sum",
    "DeltaFamily",
    "UniformDelta",
    "PointMassDelta",
    "TableDelta",
    "DistributionDelta",
    "delta_from_distribution",
    "distribution_function",
    "ContinuityReport",
    "check_coherence",
    "uniform_continuity_check",
]
