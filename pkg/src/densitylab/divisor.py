"""Divisor density and divisor measure density on the free semigroup.

Level n looks at two finite structures:

* the divisors of P_n = (p_1 ... p_n)^n, i.e. exponent vectors in [0, n]^n;
  the divisor density of S is the limit of |S ∩ U(P_n)| / (n+1)^n.
* the n^n cosets a_j F_n, where F_n is the subsemigroup generated by the
  n-th powers of p_1..p_n and by every p_i with i > n, and
  a_j = p_1^{j_1} ... p_n^{j_n} with 0 <= j_i < n. The number of cosets
  meeting S, divided by n^n, is the level value of the divisor measure
  density; it is evaluated along the chain n = k!.

Closed forms come from compiling the set to a coordinatewise product
(:class:`~densitylab.semigroup.Box`). Exhaustive modes enumerate directly
and never look at the Box, so the two are independent checks of each other.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable, Iterator, Sequence

import numpy as np

from .core import Cell, DecompositionSystem, Decision
from .errors import IncompatibleLevel, InvalidParameters, LevelIntractable, PointOutsideGroundSet
from .exact import default_budget, factorial
from .semigroup import SemigroupElement
from .sets import ExponentBox, SetSpec, Squarefree, permute_set, to_box, translate_set

COSET_SEARCH_DEPTH = 2


@dataclass(frozen=True)
class CountResult:
    count: int
    total: int
    mode: str  # "closed-form", "exhaustive" or "sampled"
    n: int
    kind: str = "divisor"  # "divisor" or "coset"
    seed: int | None = None

    def __post_init__(self):
        if not 0 <= self.count <= self.total:
            raise InvalidParameters(f"count {self.count} outside [0, {self.total}]")

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.count, self.total)

    @property
    def ratio_float(self) -> float:
        return self.count / self.total


def divisors(n: int) -> Iterator[SemigroupElement]:
    """All divisors of P_n, in lexicographic order of exponent vectors."""
    for v in product(range(n + 1), repeat=n):
        yield SemigroupElement(v)


def coset_representatives(n: int) -> Iterator[tuple[tuple[int, ...], SemigroupElement]]:
    """(j, a_j) for every coset of F_n, j in lexicographic order."""
    for j in product(range(n), repeat=n):
        yield j, SemigroupElement(j)


def _check_n(n: int) -> int:
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InvalidParameters(f"n must be a positive integer, got {n!r}")
    return n


# -- divisor counts ----------------------------------------------------------------


def divisor_count(
    spec: SetSpec,
    n: int,
    *,
    mode: str = "auto",
    budget: int | None = None,
    samples: int | None = None,
    seed: int | None = None,
) -> CountResult:
    """|S ∩ U(P_n)| out of (n+1)^n. In sampled mode count/total is hits/samples."""
    n = _check_n(n)
    total = (n + 1) ** n
    budget = default_budget() if budget is None else budget
    if mode in ("auto", "closed"):
        box = to_box(spec, n)
        if box is not None:
            return CountResult(box.divisor_count(n), total, "closed-form", n)
        if mode == "closed":
            raise LevelIntractable("this set has no product closed form")
    if mode == "exhaustive" or (mode == "auto" and total <= budget):
        if total > budget:
            raise LevelIntractable(f"(n+1)^n = {total} exceeds the budget {budget}")
        hits = sum(1 for d in divisors(n) if spec.contains(d, n))
        return CountResult(hits, total, "exhaustive", n)
    if mode in ("auto", "sampled") and samples is not None:
        if seed is None:
            raise InvalidParameters("sampled mode needs a seed")
        rng = np.random.default_rng(seed)
        draws = rng.integers(0, n + 1, size=(samples, n))
        hits = sum(1 for row in draws if spec.contains(SemigroupElement(tuple(int(v) for v in row)), n))
        return CountResult(hits, samples, "sampled", n, seed=seed)
    if mode not in ("auto", "closed", "exhaustive", "sampled"):
        raise InvalidParameters(f"unknown mode {mode!r}")
    raise LevelIntractable(f"(n+1)^n = {total} exceeds the budget {budget}; supply samples and a seed")


def divisor_density(spec: SetSpec, n: int, **kwargs) -> Fraction:
    return divisor_count(spec, n, **kwargs).ratio


# -- coset counts ---------------------------------------------------------------------


def _coset_witness(spec: SetSpec, j: Sequence[int], n: int, depth: int) -> SemigroupElement | None:
    """Search a_j F_n for a member of S: exponents j_i + n t_i with t_i <= depth,
    times p_{n+1}^e with e in {0, 1}."""
    options = [[ji + n * t for t in range(depth + 1)] for ji in j]
    for extra in (0, 1):
        for v in product(*options):
            x = SemigroupElement(tuple(v) + (extra,))
            if spec.contains(x, n):
                return x
    return None


def coset_count(
    spec: SetSpec,
    n: int,
    *,
    mode: str = "auto",
    budget: int | None = None,
    search_depth: int = COSET_SEARCH_DEPTH,
) -> CountResult:
    """[S : F_n], the number of cosets a_j F_n meeting S, out of n^n.

    The exhaustive mode decides each coset by a bounded witness search
    (see :func:`_coset_witness`); it is exact whenever S has a member of that
    shape in every coset it meets, which holds for the registered predicates
    with parameters up to 3.
    """
    n = _check_n(n)
    total = n**n
    budget = default_budget() if budget is None else budget
    if mode in ("auto", "closed"):
        box = to_box(spec, n)
        if box is not None:
            return CountResult(box.coset_count(n), total, "closed-form", n, "coset")
        if mode == "closed":
            raise LevelIntractable("this set has no product closed form")
    if mode not in ("auto", "closed", "exhaustive"):
        raise InvalidParameters(f"unknown mode {mode!r}")
    if total > budget:
        raise LevelIntractable(f"n^n = {total} exceeds the budget {budget}")
    hits = sum(1 for j, _ in coset_representatives(n) if _coset_witness(spec, j, n, search_depth) is not None)
    return CountResult(hits, total, "exhaustive", n, "coset")


def divisor_measure_density(spec: SetSpec, k: int, **kwargs) -> CountResult:
    """[S : F_{b_k}] / b_k^{b_k} along the chain b_k = k!; an upper approximation."""
    if not isinstance(k, int) or k < 1:
        raise InvalidParameters(f"chain index must be a positive integer, got {k!r}")
    return coset_count(spec, factorial(k), **kwargs)


# -- invariance -----------------------------------------------------------------------


@dataclass(frozen=True)
class InvarianceRow:
    n: int
    count: int
    transformed_count: int
    total: int


@dataclass(frozen=True)
class InvarianceReport:
    transform: str
    kind: str
    rows: tuple[InvarianceRow, ...]

    @property
    def invariant(self) -> bool:
        return all(r.count == r.transformed_count for r in self.rows)

    @property
    def max_difference(self) -> int:
        return max(abs(r.count - r.transformed_count) for r in self.rows)


def permute_generators(
    spec: SetSpec, sigma: dict[int, int], ns: Sequence[int], *, kind: str = "divisor", mode: str = "auto"
) -> tuple[SetSpec, InvarianceReport]:
    """The image of S under p_i -> p_sigma(i), with counts before and after at each n."""
    image = permute_set(spec, sigma)
    counter = divisor_count if kind == "divisor" else coset_count
    rows = []
    for n in ns:
        a, b = counter(spec, n, mode=mode), counter(image, n, mode=mode)
        rows.append(InvarianceRow(n, a.count, b.count, a.total))
    name = "permute(" + ",".join(f"{i}->{j}" for i, j in sorted(sigma.items()) if i != j) + ")"
    return image, InvarianceReport(name, kind, tuple(rows))


def translation_report(
    spec: SetSpec, a: SemigroupElement, ns: Sequence[int], *, kind: str = "divisor", mode: str = "auto"
) -> tuple[SetSpec, InvarianceReport]:
    image = translate_set(spec, a)
    counter = divisor_count if kind == "divisor" else coset_count
    rows = []
    for n in ns:
        x, y = counter(spec, n, mode=mode), counter(image, n, mode=mode)
        rows.append(InvarianceRow(n, x.count, y.count, x.total))
    return image, InvarianceReport(f"translate({a})", kind, tuple(rows))


# -- coset system -----------------------------------------------------------------------


class DivisorCosetSystem(DecompositionSystem):
    """Cosets a_j F_n of the free semigroup; n^n cells of mass 1/n^n; chain n = k!."""

    system_id = "divisor"

    def chain(self, k):
        return factorial(k)

    def cell_count(self, level):
        return self.check_level(level) ** level

    def mass(self, cell):
        return Fraction(1, cell.level**cell.level)

    def window(self, level):
        return level

    def coset_exponents(self, cell: Cell) -> tuple[int, ...]:
        n, j = cell.level, cell.index - 1
        out = []
        for _ in range(n):
            j, d = divmod(j, n)
            out.append(d)
        return tuple(out)

    def _index(self, exps: Sequence[int], n: int) -> int:
        return 1 + sum((e % n) * n**i for i, e in enumerate(exps))

    def locate(self, point, level):
        if not isinstance(point, SemigroupElement):
            raise PointOutsideGroundSet(f"{point!r} is not a semigroup element")
        level = self.check_level(level)
        return Cell(self.system_id, level, self._index(point.dense(level), level))

    def representative(self, cell):
        return SemigroupElement(self.coset_exponents(cell))

    def sample_points(self, cell):
        n = cell.level
        j = self.coset_exponents(cell)
        options = [[ji + n * t for t in range(3)] for ji in j]
        for extra in (0, 1, 2):
            for v in product(*options):
                yield SemigroupElement(tuple(v) + (extra,))

    def cell_set(self, cell):
        return ExponentBox.congruences(dict(enumerate(self.coset_exponents(cell), 1)), cell.level)

    def describe_cell(self, cell):
        return "[" + ",".join(map(str, self.coset_exponents(cell))) + f"]F_{cell.level}"

    def parse_cell(self, text):
        m = re.fullmatch(r"\s*\[([0-9,\s]*)\]F_(\d+)\s*", text)
        if not m:
            raise InvalidParameters(f"not a coset cell: {text!r}")
        n = int(m.group(2))
        exps = [int(v) for v in m.group(1).split(",") if v.strip()]
        if len(exps) != n or any(not 0 <= e < n for e in exps):
            raise InvalidParameters(f"coset exponents must be {n} values in [0,{n})")
        return self.cell(n, self._index(exps, n))

    def cell_within(self, cell, coarse_level):
        if cell.level % coarse_level:
            return None
        exps = self.coset_exponents(cell)[:coarse_level]
        return Cell(self.system_id, coarse_level, self._index(exps, coarse_level))

    def specific_meets(self, cell, spec):
        box = to_box(spec, cell.level)
        if box is None:
            return None
        w = box.meets_coset(self.coset_exponents(cell), cell.level)
        if w is None:
            return Decision.no(reason="some coordinate class misses the allowed exponents")
        return Decision.yes(w, "per-coordinate exponent classes meet the set")

    def specific_covers(self, cell, spec):
        box = to_box(spec, cell.level)
        if box is None:
            return None
        w = box.escapes_coset(self.coset_exponents(cell), cell.level)
        if w is not None:
            return Decision.no(w, "coset element outside the set")
        return Decision.yes(reason="every coordinate class lies in the allowed exponents")

    def specific_closed_form(self, spec, level):
        box = to_box(spec, level)
        if box is None:
            return None
        total = level**level
        return Fraction(box.coset_count(level), total), Fraction(box.covered_coset_count(level), total)

    def complement_meets_every_cell(self, spec):
        # a_j p_1^n lies in every coset and is not squarefree once n >= 2; for n = 1 use p_1^2
        return isinstance(spec, Squarefree)


# -- Riemann sums and Weyl tests -----------------------------------------------------


def semigroup_riemann_integral(
    f: Callable[[SemigroupElement], object] | SetSpec,
    n: int,
    *,
    representatives: str | SetSpec = "minimal",
    budget: int | None = None,
) -> Fraction | float:
    """n^{-n} * sum over cosets a_j F_n of f(representative).

    ``representatives`` is "minimal" (a_j itself) or a set description:
    then each coset contributes a member of that set when the coset meets it,
    and a_j otherwise.
    """
    n = _check_n(n)
    budget = default_budget() if budget is None else budget
    total = n**n
    if total > budget:
        raise LevelIntractable(f"n^n = {total} exceeds the budget {budget}")
    if isinstance(f, SetSpec):
        spec = f
        f = lambda x: 1 if spec.contains(x, n) else 0  # noqa: E731
    prefer = None
    if isinstance(representatives, SetSpec):
        prefer = to_box(representatives, n)
        if prefer is None:
            raise InvalidParameters("representative set must have a product form")
    elif representatives != "minimal":
        raise InvalidParameters(f"unknown representative rule {representatives!r}")
    acc: Fraction | float = Fraction(0)
    for j, a in coset_representatives(n):
        if prefer is not None:
            a = prefer.meets_coset(j, n) or a
        v = f(a)
        acc = acc + (Fraction(v) if isinstance(v, (int, Fraction)) else v)
    return acc / total


@dataclass(frozen=True)
class UdmWeylReport:
    n: int
    domain: str
    points: int
    magnitudes: tuple[tuple[int, float], ...]
    grid: int
    interval_deviation: Fraction


def udm_weyl_test(
    x: Callable[[SemigroupElement], Fraction | float],
    n: int,
    harmonics: Sequence[int],
    *,
    domain: str = "divisors",
    grid_bits: int = 2,
    budget: int | None = None,
) -> UdmWeylReport:
    """Weyl averages |N^{-1} sum e^{2 pi i h x(d)}| over the divisors of P_n
    (or over the coset representatives a_j), plus the largest deviation
    |empirical(J) - |J|| over the 2^grid_bits dyadic intervals J."""
    n = _check_n(n)
    budget = default_budget() if budget is None else budget
    if domain == "divisors":
        size, pts = (n + 1) ** n, lambda: divisors(n)
    elif domain == "cosets":
        size, pts = n**n, lambda: (a for _, a in coset_representatives(n))
    else:
        raise InvalidParameters(f"unknown domain {domain!r}")
    if size > budget:
        raise LevelIntractable(f"{size} points exceed the budget {budget}")
    if any(h == 0 for h in harmonics):
        raise InvalidParameters("harmonics must be nonzero")
    values = [x(d) for d in pts()]
    for v in values:
        if not 0 <= v < 1:
            raise InvalidParameters(f"map value {v} outside [0, 1)")
    mags = []
    for h in harmonics:
        s = sum(cmath.exp(2j * math.pi * float((h * Fraction(v)) % 1 if isinstance(v, Fraction) else h * v)) for v in values)
        mags.append((h, abs(s) / len(values)))
    cells = 2**grid_bits
    counts = [0] * cells
    for v in values:
        counts[math.floor(v * cells)] += 1
    dev = max(abs(Fraction(c, len(values)) - Fraction(1, cells)) for c in counts)
    return UdmWeylReport(n, domain, len(values), tuple(mags), grid_bits, dev)


def interval_coded_map(k: int) -> Callable[[SemigroupElement], Fraction]:
    """x with x(a) in I_c iff a lies in the c-th coset of F_{b_k}, b_k = k!;
    the I_c are the b_k^{b_k} equal subintervals of [0, 1) in coset order."""
    if k < 1:
        raise IncompatibleLevel("chain index must be >= 1")
    b = factorial(k)
    total = b**b

    def x(a: SemigroupElement) -> Fraction:
        c = sum((e % b) * b**i for i, e in enumerate(a.dense(b)))
        return Fraction(c, total)

    return x


__all__ = [
    "CountResult",
    "divisors",
    "coset_representatives",
    "divisor_count",
    "divisor_density",
    "coset_count",
    "divisor_measure_density",
    "translate_set",
    "permute_generators",
    "translation_report",
    "InvarianceReport",
    "DivisorCosetSystem",
    "semigroup_riemann_integral",
    "udm_weyl_test",
    "UdmWeylReport",
    "interval_coded_map",
]
