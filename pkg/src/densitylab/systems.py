"""Concrete decomposition systems and their cell oracles.

Residue systems (factorial, prime-power, Cantor-series moduli) share one
implementation keyed by the level modulus. Interval cells of width 1/L, the
finite/cofinite system, cosets of the free abelian group on the primes, and
products of finite cyclic groups complete the set. The divisor-coset system
on the free semigroup lives in :mod:`densitylab.divisor`.
"""

from __future__ import annotations

import math
import re
from abc import abstractmethod
from fractions import Fraction
from itertools import count, product
from typing import Iterator, Sequence

from sympy import factorint
from sympy.ntheory.modular import solve_congruence

from .core import Cell, DecompositionSystem, Decision
from .errors import IncompatibleLevel, InvalidParameters, PointOutsideGroundSet
from .exact import PRIME_WINDOW, as_fraction, factorial, nth_prime, square_prime_divisors
from .radix import CantorBase
from .sets import (
    Complement,
    ExponentBox,
    FiniteSet,
    Full,
    IntervalUnion,
    Intersection,
    OrderIntervalAboveOne,
    OrderIntervalAtMostOne,
    ResidueUnion,
    SetSpec,
    Squarefree,
    interval_normal_form,
    residue_normal_form,
)

_WITNESS_SCAN = 10_000


def _natural_point(x) -> int:
    if not isinstance(x, int) or isinstance(x, bool) or x < 1:
        raise PointOutsideGroundSet(f"{x!r} is not a positive integer")
    return x


def _crt(r: int, m: int, s: int, n: int) -> int | None:
    """Smallest positive x with x = r mod m and x = s mod n."""
    sol = solve_congruence((r, m), (s, n))
    if sol is None:
        return None
    x, modulus = int(sol[0]), int(sol[1])
    return x if x > 0 else x + modulus


# -- residue systems ---------------------------------------------------------------


class ResidueSystem(DecompositionSystem):
    """Cells r + (M_n) of the positive integers, r = index - 1.

    ``weights(level, r)`` replaces the uniform mass 1/M_n when given.
    """

    def __init__(self, weights=None):
        self._weights = weights

    @abstractmethod
    def modulus(self, level: int) -> int: ...

    def chain(self, k: int) -> int:
        return k

    def level_of_modulus(self, m: int) -> int:
        n = 1
        while True:
            q = self.modulus(n)
            if q == m:
                return n
            if q > m:
                raise IncompatibleLevel(f"{m} is not a level modulus of {self.system_id}")
            n += 1

    def cell_count(self, level):
        return self.modulus(self.check_level(level))

    def residue(self, cell: Cell) -> int:
        return cell.index - 1

    def mass(self, cell):
        if self._weights is not None:
            return Fraction(self._weights(cell.level, self.residue(cell)))
        return Fraction(1, self.modulus(cell.level))

    def uniform_mass(self, level):
        return None if self._weights is not None else Fraction(1, self.modulus(level))

    def locate(self, point, level):
        x = _natural_point(point)
        return Cell(self.system_id, level, x % self.modulus(self.check_level(level)) + 1)

    def representative(self, cell):
        r = self.residue(cell)
        return r if r else self.modulus(cell.level)

    def sample_points(self, cell) -> Iterator[int]:
        m = self.modulus(cell.level)
        x = self.representative(cell)
        while True:
            yield x
            x += m

    def cell_set(self, cell):
        return ResidueUnion.single(self.residue(cell), self.modulus(cell.level))

    def describe_cell(self, cell):
        return f"{self.residue(cell)}+({self.modulus(cell.level)})"

    def parse_cell(self, text):
        m = re.fullmatch(r"\s*(\d+)\s*\+\s*\(\s*(\d+)\s*\)\s*", text)
        if not m:
            raise InvalidParameters(f"not a residue cell: {text!r}")
        r, mod = int(m.group(1)), int(m.group(2))
        if r >= mod:
            raise InvalidParameters(f"residue {r} not reduced mod {mod}")
        return Cell(self.system_id, self.level_of_modulus(mod), r + 1)

    def cell_within(self, cell, coarse_level):
        mc, mf = self.modulus(coarse_level), self.modulus(cell.level)
        if mf % mc:
            return None
        return Cell(self.system_id, coarse_level, self.residue(cell) % mc + 1)

    # -- oracles ----------------------------------------------------------------

    def _squarefree_meets(self, r: int, m: int) -> bool:
        # the class misses the squarefree numbers iff p^2 | m and p^2 | r for some prime p
        return not any(r % (p * p) == 0 for p in square_prime_divisors(m))

    def _non_squarefree_member(self, r: int, m: int) -> int:
        q = next(p for p in (nth_prime(i) for i in count(1)) if m % p)
        x = _crt(r, m, 0, q * q)
        return x

    def specific_meets(self, cell, spec):
        r, m = self.residue(cell), self.modulus(cell.level)
        nf = residue_normal_form(spec)
        if nf is not None:
            res, period = nf
            g = math.gcd(m, period)
            for s in sorted(res):
                if (s - r) % g == 0:
                    return Decision.yes(_crt(r, m, s, period), "residue classes intersect (CRT)")
            return Decision.no(reason=f"no residue compatible mod gcd({m},{period})={g}")
        if isinstance(spec, Squarefree):
            if not self._squarefree_meets(r, m):
                p = next(p for p in square_prime_divisors(m) if r % (p * p) == 0)
                return Decision.no(reason=f"{p * p} divides the modulus and every class element")
            x = self.representative(cell)
            for _ in range(_WITNESS_SCAN):
                if spec.contains(x):
                    return Decision.yes(x, "squarefree element found by scan")
                x += m
            return Decision.yes(None, "no p^2 divides both modulus and residue (CRT)")
        if isinstance(spec, FiniteSet):
            hits = sorted(e for e in spec.elements if isinstance(e, int) and e >= 1 and e % m == r)
            return Decision.yes(hits[0], "listed element") if hits else Decision.no(reason="no listed element")
        return None

    def specific_covers(self, cell, spec):
        r, m = self.residue(cell), self.modulus(cell.level)
        nf = residue_normal_form(spec)
        if nf is not None:
            res, period = nf
            g = math.gcd(m, period)
            for s in range(r % g, period, g):
                if s not in res:
                    return Decision.no(_crt(r, m, s, period), "class element outside the set")
            return Decision.yes(reason="every compatible residue belongs to the set")
        if isinstance(spec, Squarefree):
            return Decision.no(self._non_squarefree_member(r, m), "class contains a multiple of q^2, q coprime to the modulus")
        if isinstance(spec, FiniteSet):
            x = self.representative(cell)
            while x in spec.elements:
                x += m
            return Decision.no(x, "a residue class is infinite")
        return None

    def specific_closed_form(self, spec, level):
        if self._weights is not None:
            return None
        m = self.modulus(level)
        nf = residue_normal_form(spec)
        if nf is not None:
            res, period = nf
            g = math.gcd(m, period)
            per_class = [0] * g
            for s in res:
                per_class[s % g] += 1
            met = sum(1 for c in per_class if c)
            full = sum(1 for c in per_class if c == period // g)
            return Fraction(met, g), Fraction(full, g)
        if isinstance(spec, Squarefree):
            met = m
            for p in square_prime_divisors(m):
                met = met // (p * p) * (p * p - 1)
            return Fraction(met, m), Fraction(0)
        if isinstance(spec, FiniteSet):
            classes = {e % m for e in spec.elements if isinstance(e, int) and e >= 1}
            return Fraction(len(classes), m), Fraction(0)
        return None

    def complement_meets_every_cell(self, spec):
        # every class contains a multiple of q^2 for a prime q not dividing the modulus
        return isinstance(spec, Squarefree) and self._weights is None


class BuckFactorial(ResidueSystem):
    """Cells j - 1 + (n!), mass 1/n!."""

    system_id = "buck"

    def modulus(self, level):
        return factorial(level)


class PrimePower(ResidueSystem):
    def __init__(self, p: int, weights=None):
        if not isinstance(p, int) or p < 2:
            raise InvalidParameters(f"prime-power base must be >= 2, got {p!r}")
        super().__init__(weights)
        self.p = p
        self.system_id = f"prime-power({p})"

    def modulus(self, level):
        return self.p**level


class CantorSeries(ResidueSystem):
    """Cells b + (Q_n) for a Cantor base Q_1 = 1 | Q_2 | ..."""

    def __init__(self, base: CantorBase | Sequence[int], weights=None):
        super().__init__(weights)
        self.base = base if isinstance(base, CantorBase) else CantorBase.from_moduli(base)
        self.system_id = f"cantor-series({self.base.describe()})"

    def modulus(self, level):
        return self.base.modulus(level)

    def check_level(self, level):
        super().check_level(level)
        if self.base.length is not None and level > self.base.length:
            raise IncompatibleLevel(f"only {self.base.length} moduli are defined")
        return level


def point_mass_at_zero(system: ResidueSystem | None = None) -> ResidueSystem:
    """The factorial residue system with all mass on the class of 0 at every level."""
    weights = lambda level, r: 1 if r == 0 else 0  # noqa: E731
    if system is None or isinstance(system, BuckFactorial):
        out = BuckFactorial(weights)
        out.system_id = "buck-point-mass"
        return out
    if isinstance(system, PrimePower):
        out = PrimePower(system.p, weights)
    else:
        out = CantorSeries(system.base, weights)
    out.system_id += "-point-mass"
    return out


# -- intervals ------------------------------------------------------------------------


def _is_padic(q: Fraction, p: int) -> bool:
    d = q.denominator
    while d % p == 0:
        d //= p
    return d == 1


class JordanRational(DecompositionSystem):
    """Cells [(k-1)/L, k/L) of the rationals in [0, 1) at level L, mass 1/L.

    ``ground=p`` restricts the points to p-adic rationals. The default chain
    is L_k = k!; ``chain="naive"`` uses L_k = k, which does not refine.
    """

    def __init__(self, ground: int | None = None, chain: str = "factorial"):
        if ground is not None and (not isinstance(ground, int) or ground < 2):
            raise InvalidParameters(f"ground base must be >= 2, got {ground!r}")
        if chain not in ("factorial", "naive"):
            raise InvalidParameters(f"unknown chain {chain!r}")
        self.ground = ground
        self.chain_kind = chain
        self.system_id = "jordan" if ground is None else f"jordan({ground})"
        if chain == "naive":
            self.system_id += "-naive"

    def chain(self, k):
        return factorial(k) if self.chain_kind == "factorial" else k

    def cell_count(self, level):
        return self.check_level(level)

    def mass(self, cell):
        return Fraction(1, cell.level)

    def cell_bounds(self, cell: Cell) -> tuple[Fraction, Fraction]:
        return Fraction(cell.index - 1, cell.level), Fraction(cell.index, cell.level)

    def _point(self, x) -> Fraction:
        if isinstance(x, bool) or not isinstance(x, (int, Fraction)):
            raise PointOutsideGroundSet(f"{x!r} is not a rational")
        q = Fraction(x)
        if not 0 <= q < 1:
            raise PointOutsideGroundSet(f"{q} is outside [0, 1)")
        if self.ground is not None and not _is_padic(q, self.ground):
            raise PointOutsideGroundSet(f"{q} is not a {self.ground}-adic rational")
        return q

    def locate(self, point, level):
        q = self._point(point)
        level = self.check_level(level)
        return Cell(self.system_id, level, math.floor(q * level) + 1)

    def _first_point(self, lo: Fraction, hi: Fraction) -> Fraction | None:
        """Smallest ground point in [lo, hi), or None when the range is empty."""
        if lo >= hi:
            return None
        if self.ground is None or _is_padic(lo, self.ground):
            return lo
        den = 1
        while Fraction(1, den) >= hi - lo:
            den *= self.ground
        v = Fraction(math.ceil(lo * den), den)
        return v if v < hi else None

    def representative(self, cell):
        lo, hi = self.cell_bounds(cell)
        return self._first_point(lo, hi)

    def sample_points(self, cell):
        lo, hi = self.cell_bounds(cell)
        width = hi - lo
        seen = set()
        for den in count(1):
            if self.ground is not None:
                den = self.ground ** (den - 1)
            for a in range(den):
                x = lo + width * Fraction(a, den)
                if self.ground is not None:
                    x = self._first_point(x, hi)
                if x is not None and x not in seen:
                    seen.add(x)
                    yield x

    def cell_set(self, cell):
        return IntervalUnion.single(*self.cell_bounds(cell))

    def describe_cell(self, cell):
        lo, hi = self.cell_bounds(cell)
        ground = "ℚ" if self.ground is None else f"𝕁_{self.ground}"
        return f"[{lo},{hi})∩{ground}"

    def parse_cell(self, text):
        m = re.fullmatch(r"\s*\[\s*([0-9/]+)\s*,\s*([0-9/]+)\s*\)\s*(∩.*)?", text)
        if not m:
            raise InvalidParameters(f"not an interval cell: {text!r}")
        lo, hi = as_fraction(m.group(1)), as_fraction(m.group(2))
        width = hi - lo
        if width <= 0 or width.numerator != 1:
            raise InvalidParameters(f"{text!r} is not a cell of any level")
        level = width.denominator
        if lo * level != int(lo * level):
            raise InvalidParameters(f"{text!r} is not aligned to its level")
        return self.cell(level, int(lo * level) + 1)

    def cell_within(self, cell, coarse_level):
        lo, hi = self.cell_bounds(cell)
        j = math.floor(lo * coarse_level) + 1
        if hi > Fraction(j, coarse_level):
            return None
        return Cell(self.system_id, coarse_level, j)

    # -- oracles ----------------------------------------------------------------

    def specific_meets(self, cell, spec):
        nf = interval_normal_form(spec)
        if nf is not None:
            lo, hi = self.cell_bounds(cell)
            for c, d in nf.intervals:
                x = self._first_point(max(lo, c), min(hi, d))
                if x is not None:
                    return Decision.yes(x, "interval overlaps the cell")
            return Decision.no(reason="no interval overlaps the cell")
        if isinstance(spec, FiniteSet):
            hits = sorted(e for e in spec.elements if self._in_cell(cell, e))
            return Decision.yes(hits[0], "listed point") if hits else Decision.no(reason="no listed point")
        return None

    def specific_covers(self, cell, spec):
        nf = interval_normal_form(spec)
        if nf is not None:
            out = self.specific_meets(cell, nf.complement())
            if out.answer.value == "yes":
                return Decision.no(out.witness, "cell point outside the intervals")
            return Decision.yes(reason="cell inside one interval")
        return None

    def _in_cell(self, cell, e) -> bool:
        try:
            return self.locate(e, cell.level) == cell
        except PointOutsideGroundSet:
            return False

    def specific_closed_form(self, spec, level):
        nf = interval_normal_form(spec)
        if nf is not None:
            met: list[tuple[int, int]] = []
            inside = 0
            for c, d in nf.intervals:
                # cell k = [(k-1)/L, k/L) overlaps [c, d) iff floor(cL) < k <= ceil(dL)
                met.append((math.floor(c * level) + 1, math.ceil(d * level)))
                inside += max(0, math.floor(d * level) - math.ceil(c * level))
            met_count, last = 0, 0
            for a, b in sorted(met):
                a = max(a, last + 1)
                if b >= a:
                    met_count += b - a + 1
                    last = b
            return Fraction(met_count, level), Fraction(inside, level)
        if isinstance(spec, FiniteSet):
            cells = set()
            for e in spec.elements:
                try:
                    cells.add(self.locate(e, level))
                except PointOutsideGroundSet:
                    pass
            return Fraction(len(cells), level), Fraction(0)
        return None


# -- finite / cofinite ----------------------------------------------------------------


class FiniteCofinite(DecompositionSystem):
    """Level n: A_1 = {n, n+1, ...} with mass 1 and the singletons {1}, ..., {n-1} with mass 0.

    The mass is finitely additive on cell unions only because no two infinite
    cells from any levels are disjoint.
    """

    system_id = "finite-cofinite"

    def chain(self, k):
        return k

    def cell_count(self, level):
        return self.check_level(level)

    def mass(self, cell):
        return Fraction(1 if cell.index == 1 else 0)

    def uniform_mass(self, level):
        return Fraction(1) if level == 1 else None

    def locate(self, point, level):
        x = _natural_point(point)
        level = self.check_level(level)
        return Cell(self.system_id, level, 1 if x >= level else x + 1)

    def representative(self, cell):
        return cell.level if cell.index == 1 else cell.index - 1

    def sample_points(self, cell):
        if cell.index == 1:
            yield from count(cell.level)
        else:
            yield cell.index - 1

    def cell_is_finite(self, cell):
        return cell.index != 1

    def cell_set(self, cell):
        if cell.index == 1:
            return Complement(FiniteSet(frozenset(range(1, cell.level))))
        return FiniteSet(frozenset({cell.index - 1}))

    def describe_cell(self, cell):
        if cell.index == 1:
            return f"{{{cell.level},...}}@{cell.level}"
        return f"{{{cell.index - 1}}}@{cell.level}"

    def parse_cell(self, text):
        m = re.fullmatch(r"\s*\{(\d+)(,\.\.\.)?\}@(\d+)\s*", text)
        if not m:
            raise InvalidParameters(f"not a finite/cofinite cell: {text!r}")
        v, tail, level = int(m.group(1)), m.group(2), int(m.group(3))
        if tail:
            if v != level:
                raise InvalidParameters(f"tail cell must start at its level: {text!r}")
            return self.cell(level, 1)
        if not 1 <= v < level:
            raise InvalidParameters(f"singleton {v} is not a cell at level {level}")
        return self.cell(level, v + 1)

    def cell_within(self, cell, coarse_level):
        if cell.index == 1:
            return Cell(self.system_id, coarse_level, 1) if cell.level >= coarse_level else None
        return self.locate(cell.index - 1, coarse_level)

    def specific_meets(self, cell, spec):
        if isinstance(spec, FiniteSet):
            hits = sorted(e for e in spec.elements if isinstance(e, int) and e >= 1 and self.locate(e, cell.level) == cell)
            return Decision.yes(hits[0], "listed element") if hits else Decision.no(reason="no listed element")
        return None

    def specific_covers(self, cell, spec):
        if isinstance(spec, FiniteSet) and cell.index == 1:
            x = cell.level
            while x in spec.elements:
                x += 1
            return Decision.no(x, "the tail cell is infinite")
        return None

    def complement_meets_every_cell(self, spec):
        return False


# -- free abelian group on the primes --------------------------------------------------


def _box_constraints(spec: SetSpec) -> dict[int, list[tuple[frozenset, int]]] | None:
    """Per-coordinate constraints of a conjunction of exponent boxes, or None."""
    if isinstance(spec, Full):
        return {}
    if isinstance(spec, ExponentBox):
        out: dict[int, list] = {}
        for i, allowed, m in spec.constraints:
            out.setdefault(i, []).append((allowed, m))
        return out
    if isinstance(spec, Intersection):
        out = {}
        for part in spec.parts:
            sub = _box_constraints(part)
            if sub is None:
                return None
            for i, cs in sub.items():
                out.setdefault(i, []).extend(cs)
        return out
    return None


class _CoordSet:
    """Subset of a coordinate domain given by congruence and exact-value constraints.

    ``domain`` is None for all integers or a finite range(g)."""

    def __init__(self, constraints: list[tuple[frozenset, int]], domain: int | None):
        self.domain = domain
        exact = [set(a) for a, m in constraints if m == 0]
        congr = [(a, m) for a, m in constraints if m]
        self.period = math.lcm(*[m for _, m in congr]) if congr else 1
        self.residues = frozenset(
            r for r in range(self.period) if all(r % m in a for a, m in congr)
        )
        if exact or domain is not None:
            pool = set.intersection(*exact) if exact else set(range(domain))
            if domain is not None:
                pool = {v for v in pool if 0 <= v < domain}
            self.finite: frozenset | None = frozenset(v for v in pool if v % self.period in self.residues)
        else:
            self.finite = None

    def is_empty(self) -> bool:
        return not self.finite if self.finite is not None else not self.residues

    def is_everything(self) -> bool:
        if self.finite is not None:
            return self.domain is not None and len(self.finite) == self.domain
        return len(self.residues) == self.period

    def member(self) -> int | None:
        if self.finite is not None:
            return min(self.finite, default=None)
        return min(self.residues, default=None)

    def class_member(self, j: int, n: int) -> int | None:
        """A member congruent to j mod n, or None."""
        if self.finite is not None:
            return min((v for v in self.finite if (v - j) % n == 0), default=None)
        g = math.gcd(n, self.period)
        for r in sorted(self.residues):
            if (r - j) % g == 0:
                return _crt(j, n, r, self.period) if n > 1 or self.period > 1 else r
        return None

    def class_covered(self, j: int, n: int) -> bool:
        if self.finite is not None:
            return False  # integer classes are infinite
        g = math.gcd(n, self.period)
        return all(s in self.residues for s in range(j % g, self.period, g))


class FreeGroupCoset(DecompositionSystem):
    """Positive rationals modulo H_n: exponents of the first n primes reduced mod n.

    Level n has n^n cosets of mass 1/n^n; the chain is n_k = k!. Points whose
    support leaves the first ``window`` primes are rejected.
    """

    def __init__(self, window: int = PRIME_WINDOW):
        self.prime_window = window
        self.system_id = "free-group"

    def chain(self, k):
        return factorial(k)

    def check_level(self, level):
        super().check_level(level)
        if level > self.prime_window:
            raise IncompatibleLevel(f"level {level} exceeds the prime window {self.prime_window}")
        return level

    def cell_count(self, level):
        return self.check_level(level) ** level

    def mass(self, cell):
        return Fraction(1, cell.level**cell.level)

    def exponents_of(self, point) -> dict[int, int]:
        if isinstance(point, bool) or not isinstance(point, (int, Fraction)) or point <= 0:
            raise PointOutsideGroundSet(f"{point!r} is not a positive rational")
        q = Fraction(point)
        allowed = {nth_prime(i): i for i in range(1, self.prime_window + 1)}
        out: dict[int, int] = {}
        for part, sign in ((q.numerator, 1), (q.denominator, -1)):
            for p, e in factorint(part).items():
                if p not in allowed:
                    raise InvalidParameters(f"prime {p} lies outside the window of {self.prime_window} primes")
                out[allowed[p]] = out.get(allowed[p], 0) + sign * e
        return out

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
        level = self.check_level(level)
        exps = self.exponents_of(point)
        return Cell(self.system_id, level, self._index([exps.get(i, 0) for i in range(1, level + 1)], level))

    def _element(self, exps: dict[int, int]) -> Fraction:
        q = Fraction(1)
        for i, e in exps.items():
            q *= Fraction(nth_prime(i)) ** e
        return q

    def representative(self, cell):
        return self._element(dict(enumerate(self.coset_exponents(cell), 1)))

    def sample_points(self, cell):
        n = cell.level
        base = self.coset_exponents(cell)
        extra = n + 1 if n < self.prime_window else None
        for shift in product(range(-1, 2), repeat=n):
            for e in (0, 1, -1):
                if e and extra is None:
                    continue
                exps = {i + 1: base[i] + n * shift[i] for i in range(n)}
                if e:
                    exps[extra] = e
                yield self._element(exps)

    def cell_set(self, cell):
        return ExponentBox.congruences(dict(enumerate(self.coset_exponents(cell), 1)), cell.level)

    def describe_cell(self, cell):
        exps = ",".join(map(str, self.coset_exponents(cell)))
        return f"[{exps}]H_{cell.level}"

    def parse_cell(self, text):
        m = re.fullmatch(r"\s*\[([0-9,\s]*)\]H_(\d+)\s*", text)
        if not m:
            raise InvalidParameters(f"not a coset cell: {text!r}")
        n = int(m.group(2))
        exps = [int(v) for v in m.group(1).split(",") if v.strip()]
        if len(exps) != n or any(not 0 <= e < n for e in exps):
            raise InvalidParameters(f"coset exponents must be {n} values in [0,{n})")
        return self.cell(n, self._index(exps, n))

    def cell_within(self, cell, coarse_level):
        n = cell.level
        if n % coarse_level:
            return None
        return Cell(self.system_id, coarse_level, self._index(self.coset_exponents(cell)[:coarse_level], coarse_level))

    # -- oracles ----------------------------------------------------------------

    def _coords(self, spec, n) -> tuple[list[_CoordSet], list[_CoordSet]] | None:
        cons = _box_constraints(spec)
        if cons is None:
            return None
        head = [_CoordSet(cons.get(i, []), None) for i in range(1, n + 1)]
        beyond = [_CoordSet(c, None) for i, c in sorted(cons.items()) if i > n]
        return head, beyond

    def _order_witness(self, cell, at_most_one: bool) -> Fraction:
        n = cell.level
        if n >= self.prime_window:
            raise IncompatibleLevel("no free generator beyond the level inside the prime window")
        q = Fraction(self.representative(cell))
        p = nth_prime(n + 1)
        while (q <= 1) != at_most_one:
            q = q / p if at_most_one else q * p
        return q

    def specific_meets(self, cell, spec):
        if isinstance(spec, (OrderIntervalAtMostOne, OrderIntervalAboveOne)):
            w = self._order_witness(cell, isinstance(spec, OrderIntervalAtMostOne))
            return Decision.yes(w, "powers of the next prime move the representative across 1")
        coords = self._coords(spec, cell.level)
        if coords is None:
            return None
        head, beyond = coords
        exps: dict[int, int] = {}
        for i, (c, j) in enumerate(zip(head, self.coset_exponents(cell)), 1):
            v = c.class_member(j, cell.level)
            if v is None:
                return Decision.no(reason=f"coordinate {i} has no allowed exponent = {j} mod {cell.level}")
            exps[i] = v
        cons = _box_constraints(spec)
        for i in sorted(k for k in cons if k > cell.level):
            v = _CoordSet(cons[i], None).member()
            if v is None:
                return Decision.no(reason=f"coordinate {i} admits no exponent")
            exps[i] = v
        return Decision.yes(self._element(exps), "per-coordinate congruences are solvable")

    def specific_covers(self, cell, spec):
        if isinstance(spec, (OrderIntervalAtMostOne, OrderIntervalAboveOne)):
            w = self._order_witness(cell, not isinstance(spec, OrderIntervalAtMostOne))
            return Decision.no(w, "powers of the next prime move the representative across 1")
        coords = self._coords(spec, cell.level)
        if coords is None:
            return None
        head, beyond = coords
        ok = all(c.class_covered(j, cell.level) for c, j in zip(head, self.coset_exponents(cell)))
        if ok and all(c.is_everything() for c in beyond):
            return Decision.yes(reason="every coordinate class lies in the constraint")
        return self._search_covers(cell, spec)

    def specific_closed_form(self, spec, level):
        if isinstance(spec, (OrderIntervalAtMostOne, OrderIntervalAboveOne)):
            return Fraction(1), Fraction(0)
        coords = self._coords(spec, level)
        if coords is None:
            return None
        head, beyond = coords
        n = level
        met = math.prod(sum(1 for j in range(n) if c.class_member(j, n) is not None) for c in head)
        inside = math.prod(sum(1 for j in range(n) if c.class_covered(j, n)) for c in head)
        if any(c.is_empty() for c in beyond):
            met = 0
        if not all(c.is_everything() for c in beyond):
            inside = 0
        total = n**n
        return Fraction(met, total), Fraction(inside, total)


# -- products of finite cyclic groups ---------------------------------------------


class ProductGroups(DecompositionSystem):
    """Finitely supported digit tuples (d_1, d_2, ...) with 0 <= d_i < g_i.

    Level-n cells fix d_1..d_n, with mass 1/(g_1 ... g_n). The order list
    repeats its last entry beyond its length.
    """

    def __init__(self, orders: Sequence[int]):
        orders = tuple(int(g) for g in orders)
        if not orders or any(g < 2 for g in orders):
            raise InvalidParameters("group orders must be >= 2")
        self.orders = orders
        self.system_id = "product(" + ",".join(map(str, orders)) + ")"

    def order(self, i: int) -> int:
        return self.orders[min(i, len(self.orders)) - 1]

    def chain(self, k):
        return k

    def cell_count(self, level):
        self.check_level(level)
        return math.prod(self.order(i) for i in range(1, level + 1))

    def mass(self, cell):
        return Fraction(1, self.cell_count(cell.level))

    def _point(self, x) -> tuple[int, ...]:
        if not isinstance(x, tuple) or any(not isinstance(d, int) or isinstance(d, bool) for d in x):
            raise PointOutsideGroundSet(f"{x!r} is not a digit tuple")
        for i, d in enumerate(x, 1):
            if not 0 <= d < self.order(i):
                raise PointOutsideGroundSet(f"digit {d} at coordinate {i} outside [0,{self.order(i)})")
        while x and x[-1] == 0:
            x = x[:-1]
        return x

    def digits_of(self, cell: Cell) -> tuple[int, ...]:
        j = cell.index - 1
        out = []
        for i in range(1, cell.level + 1):
            j, d = divmod(j, self.order(i))
            out.append(d)
        return tuple(out)

    def _index(self, digits: Sequence[int]) -> int:
        idx, scale = 0, 1
        for i, d in enumerate(digits, 1):
            idx += d * scale
            scale *= self.order(i)
        return idx + 1

    def locate(self, point, level):
        x = self._point(point)
        level = self.check_level(level)
        digits = [x[i] if i < len(x) else 0 for i in range(level)]
        return Cell(self.system_id, level, self._index(digits))

    def representative(self, cell):
        return self._point(self.digits_of(cell))

    def sample_points(self, cell):
        base = self.digits_of(cell)
        n = cell.level
        for tail in product(*(range(self.order(i)) for i in range(n + 1, n + 3))):
            yield self._point(base + tail)

    def cell_set(self, cell):
        return ExponentBox(tuple((i, frozenset({d}), 0) for i, d in enumerate(self.digits_of(cell), 1)))

    def describe_cell(self, cell):
        return "(" + ",".join(map(str, self.digits_of(cell))) + ",*)"

    def parse_cell(self, text):
        m = re.fullmatch(r"\s*\(([0-9,\s]*?),?\s*\*\)\s*", text)
        if not m:
            raise InvalidParameters(f"not a product cell: {text!r}")
        digits = [int(v) for v in m.group(1).split(",") if v.strip()]
        if not digits:
            raise InvalidParameters("a cell fixes at least one coordinate")
        for i, d in enumerate(digits, 1):
            if not 0 <= d < self.order(i):
                raise InvalidParameters(f"digit {d} at coordinate {i} out of range")
        return self.cell(len(digits), self._index(digits))

    def cell_within(self, cell, coarse_level):
        if coarse_level > cell.level:
            return None
        return Cell(self.system_id, coarse_level, self._index(self.digits_of(cell)[:coarse_level]))

    def _allowed(self, cons, i) -> _CoordSet:
        return _CoordSet(cons.get(i, []), self.order(i))

    def specific_meets(self, cell, spec):
        cons = _box_constraints(spec)
        if cons is None:
            return None
        digits = list(self.digits_of(cell))
        for i, d in enumerate(digits, 1):
            if d not in self._allowed(cons, i).finite:
                return Decision.no(reason=f"digit {d} at coordinate {i} is excluded")
        for i in sorted(k for k in cons if k > cell.level):
            v = self._allowed(cons, i).member()
            if v is None:
                return Decision.no(reason=f"coordinate {i} admits no digit")
            digits += [0] * (i - len(digits))
            digits[i - 1] = v
        return Decision.yes(self._point(tuple(digits)), "digits satisfy every constraint")

    def specific_covers(self, cell, spec):
        cons = _box_constraints(spec)
        if cons is None:
            return None
        digits = list(self.digits_of(cell))
        for i, d in enumerate(digits, 1):
            if d not in self._allowed(cons, i).finite:
                return Decision.no(self._point(tuple(digits)), f"digit {d} at coordinate {i} is excluded")
        for i in sorted(k for k in cons if k > cell.level):
            c = self._allowed(cons, i)
            if not c.is_everything():
                bad = min(set(range(self.order(i))) - c.finite)
                digits += [0] * (i - len(digits))
                digits[i - 1] = bad
                return Decision.no(self._point(tuple(digits)), f"coordinate {i} excludes digit {bad}")
        return Decision.yes(reason="fixed digits allowed and free coordinates unconstrained")

    def specific_closed_form(self, spec, level):
        cons = _box_constraints(spec)
        if cons is None:
            return None
        met = math.prod(len(self._allowed(cons, i).finite) for i in range(1, level + 1))
        inside = met
        for i in (k for k in cons if k > level):
            c = self._allowed(cons, i)
            if c.is_empty():
                met = 0
            if not c.is_everything():
                inside = 0
        total = self.cell_count(level)
        return Fraction(met, total), Fraction(inside, total)


# -- construction and descriptors -------------------------------------------------------


def build_system(kind: str, **params) -> DecompositionSystem:
    """Construct a system from its kind name and parameters."""
    if kind == "buck":
        return BuckFactorial()
    if kind == "prime-power":
        return PrimePower(params.get("p", 2))
    if kind == "cantor-series":
        if "moduli" in params:
            return CantorSeries(CantorBase.from_moduli(params["moduli"]))
        if "base" in params:
            return CantorSeries(CantorBase.geometric(params["base"]))
        return CantorSeries(CantorBase.factorial())
    if kind == "jordan":
        return JordanRational(params.get("ground"), params.get("chain", "factorial"))
    if kind == "finite-cofinite":
        return FiniteCofinite()
    if kind == "free-group":
        return FreeGroupCoset(params.get("window", PRIME_WINDOW))
    if kind == "product":
        return ProductGroups(params["orders"])
    if kind == "divisor":
        from .divisor import DivisorCosetSystem

        return DivisorCosetSystem()
    raise InvalidParameters(f"unknown system kind {kind!r}")


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise InvalidParameters(f"expected comma-separated integers, got {text!r}") from exc


def parse_system(text: str) -> DecompositionSystem:
    """Parse descriptors such as ``buck``, ``prime-power:2``, ``jordan:2``,
    ``jordan-naive``, ``cantor-series:1,2,6,24``, ``cantor-series:geometric:3``,
    ``product:2,3``, ``free-group`` and ``divisor``."""
    name, _, arg = text.strip().partition(":")
    if name == "prime-power":
        return build_system(name, p=int(arg or 2))
    if name in ("jordan", "jordan-naive"):
        chain = "naive" if name == "jordan-naive" else "factorial"
        return build_system("jordan", ground=int(arg) if arg else None, chain=chain)
    if name == "cantor-series":
        if arg.startswith("geometric:"):
            return build_system(name, base=int(arg.split(":", 1)[1]))
        if arg in ("", "factorial"):
            return build_system(name)
        return build_system(name, moduli=_ints(arg))
    if name == "product":
        return build_system(name, orders=_ints(arg))
    if arg:
        raise InvalidParameters(f"system {name!r} takes no parameters")
    return build_system(name)


def system_to_json(system: DecompositionSystem) -> dict:
    if isinstance(system, BuckFactorial):
        return {"kind": "buck"}
    if isinstance(system, PrimePower):
        return {"kind": "prime-power", "p": system.p}
    if isinstance(system, CantorSeries):
        b = system.base
        if b.kind == "geometric":
            return {"kind": "cantor-series", "base": b.base}
        if b.kind == "factorial":
            return {"kind": "cantor-series"}
        return {"kind": "cantor-series", "moduli": list(b.moduli)}
    if isinstance(system, JordanRational):
        out = {"kind": "jordan", "chain": system.chain_kind}
        if system.ground is not None:
            out["ground"] = system.ground
        return out
    if isinstance(system, FiniteCofinite):
        return {"kind": "finite-cofinite"}
    if isinstance(system, FreeGroupCoset):
        return {"kind": "free-group", "window": system.prime_window}
    if isinstance(system, ProductGroups):
        return {"kind": "product", "orders": list(system.orders)}
    from .divisor import DivisorCosetSystem

    if isinstance(system, DivisorCosetSystem):
        return {"kind": "divisor"}
    raise InvalidParameters(f"no JSON encoding for {system!r}")


def system_from_json(obj: dict) -> DecompositionSystem:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise InvalidParameters("system JSON needs a 'kind' field")
    params = {k: v for k, v in obj.items() if k != "kind"}
    return build_system(obj["kind"], **params)


__all__ = [
    "ResidueSystem",
    "BuckFactorial",
    "PrimePower",
    "CantorSeries",
    "point_mass_at_zero",
    "JordanRational",
    "FiniteCofinite",
    "FreeGroupCoset",
    "ProductGroups",
    "build_system",
    "parse_system",
    "system_to_json",
    "system_from_json",
]
