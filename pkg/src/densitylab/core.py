"""Generic engine for decomposition systems.

A decomposition system partitions a ground set, level by level, into finitely
many cells carrying rational masses. Everything here is written against the
abstract :class:`DecompositionSystem`; concrete systems live in
:mod:`densitylab.systems` and :mod:`densitylab.divisor`.

Levels are the system's own partition indices. Each system also declares a
refinement chain ``chain(k)``: along chain levels every cell is an exact
union of cells one chain step further, so level values of the outer density
are nonincreasing there.
"""

from __future__ import annotations

import enum
import random
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterable, Iterator

from .errors import (
    IncompatibleLevel,
    InvalidParameters,
    LevelIntractable,
    OracleInconclusive,
    RepresentativeUnavailable,
)
from .exact import default_budget
from .sets import Complement, Empty, Full, Intersection, SetSpec, Union

SEARCH_LIMIT = 256


class Answer(enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Decision:
    """Three-valued oracle answer. ``witness`` is a point supporting the answer:
    a member for meets-yes, a non-member for covers-no."""

    answer: Answer
    witness: object = None
    reason: str = ""

    @classmethod
    def yes(cls, witness=None, reason=""):
        return cls(Answer.YES, witness, reason)

    @classmethod
    def no(cls, witness=None, reason=""):
        return cls(Answer.NO, witness, reason)

    @classmethod
    def unknown(cls, reason=""):
        return cls(Answer.UNKNOWN, None, reason)

    def __bool__(self):
        raise TypeError("Decision is three-valued; compare .answer explicitly")


@dataclass(frozen=True, order=True)
class Cell:
    system_id: str
    level: int
    index: int  # 1-based


@dataclass(frozen=True)
class DensityEstimate:
    value: Fraction
    level: int
    mode: str  # "exact-closed-form", "exhaustive" or "sampled"
    is_upper_approximation: bool = True
    samples: int | None = None
    seed: int | None = None
    cells_met: int | None = None

    @property
    def value_float(self) -> float:
        return float(self.value)


@dataclass(frozen=True)
class MeasurabilityReport:
    outer: DensityEstimate
    complement_outer: DensityEstimate
    defect: Fraction
    verdict: str  # "defect-zero-at-level" or "defect-positive-at-level"
    complement_limit: Fraction | None = None  # certified limit of the complement, if known


@dataclass(frozen=True)
class RiemannSum:
    value: Fraction | float
    level: int
    lower: Fraction | float | None = None
    upper: Fraction | float | None = None


@dataclass(frozen=True)
class CheckReport:
    """Outcome of a structural check; ``violations`` are human-readable."""

    name: str
    passed: bool
    checked: int
    violations: tuple[str, ...] = ()
    details: dict = field(default_factory=dict)


@dataclass(frozen=True)
class PreservationRow:
    cell: str
    mass: Fraction
    image_outer: Fraction
    slack: Fraction


@dataclass(frozen=True)
class PreservationReport:
    map_name: str
    level: int
    target_level: int
    rows: tuple[PreservationRow, ...]

    @property
    def passed(self) -> bool:
        return all(r.slack >= 0 for r in self.rows)

    @property
    def worst_slack(self) -> Fraction:
        return min(r.slack for r in self.rows)

    @property
    def max_slack(self) -> Fraction:
        return max(r.slack for r in self.rows)


class DecompositionSystem(ABC):
    """A countable family of finite partitions with rational cell masses."""

    system_id: str = "abstract"

    # -- structure ------------------------------------------------------------

    @abstractmethod
    def cell_count(self, level: int) -> int: ...

    @abstractmethod
    def mass(self, cell: Cell) -> Fraction: ...

    @abstractmethod
    def locate(self, point, level: int) -> Cell: ...

    @abstractmethod
    def chain(self, k: int) -> int:
        """Level of the k-th chain step (k >= 1)."""

    @abstractmethod
    def representative(self, cell: Cell):
        """A canonical point of the cell (its "first element")."""

    @abstractmethod
    def sample_points(self, cell: Cell) -> Iterator:
        """Points of the cell, in a fixed order, for witness searches."""

    @abstractmethod
    def cell_set(self, cell: Cell) -> SetSpec:
        """The cell as a set description."""

    @abstractmethod
    def describe_cell(self, cell: Cell) -> str: ...

    @abstractmethod
    def parse_cell(self, text: str) -> Cell: ...

    def cell_within(self, cell: Cell, coarse_level: int) -> Cell | None:
        """The coarse-level cell containing ``cell``, or None if it straddles."""
        rep = self.representative(cell)
        return self.locate(rep, coarse_level)

    def check_level(self, level: int) -> int:
        if not isinstance(level, int) or isinstance(level, bool) or level < 1:
            raise IncompatibleLevel(f"levels are positive integers, got {level!r}")
        return level

    def cell(self, level: int, index: int) -> Cell:
        self.check_level(level)
        if not 1 <= index <= self.cell_count(level):
            raise InvalidParameters(f"cell index {index} out of range at level {level}")
        return Cell(self.system_id, level, index)

    def cells(self, level: int) -> Iterator[Cell]:
        self.check_level(level)
        for j in range(1, self.cell_count(level) + 1):
            yield Cell(self.system_id, level, j)

    def uniform_mass(self, level: int) -> Fraction | None:
        """Common mass of all level cells when the level is uniform."""
        return Fraction(1, self.cell_count(level))

    def contains_point(self, cell: Cell, point) -> bool:
        return self.locate(point, cell.level) == cell

    def window(self, level: int) -> int | None:
        """Generator window passed to window-relative set descriptions."""
        return None

    # -- oracles --------------------------------------------------------------

    def specific_meets(self, cell: Cell, spec: SetSpec) -> Decision | None:
        """System-specific decision, or None to fall through."""
        return None

    def specific_covers(self, cell: Cell, spec: SetSpec) -> Decision | None:
        return None

    def closed_form(self, spec: SetSpec, level: int) -> tuple[Fraction, Fraction] | None:
        """(mass of cells meeting spec, mass of cells inside spec), or None."""
        if isinstance(spec, Full):
            return Fraction(1), Fraction(1)
        if isinstance(spec, Empty):
            return Fraction(0), Fraction(0)
        if isinstance(spec, Complement):
            inner = self.closed_form(spec.of, level)
            if inner is None:
                return None
            return 1 - inner[1], 1 - inner[0]
        return self.specific_closed_form(spec, level)

    def specific_closed_form(self, spec: SetSpec, level: int) -> tuple[Fraction, Fraction] | None:
        return None

    def cell_is_finite(self, cell: Cell) -> bool:
        """True when sample_points enumerates the whole cell."""
        return False

    def complement_meets_every_cell(self, spec: SetSpec) -> bool:
        """True when the complement of ``spec`` provably meets every cell at every level."""
        return False

    def meets(self, cell: Cell, spec: SetSpec) -> Decision:
        d = self.specific_meets(cell, spec)
        if d is not None:
            return d
        if isinstance(spec, Full):
            return Decision.yes(self.representative(cell), "whole ground set")
        if isinstance(spec, Empty):
            return Decision.no(reason="empty set")
        if isinstance(spec, Complement):
            c = self.covers(cell, spec.of)
            if c.answer is Answer.YES:
                return Decision.no(reason=f"cell inside the complemented set ({c.reason})")
            if c.answer is Answer.NO:
                return Decision.yes(c.witness, c.reason)
            return Decision.unknown(c.reason)
        if isinstance(spec, Union):
            return _any(self.meets(cell, p) for p in spec.parts)
        return self._search_meets(cell, spec)

    def covers(self, cell: Cell, spec: SetSpec) -> Decision:
        d = self.specific_covers(cell, spec)
        if d is not None:
            return d
        if isinstance(spec, Full):
            return Decision.yes(reason="whole ground set")
        if isinstance(spec, Empty):
            return Decision.no(self.representative(cell), "empty set")
        if isinstance(spec, Complement):
            m = self.meets(cell, spec.of)
            if m.answer is Answer.YES:
                return Decision.no(m.witness, m.reason)
            if m.answer is Answer.NO:
                return Decision.yes(reason=f"cell disjoint from the complemented set ({m.reason})")
            return Decision.unknown(m.reason)
        if isinstance(spec, Intersection):
            return _all(self.covers(cell, p) for p in spec.parts)
        return self._search_covers(cell, spec)

    def _search(self, cell, test) -> tuple[object, bool]:
        """First cell point passing ``test`` (or None) and whether the search was complete."""
        w = self.window(cell.level)
        for i, x in enumerate(self.sample_points(cell)):
            if i >= SEARCH_LIMIT:
                return None, False
            if test(x, w):
                return x, True
        return None, self.cell_is_finite(cell)

    def _search_meets(self, cell, spec) -> Decision:
        x, complete = self._search(cell, spec.contains)
        if x is not None:
            return Decision.yes(x, "witness found by search")
        if complete:
            return Decision.no(reason="finite cell checked point by point")
        return Decision.unknown(f"no witness among {SEARCH_LIMIT} cell points")

    def _search_covers(self, cell, spec) -> Decision:
        x, complete = self._search(cell, lambda y, w: not spec.contains(y, w))
        if x is not None:
            return Decision.no(x, "counter-witness found by search")
        if complete:
            return Decision.yes(reason="finite cell checked point by point")
        return Decision.unknown(f"no counter-witness among {SEARCH_LIMIT} cell points")

    def descriptor(self) -> str:
        return self.system_id


def _any(decisions: Iterable[Decision]) -> Decision:
    unknown = None
    for d in decisions:
        if d.answer is Answer.YES:
            return d
        if d.answer is Answer.UNKNOWN:
            unknown = d
    return unknown or Decision.no(reason="no part meets the cell")


def _all(decisions: Iterable[Decision]) -> Decision:
    unknown = None
    for d in decisions:
        if d.answer is Answer.NO:
            return d
        if d.answer is Answer.UNKNOWN:
            unknown = d
    return unknown or Decision.yes(reason="every part covers the cell")


# -- level resolution ----------------------------------------------------------


def resolve_level(system: DecompositionSystem, level: int | None, chain_index: int | None) -> int:
    if (level is None) == (chain_index is None):
        raise InvalidParameters("give exactly one of level and chain_index")
    if chain_index is not None:
        if chain_index < 1:
            raise InvalidParameters("chain indices start at 1")
        return system.chain(chain_index)
    return system.check_level(level)


# -- outer density --------------------------------------------------------------


def outer_density(
    system: DecompositionSystem,
    spec: SetSpec,
    level: int | None = None,
    *,
    chain_index: int | None = None,
    mode: str = "auto",
    budget: int | None = None,
    samples: int | None = None,
    seed: int | None = None,
) -> DensityEstimate:
    """Level value of the outer density: total mass of cells meeting ``spec``.

    ``mode`` is "auto" (closed form, else exhaustive within budget, else
    sampled when ``samples`` is given), "closed", "exhaustive" or "sampled".
    """
    level = resolve_level(system, level, chain_index)
    budget = default_budget() if budget is None else budget
    if mode not in ("auto", "closed", "exhaustive", "sampled"):
        raise InvalidParameters(f"unknown mode {mode!r}")

    if mode in ("auto", "closed"):
        cf = system.closed_form(spec, level)
        if cf is not None:
            return DensityEstimate(cf[0], level, "exact-closed-form")
        if mode == "closed":
            raise LevelIntractable(f"no closed form for this set on {system.descriptor()}")

    count = system.cell_count(level)
    if mode == "exhaustive" or (mode == "auto" and count <= budget):
        if count > budget:
            raise LevelIntractable(f"{count} cells at level {level} exceed the budget {budget}")
        total, met = Fraction(0), 0
        for cell in system.cells(level):
            d = system.meets(cell, spec)
            if d.answer is Answer.UNKNOWN:
                raise OracleInconclusive(f"cannot decide {system.describe_cell(cell)}: {d.reason}")
            if d.answer is Answer.YES:
                total += system.mass(cell)
                met += 1
        return DensityEstimate(total, level, "exhaustive", cells_met=met)

    if samples is None:
        raise LevelIntractable(
            f"{count} cells at level {level} exceed the budget {budget}; supply samples and a seed"
        )
    return _sampled_outer(system, spec, level, samples, seed)


def _sampled_outer(system, spec, level, samples, seed) -> DensityEstimate:
    if samples < 1:
        raise InvalidParameters("samples must be positive")
    if seed is None:
        raise InvalidParameters("sampled mode needs a seed")
    rng = random.Random(seed)
    count = system.cell_count(level)
    acc, met = Fraction(0), 0
    for _ in range(samples):
        cell = Cell(system.system_id, level, rng.randrange(count) + 1)
        # unknown counts as met so the estimate stays on the high side
        if system.meets(cell, spec).answer is not Answer.NO:
            acc += system.mass(cell)
            met += 1
    value = acc * count / samples
    return DensityEstimate(value, level, "sampled", False, samples, seed, met)


def inner_density(system: DecompositionSystem, spec: SetSpec, level: int, budget: int | None = None) -> Fraction:
    """Total mass of level cells contained in ``spec``."""
    cf = system.closed_form(spec, level)
    if cf is not None:
        return cf[1]
    budget = default_budget() if budget is None else budget
    if system.cell_count(level) > budget:
        raise LevelIntractable(f"level {level} exceeds the budget {budget}")
    total = Fraction(0)
    for cell in system.cells(level):
        d = system.covers(cell, spec)
        if d.answer is Answer.UNKNOWN:
            raise OracleInconclusive(f"cannot decide {system.describe_cell(cell)}: {d.reason}")
        if d.answer is Answer.YES:
            total += system.mass(cell)
    return total


def measurability_report(
    system: DecompositionSystem,
    spec: SetSpec,
    level: int | None = None,
    *,
    chain_index: int | None = None,
    mode: str = "auto",
    budget: int | None = None,
) -> MeasurabilityReport:
    level = resolve_level(system, level, chain_index)
    outer = outer_density(system, spec, level, mode=mode, budget=budget)
    comp = outer_density(system, Complement(spec), level, mode=mode, budget=budget)
    defect = outer.value + comp.value - 1
    verdict = "defect-zero-at-level" if defect == 0 else "defect-positive-at-level"
    limit = Fraction(1) if system.complement_meets_every_cell(spec) else None
    return MeasurabilityReport(outer, comp, defect, verdict, limit)


# -- metric ----------------------------------------------------------------------


def metric_rho(system: DecompositionSystem, x, y, truncation: int) -> Fraction:
    """sum_{k <= N} psi_k(x, y) / 2^k with psi_k = 0 iff x, y share the chain-level-k cell."""
    if truncation < 1:
        raise InvalidParameters("truncation must be positive")
    total = Fraction(0)
    for k in range(1, truncation + 1):
        level = system.chain(k)
        if system.locate(x, level) != system.locate(y, level):
            total += Fraction(1, 2**k)
    return total


def share_cells(system: DecompositionSystem, x, y, depth: int) -> bool:
    """Do x and y lie in a common cell at chain levels 1..depth?"""
    return all(system.locate(x, system.chain(k)) == system.locate(y, system.chain(k)) for k in range(1, depth + 1))


# -- Riemann sums ------------------------------------------------------------------


def riemann_integral(
    system: DecompositionSystem,
    f: Callable | SetSpec,
    level: int | None = None,
    *,
    chain_index: int | None = None,
    representatives: str | list = "first",
    monotone: bool = False,
    budget: int | None = None,
) -> RiemannSum:
    """Sum of mass(cell) * f(representative) over the level cells.

    ``f`` may be a set description, read as its indicator; lower and upper
    sums then come from the inside/meets oracles. With ``monotone=True`` on an
    interval system the lower/upper pair uses cell endpoints (f nondecreasing).
    """
    level = resolve_level(system, level, chain_index)
    budget = default_budget() if budget is None else budget
    count = system.cell_count(level)
    if count > budget:
        raise LevelIntractable(f"{count} cells at level {level} exceed the budget {budget}")
    if isinstance(representatives, list):
        if len(representatives) != count:
            raise RepresentativeUnavailable(f"need {count} representatives, got {len(representatives)}")
        reps = representatives
        for cell, r in zip(system.cells(level), reps):
            if not system.contains_point(cell, r):
                raise RepresentativeUnavailable(f"{r!r} is not in {system.describe_cell(cell)}")
    elif representatives == "first":
        reps = [system.representative(c) for c in system.cells(level)]
    else:
        raise InvalidParameters(f"unknown representative rule {representatives!r}")

    if isinstance(f, SetSpec):
        w = system.window(level)
        value = sum(
            (system.mass(c) for c, r in zip(system.cells(level), reps) if f.contains(r, w)), Fraction(0)
        )
        lower = inner_density(system, f, level, budget)
        upper = outer_density(system, f, level, budget=budget).value
        return RiemannSum(value, level, lower, upper)

    value = sum((system.mass(c) * f(r) for c, r in zip(system.cells(level), reps)), Fraction(0))
    lower = upper = None
    if monotone:
        bounds = getattr(system, "cell_bounds", None)
        if bounds is None:
            raise InvalidParameters("monotone bounds need an interval system")
        lower = sum((system.mass(c) * f(bounds(c)[0]) for c in system.cells(level)), Fraction(0))
        upper = sum((system.mass(c) * f(bounds(c)[1]) for c in system.cells(level)), Fraction(0))
    return RiemannSum(value, level, lower, upper)


# -- structural checks ------------------------------------------------------------


def max_cell_mass(system: DecompositionSystem, level: int, budget: int | None = None) -> Fraction:
    system.check_level(level)
    uniform = system.uniform_mass(level)
    if uniform is not None:
        return uniform
    budget = default_budget() if budget is None else budget
    if system.cell_count(level) > budget:
        raise LevelIntractable(f"level {level} exceeds the budget {budget}")
    return max(system.mass(c) for c in system.cells(level))


def verify_refinement(
    system: DecompositionSystem,
    chain_indices: Iterable[int],
    *,
    chain: Callable[[int], int] | None = None,
    budget: int | None = None,
) -> CheckReport:
    """Each cell at chain level c_k is the disjoint union of the c_{k+1} cells inside it,
    with masses adding up exactly."""
    chain = chain or system.chain
    budget = default_budget() if budget is None else budget
    idx = sorted(chain_indices)
    violations: list[str] = []
    checked = 0
    for k in idx[:-1]:
        coarse, fine = chain(k), chain(k + 1)
        if system.cell_count(fine) > budget:
            raise LevelIntractable(f"level {fine} exceeds the budget {budget}")
        sums: dict[Cell, Fraction] = {c: Fraction(0) for c in system.cells(coarse)}
        for child in system.cells(fine):
            parent = system.cell_within(child, coarse)
            if parent is None:
                violations.append(
                    f"level {fine} cell {system.describe_cell(child)} straddles level {coarse} cells"
                )
                continue
            sums[parent] += system.mass(child)
        for parent, s in sums.items():
            checked += 1
            if s != system.mass(parent):
                violations.append(
                    f"level {coarse} cell {system.describe_cell(parent)}: children carry {s}, "
                    f"cell carries {system.mass(parent)}"
                )
    return CheckReport("refinement", not violations, checked, tuple(violations))


def verify_separation(system: DecompositionSystem, points: list, depth: int) -> CheckReport:
    """Every pair of distinct points is split by some chain level <= depth."""
    if len(set(points)) != len(points):
        raise InvalidParameters("witness points must be pairwise distinct")
    located = {x: [system.locate(x, system.chain(k)) for k in range(1, depth + 1)] for x in points}
    violations = []
    checked = 0
    for x, y in combinations(points, 2):
        checked += 1
        if located[x] == located[y]:
            violations.append(f"{x} and {y} share cells at all chain levels up to {depth}")
    return CheckReport("separation", not violations, checked, tuple(violations))


def check_preserves_density(
    bijection,
    source: DecompositionSystem,
    target: DecompositionSystem,
    level: int,
    *,
    target_level: int | None = None,
    budget: int | None = None,
) -> PreservationReport:
    """For each source cell A, compare the target outer density of g(A) with mass(A)."""
    source.check_level(level)
    if target_level is None:
        target_level = bijection.target_level(source, level)
    budget = default_budget() if budget is None else budget
    if source.cell_count(level) > budget:
        raise LevelIntractable(f"level {level} exceeds the budget {budget}")
    rows = []
    for cell in source.cells(level):
        image = bijection.image(source, cell)
        est = outer_density(target, image, target_level, budget=budget)
        m = source.mass(cell)
        rows.append(PreservationRow(source.describe_cell(cell), m, est.value, m - est.value))
    return PreservationReport(bijection.name, level, target_level, tuple(rows))


__all__ = [
    "Answer",
    "Decision",
    "Cell",
    "DensityEstimate",
    "MeasurabilityReport",
    "RiemannSum",
    "CheckReport",
    "PreservationRow",
    "PreservationReport",
    "DecompositionSystem",
    "outer_density",
    "inner_density",
    "measurability_report",
    "metric_rho",
    "share_cells",
    "riemann_integral",
    "max_cell_mass",
    "verify_refinement",
    "verify_separation",
    "check_preserves_density",
    "resolve_level",
]
