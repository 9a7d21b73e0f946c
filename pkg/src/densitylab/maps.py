"""Named bijections between ground sets, with images of cells as set descriptions.

Each map exposes ``forward``/``inverse`` on points and ``image(source, cell)``,
the image of a source cell as a :class:`~densitylab.sets.SetSpec` that the
target system can decide in closed form. ``target_level`` picks the target
level at which that image is an exact union of cells.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import Cell, DecompositionSystem
from .errors import IncompatibleLevel, InvalidParameters
from .radix import CantorBase, SequenceSpec, image_interval, reflect, unreflect
from .semigroup import SemigroupElement
from .sets import ExponentBox, IntervalUnion, ResidueUnion, SetSpec, permute_set
from .systems import BuckFactorial, CantorSeries, FreeGroupCoset, PrimePower


class Bijection:
    name = "bijection"

    def forward(self, x):
        raise NotImplementedError

    def inverse(self, y):
        raise NotImplementedError

    def image(self, source: DecompositionSystem, cell: Cell) -> SetSpec:
        raise NotImplementedError

    def target_level(self, source: DecompositionSystem, level: int) -> int:
        return level


@dataclass(frozen=True)
class Identity(Bijection):
    name = "identity"

    def forward(self, x):
        return x

    def inverse(self, y):
        return y

    def image(self, source, cell):
        return source.cell_set(cell)


def _residue_base(source: DecompositionSystem, expected: str) -> CantorBase:
    if isinstance(source, PrimePower):
        return CantorBase.geometric(source.p)
    if isinstance(source, BuckFactorial):
        return CantorBase.factorial()
    if isinstance(source, CantorSeries):
        return source.base
    raise IncompatibleLevel(f"{expected} needs a residue source system, got {source.system_id}")


@dataclass(frozen=True)
class RadicalInverse(Bijection):
    """Digit reflection over a Cantor base: prime-power (or Cantor-series) cells to intervals."""

    base: CantorBase

    @classmethod
    def prime(cls, p: int) -> RadicalInverse:
        return cls(CantorBase.geometric(p))

    @property
    def name(self):
        return f"radical-inverse({self.base.describe()})"

    def forward(self, x: int) -> Fraction:
        if not isinstance(x, int) or x < 1:
            raise InvalidParameters(f"radical inverse is defined on positive integers, got {x!r}")
        return reflect(self.base, x)

    def inverse(self, y) -> int:
        n = unreflect(self.base, Fraction(y))
        if n == 0:
            raise InvalidParameters("0 has no preimage among the positive integers")
        return n

    def image(self, source, cell):
        if _residue_base(source, self.name) != self.base:
            raise IncompatibleLevel(f"{source.system_id} does not use the digit base of {self.name}")
        modulus = source.modulus(cell.level)
        lo, hi = image_interval(SequenceSpec("mixed", self.base), cell.index - 1, modulus)
        return IntervalUnion.single(lo, hi)

    def target_level(self, source, level):
        return source.modulus(level)


def FactorialCantor() -> RadicalInverse:  # noqa: N802
    """The factorial radical inverse g_v: factorial residue cells to intervals of width 1/n!."""
    return RadicalInverse(CantorBase.factorial())


@dataclass(frozen=True)
class Inverse(Bijection):
    """Inverse of a radical inverse: interval cells of width 1/Q_n back to residue classes."""

    of: RadicalInverse

    @property
    def name(self):
        return f"inverse({self.of.name})"

    def forward(self, x):
        return self.of.inverse(x)

    def inverse(self, y):
        return self.of.forward(y)

    def image(self, source, cell):
        lo = Fraction(cell.index - 1, cell.level)
        try:
            self.of.base.level_of(cell.level)
        except InvalidParameters as exc:
            raise IncompatibleLevel(f"width 1/{cell.level} is not a level of {self.of.name}") from exc
        return ResidueUnion.single(unreflect(self.of.base, lo), cell.level)

    def target_level(self, source, level):
        return self.of.base.level_of(level)


@dataclass(frozen=True)
class GeneratorPermutation(Bijection):
    """Semigroup automorphism p_i -> p_sigma(i) on a finite window."""

    mapping: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pairs = tuple(sorted((int(i), int(j)) for i, j in self.mapping))
        if sorted(i for i, _ in pairs) != sorted(j for _, j in pairs) or len({i for i, _ in pairs}) != len(pairs):
            raise InvalidParameters(f"not a permutation: {pairs}")
        object.__setattr__(self, "mapping", pairs)

    @classmethod
    def swap(cls, i: int, j: int) -> GeneratorPermutation:
        return cls(((i, j), (j, i)))

    @property
    def sigma(self) -> dict[int, int]:
        return dict(self.mapping)

    @property
    def name(self):
        return "permute(" + ",".join(f"{i}->{j}" for i, j in self.mapping if i != j) + ")"

    def _apply(self, x: SemigroupElement, sigma: dict[int, int]) -> SemigroupElement:
        return SemigroupElement.from_support({sigma.get(i, i): e for i, e in x.support.items()})

    def forward(self, x):
        return self._apply(x, self.sigma)

    def inverse(self, y):
        return self._apply(y, {j: i for i, j in self.mapping})

    def image(self, source, cell):
        return permute_set(source.cell_set(cell), self.sigma)


@dataclass(frozen=True)
class GroupInversion(Bijection):
    name = "inversion"

    def forward(self, x):
        return 1 / Fraction(x)

    def inverse(self, y):
        return 1 / Fraction(y)

    def image(self, source, cell):
        if not isinstance(source, FreeGroupCoset):
            raise IncompatibleLevel("inversion acts on the free-group coset system")
        n = cell.level
        exps = source.coset_exponents(cell)
        return ExponentBox.congruences({i: -e % n for i, e in enumerate(exps, 1)}, n)


@dataclass(frozen=True)
class GroupTranslation(Bijection):
    """x -> a x on the positive rationals."""

    by: Fraction

    def __post_init__(self):
        q = Fraction(self.by)
        if q <= 0:
            raise InvalidParameters("translation needs a positive rational")
        object.__setattr__(self, "by", q)

    @property
    def name(self):
        return f"translate({self.by})"

    def forward(self, x):
        return self.by * Fraction(x)

    def inverse(self, y):
        return Fraction(y) / self.by

    def image(self, source, cell):
        if not isinstance(source, FreeGroupCoset):
            raise IncompatibleLevel("translation acts on the free-group coset system")
        n = cell.level
        shift = source.exponents_of(self.by)
        exps = source.coset_exponents(cell)
        return ExponentBox.congruences({i: (e + shift.get(i, 0)) % n for i, e in enumerate(exps, 1)}, n)


def parse_map(text: str) -> Bijection:
    """``identity``, ``vdc:P``, ``cantor``, ``vdc-inverse:P``, ``inversion``,
    ``translate:A`` (rational), ``permute:1-2,3-4`` (transpositions)."""
    name, _, arg = text.strip().partition(":")
    if name == "identity":
        return Identity()
    if name == "vdc":
        return RadicalInverse.prime(int(arg or 2))
    if name == "cantor":
        return FactorialCantor()
    if name == "vdc-inverse":
        return Inverse(RadicalInverse.prime(int(arg or 2)))
    if name == "inversion":
        return GroupInversion()
    if name == "translate":
        return GroupTranslation(Fraction(arg))
    if name == "permute":
        sigma: dict[int, int] = {}
        for pair in arg.split(","):
            i, _, j = pair.partition("-")
            a, b = int(i), int(j)
            sigma[a], sigma[b] = b, a
        return GeneratorPermutation(tuple(sigma.items()))
    raise InvalidParameters(f"unknown map {text!r}")


__all__ = [
    "Bijection",
    "Identity",
    "RadicalInverse",
    "FactorialCantor",
    "Inverse",
    "GeneratorPermutation",
    "GroupInversion",
    "GroupTranslation",
    "parse_map",
]
