"""Exact-arithmetic helpers shared by every module.

Rationals are :class:`fractions.Fraction`; on the wire they are always
``"numerator/denominator"`` strings.
"""

from __future__ import annotations

import math
import os
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from sympy import factorint, prime

from .errors import InvalidParameters

__all__ = [
    "default_budget",
    "as_fraction",
    "fmt_rational",
    "fmt_float",
    "factorial",
    "nth_prime",
    "first_primes",
    "is_squarefree",
    "square_prime_divisors",
    "valuation",
    "lcm_all",
    "DEFAULT_BUDGET",
    "PRIME_WINDOW",
]

DEFAULT_BUDGET = 10**6
PRIME_WINDOW = 64


def default_budget() -> int:
    """Enumeration cap; ``DENSITYLAB_BUDGET`` overrides the built-in 10**6."""
    raw = os.environ.get("DENSITYLAB_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError as exc:
        raise InvalidParameters(f"DENSITYLAB_BUDGET must be an integer, got {raw!r}") from exc
    if value < 1:
        raise InvalidParameters("DENSITYLAB_BUDGET must be positive")
    return value


def as_fraction(value) -> Fraction:
    """Parse ints, Fractions and "p/q" strings. Floats are rejected."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InvalidParameters(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidParameters(f"not a rational: {value!r}") from exc
    raise InvalidParameters(f"not a rational: {value!r}")


def fmt_rational(q: Fraction | int) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def fmt_float(x: float) -> str:
    # repr is the shortest string that round-trips
    return repr(float(x))


@lru_cache(maxsize=None)
def factorial(n: int) -> int:
    return math.factorial(n)


@lru_cache(maxsize=None)
def nth_prime(i: int) -> int:
    """The i-th prime, 1-based (p_1 = 2)."""
    if i < 1:
        raise InvalidParameters(f"prime index must be >= 1, got {i}")
    return int(prime(i))


def first_primes(n: int) -> list[int]:
    return [nth_prime(i) for i in range(1, n + 1)]


def is_squarefree(n: int) -> bool:
    if n < 1:
        raise InvalidParameters(f"squarefree test needs a positive integer, got {n}")
    return all(e == 1 for e in factorint(n).values())


def square_prime_divisors(m: int) -> list[int]:
    """Primes p with p**2 | m."""
    return sorted(p for p, e in factorint(m).items() if e >= 2)


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise InvalidParameters("valuation of 0 is undefined")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def lcm_all(values: Iterable[int]) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, v)
    return out
