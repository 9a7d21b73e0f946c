"""Text and JSON encodings for set descriptions and points.

Set expressions::

    expr  := term ('|' term)*
    term  := unary ('&' unary)*
    unary := '~' unary | 'translate[' ELEMENT ']' unary
           | 'permute[' i-j,... ']' unary | '{' expr '}' | atom
    atom  := full | empty
           | residue:3+(4),1+(6)          union of residue classes
           | interval:[1/4,1/2),[3/4,1)   union of half-open intervals
           | finite:1,2,5                 explicit finite set (ints or p/q)
           | box:1=0%2,3=1               exponent constraints (i=v or i=r%m)
           | squarefree | perfect-power:2 | subsemigroup-h:2,3
           | sparse-min:2 | full-support-min:1
           | order-interval-at-most-one | order-interval-above-one

``&`` binds tighter than ``|``; braces group.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import InvalidParameters
from .exact import as_fraction, fmt_rational
from .semigroup import SemigroupElement
from .sets import (
    PREDICATES,
    Complement,
    Empty,
    ExponentBox,
    FiniteSet,
    Full,
    Intersection,
    IntervalUnion,
    Permute,
    Predicate,
    ResidueUnion,
    SetSpec,
    SubsemigroupH,
    Translate,
    Union,
)

_SPECIAL = "|&{}"


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg: str) -> InvalidParameters:
        return InvalidParameters(f"set expression {self.text!r}, position {self.pos}: {msg}")

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expr(self) -> SetSpec:
        parts = [self.term()]
        while self.peek() == "|":
            self.pos += 1
            parts.append(self.term())
        return parts[0] if len(parts) == 1 else Union(tuple(parts))

    def term(self) -> SetSpec:
        parts = [self.unary()]
        while self.peek() == "&":
            self.pos += 1
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else Intersection(tuple(parts))

    def bracket(self) -> str:
        if self.peek() != "[":
            raise self.error("expected '['")
        end = self.text.find("]", self.pos)
        if end < 0:
            raise self.error("unclosed '['")
        body = self.text[self.pos + 1 : end]
        self.pos = end + 1
        return body

    def unary(self) -> SetSpec:
        c = self.peek()
        if c == "~":
            self.pos += 1
            return Complement(self.unary())
        if c == "{":
            self.pos += 1
            inner = self.expr()
            if self.peek() != "}":
                raise self.error("expected '}'")
            self.pos += 1
            return inner
        if self.text.startswith("translate[", self.pos):
            self.pos += len("translate")
            elem = parse_element(self.bracket())
            return Translate(elem, self.unary())
        if self.text.startswith("permute[", self.pos):
            self.pos += len("permute")
            return Permute(_pairs(self.bracket()), self.unary())
        return self.atom()

    def atom(self) -> SetSpec:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] not in _SPECIAL:
            self.pos += 1
        raw = self.text[start : self.pos].strip()
        if not raw:
            raise self.error("expected a set")
        return parse_atom(raw)


def _pairs(body: str) -> tuple[tuple[int, int], ...]:
    sigma: dict[int, int] = {}
    for item in body.split(","):
        a, sep, b = item.partition("-")
        if not sep:
            raise InvalidParameters(f"permutation entries look like i-j, got {item!r}")
        i, j = int(a), int(b)
        sigma[i], sigma[j] = j, i
    return tuple(sigma.items())


def _int_list(arg: str) -> list[int]:
    try:
        return [int(v) for v in arg.split(",") if v.strip()]
    except ValueError as exc:
        raise InvalidParameters(f"expected integers, got {arg!r}") from exc


def parse_atom(raw: str) -> SetSpec:
    name, _, arg = raw.partition(":")
    name = name.strip()
    if name == "full":
        return Full()
    if name == "empty":
        return Empty()
    if name == "residue":
        classes = re.findall(r"(-?\d+)\s*\+\s*\(\s*(\d+)\s*\)", arg)
        if not classes:
            raise InvalidParameters(f"no residue classes in {raw!r}")
        return ResidueUnion(tuple((int(a), int(m)) for a, m in classes))
    if name == "interval":
        ivs = re.findall(r"\[\s*([^,\]\)]+?)\s*,\s*([^,\]\)]+?)\s*\)", arg)
        if not ivs:
            raise InvalidParameters(f"no intervals in {raw!r}")
        return IntervalUnion(tuple((as_fraction(a), as_fraction(b)) for a, b in ivs))
    if name == "finite":
        vals = [as_fraction(v) for v in arg.split(",") if v.strip()]
        return FiniteSet(frozenset(int(v) if v.denominator == 1 else v for v in vals))
    if name == "box":
        cons = []
        for item in arg.split(","):
            if not item.strip():
                continue
            m = re.fullmatch(r"\s*(\d+)\s*=\s*(-?\d+)\s*(?:%\s*(\d+))?\s*", item)
            if not m:
                raise InvalidParameters(f"box constraints look like i=v or i=r%m, got {item!r}")
            i, v, mod = int(m.group(1)), int(m.group(2)), int(m.group(3) or 0)
            cons.append((i, frozenset({v}), mod))
        return ExponentBox(tuple(cons))
    if name in PREDICATES:
        cls = PREDICATES[name]
        ints = _int_list(arg) if arg else []
        if cls is SubsemigroupH:
            return cls(tuple(ints))
        fields = [f for f in cls.__dataclass_fields__ if f != "name"]
        if len(ints) != len(fields):
            raise InvalidParameters(f"{name} takes {len(fields)} parameter(s), got {len(ints)}")
        return cls(*ints)
    raise InvalidParameters(f"unknown set {name!r}")


def parse_set(text: str) -> SetSpec:
    p = _Parser(text)
    spec = p.expr()
    if p.peek():
        raise p.error(f"unexpected {p.peek()!r}")
    return spec


# -- points ----------------------------------------------------------------------------


def parse_element(text: str) -> SemigroupElement:
    """``1`` or products like ``p1^2*p3``."""
    text = text.strip()
    if text == "1":
        return SemigroupElement()
    support: dict[int, int] = {}
    for factor in text.split("*"):
        m = re.fullmatch(r"\s*p(\d+)(?:\^(\d+))?\s*", factor)
        if not m:
            raise InvalidParameters(f"not a semigroup element: {text!r}")
        i, e = int(m.group(1)), int(m.group(2) or 1)
        if i < 1:
            raise InvalidParameters("generator indices start at 1")
        support[i] = support.get(i, 0) + e
    return SemigroupElement.from_support(support)


def parse_point(text: str, kind: str):
    """Parse a point for a system point type: "natural", "rational", "tuple" or "element"."""
    text = text.strip()
    if kind == "natural":
        try:
            return int(text)
        except ValueError as exc:
            raise InvalidParameters(f"not an integer: {text!r}") from exc
    if kind == "rational":
        q = as_fraction(text)
        return int(q) if q.denominator == 1 else q
    if kind == "tuple":
        return tuple(_int_list(text.strip("()")))
    if kind == "element":
        return parse_element(text)
    raise InvalidParameters(f"unknown point kind {kind!r}")


def format_point(x) -> str:
    if isinstance(x, Fraction):
        return fmt_rational(x)
    if isinstance(x, tuple):
        return "(" + ",".join(map(str, x)) + ")"
    return str(x)


# -- JSON ------------------------------------------------------------------------------


def _value_to_json(v):
    if isinstance(v, Fraction):
        return fmt_rational(v)
    if isinstance(v, SemigroupElement):
        return str(v)
    return v


def _value_from_json(v):
    if isinstance(v, str):
        if v.startswith("p") or v == "1":
            return parse_element(v) if v != "1" else 1
        q = as_fraction(v)
        return int(q) if q.denominator == 1 else q
    return v


def set_to_json(spec: SetSpec) -> dict:
    if isinstance(spec, Full):
        return {"type": "full"}
    if isinstance(spec, Empty):
        return {"type": "empty"}
    if isinstance(spec, ResidueUnion):
        return {"type": "residue", "classes": [list(c) for c in spec.classes]}
    if isinstance(spec, IntervalUnion):
        return {"type": "interval", "intervals": [[fmt_rational(a), fmt_rational(b)] for a, b in spec.intervals]}
    if isinstance(spec, FiniteSet):
        return {"type": "finite", "elements": sorted((_value_to_json(e) for e in spec.elements), key=str)}
    if isinstance(spec, ExponentBox):
        return {"type": "box", "constraints": [[i, sorted(a), m] for i, a, m in spec.constraints]}
    if isinstance(spec, Predicate):
        return {"type": "predicate", "name": spec.name, "params": spec.params()}
    if isinstance(spec, Complement):
        return {"type": "complement", "of": set_to_json(spec.of)}
    if isinstance(spec, (Union, Intersection)):
        kind = "union" if isinstance(spec, Union) else "intersection"
        return {"type": kind, "parts": [set_to_json(p) for p in spec.parts]}
    if isinstance(spec, Translate):
        return {"type": "translate", "by": _value_to_json(spec.by), "of": set_to_json(spec.of)}
    if isinstance(spec, Permute):
        return {"type": "permute", "mapping": [list(p) for p in spec.mapping], "of": set_to_json(spec.of)}
    raise InvalidParameters(f"no JSON encoding for {spec!r}")


def set_from_json(obj) -> SetSpec:
    if isinstance(obj, str):
        return parse_set(obj)
    if not isinstance(obj, dict) or "type" not in obj:
        raise InvalidParameters("set JSON needs a 'type' field")
    t = obj["type"]
    try:
        if t == "full":
            return Full()
        if t == "empty":
            return Empty()
        if t == "residue":
            return ResidueUnion(tuple(tuple(c) for c in obj["classes"]))
        if t == "interval":
            return IntervalUnion(tuple((as_fraction(a), as_fraction(b)) for a, b in obj["intervals"]))
        if t == "finite":
            return FiniteSet(frozenset(_value_from_json(e) for e in obj["elements"]))
        if t == "box":
            return ExponentBox(tuple((i, frozenset(a), m) for i, a, m in obj["constraints"]))
        if t == "predicate":
            cls = PREDICATES.get(obj["name"])
            if cls is None:
                raise InvalidParameters(f"unknown predicate {obj['name']!r}")
            params = dict(obj.get("params", {}))
            if "alphas" in params:
                params["alphas"] = tuple(params["alphas"])
            return cls(**params)
        if t == "complement":
            return Complement(set_from_json(obj["of"]))
        if t in ("union", "intersection"):
            parts = tuple(set_from_json(p) for p in obj["parts"])
            return Union(parts) if t == "union" else Intersection(parts)
        if t == "translate":
            return Translate(_value_from_json(obj["by"]), set_from_json(obj["of"]))
        if t == "permute":
            return Permute(tuple(tuple(p) for p in obj["mapping"]), set_from_json(obj["of"]))
    except (KeyError, TypeError) as exc:
        raise InvalidParameters(f"malformed set JSON: {obj!r}") from exc
    raise InvalidParameters(f"unknown set type {t!r}")


__all__ = [
    "parse_set",
    "parse_atom",
    "parse_element",
    "parse_point",
    "format_point",
    "set_to_json",
    "set_from_json",
]
