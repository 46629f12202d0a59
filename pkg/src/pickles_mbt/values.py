"""Runtime values, their types, and finite-izable domains.

Values are plain Python objects:

=========  ==========================================
boolean    ``bool``
integer    ``int``
decimal    ``decimal.Decimal`` (exact, never ``float``)
string     ``str``
array      ``tuple`` of values
struct     :class:`Struct` (immutable, ordered mapping)
=========  ==========================================
"""

from __future__ import annotations

import itertools
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Any, Union

BOOLEAN = "boolean"
INTEGER = "integer"
DECIMAL = "decimal"
STRING = "string"
PRIMITIVE_KINDS = (BOOLEAN, INTEGER, DECIMAL, STRING)

DEFAULT_EPSILON = Decimal("0.001")


class DomainError(ValueError):
    """A domain or type description is ill-formed."""


class SamplingError(LookupError):
    """A decimal domain has no usable sample set."""


# --------------------------------------------------------------------------
# types


@dataclass(frozen=True)
class PrimType:
    kind: str

    def __post_init__(self):
        if self.kind not in PRIMITIVE_KINDS:
            raise DomainError(f"unknown primitive type {self.kind!r}")

    def __str__(self):
        return self.kind


@dataclass(frozen=True)
class ArrayType:
    element: "Type"

    @property
    def kind(self) -> str:
        return "array"

    def __str__(self):
        return f"array({self.element})"


@dataclass(frozen=True)
class StructType:
    attributes: tuple[tuple[str, "Type"], ...]

    def __post_init__(self):
        keys = [k for k, _ in self.attributes]
        if len(set(keys)) != len(keys):
            raise DomainError(f"duplicate struct attribute in {keys}")

    @property
    def kind(self) -> str:
        return "struct"

    @property
    def keys(self) -> tuple[str, ...]:
        return tuple(k for k, _ in self.attributes)

    def attribute(self, key: str) -> "Type":
        for k, t in self.attributes:
            if k == key:
                return t
        raise KeyError(key)

    def __str__(self):
        inner = ", ".join(f"{k}: {t}" for k, t in self.attributes)
        return f"struct({inner})"


Type = Union[PrimType, ArrayType, StructType]

T_BOOLEAN = PrimType(BOOLEAN)
T_INTEGER = PrimType(INTEGER)
T_DECIMAL = PrimType(DECIMAL)
T_STRING = PrimType(STRING)


# --------------------------------------------------------------------------
# values


class Struct(Mapping):
    """Immutable struct value; keys keep declaration order."""

    __slots__ = ("_items",)

    def __init__(self, items: Mapping[str, Any] | tuple[tuple[str, Any], ...] = ()):
        pairs = tuple(items.items()) if isinstance(items, Mapping) else tuple(items)
        object.__setattr__(self, "_items", pairs)

    def __getitem__(self, key):
        for k, v in self._items:
            if k == key:
                return v
        raise KeyError(key)

    def __iter__(self):
        return (k for k, _ in self._items)

    def __len__(self):
        return len(self._items)

    def __hash__(self):
        return hash(frozenset(self._items))

    def __eq__(self, other):
        if isinstance(other, Struct):
            return dict(self._items) == dict(other._items)
        return NotImplemented

    def __repr__(self):
        return "Struct({%s})" % ", ".join(f"{k!r}: {v!r}" for k, v in self._items)


Value = Union[bool, int, Decimal, str, tuple, Struct]


def type_of(value: Value) -> Type:
    """Return the sort of ``value``.

    Array element types are taken from the first element; an empty array has
    no inferable element type and raises ``DomainError``.
    """
    if isinstance(value, bool):
        return T_BOOLEAN
    if isinstance(value, int):
        return T_INTEGER
    if isinstance(value, Decimal):
        return T_DECIMAL
    if isinstance(value, str):
        return T_STRING
    if isinstance(value, tuple):
        if not value:
            raise DomainError("cannot infer the element type of an empty array")
        element = type_of(value[0])
        for v in value[1:]:
            if type_of(v) != element:
                raise DomainError("array elements have mixed types")
        return ArrayType(element)
    if isinstance(value, Struct):
        return StructType(tuple((k, type_of(v)) for k, v in value.items()))
    raise DomainError(f"not a value: {value!r}")


def value_has_type(value: Value, t: Type) -> bool:
    if isinstance(t, PrimType):
        if t.kind == BOOLEAN:
            return isinstance(value, bool)
        if t.kind == INTEGER:
            return isinstance(value, int) and not isinstance(value, bool)
        if t.kind == DECIMAL:
            return isinstance(value, Decimal)
        return isinstance(value, str)
    if isinstance(t, ArrayType):
        return isinstance(value, tuple) and all(value_has_type(v, t.element) for v in value)
    if isinstance(t, StructType):
        return (
            isinstance(value, Struct)
            and set(value) == set(t.keys)
            and all(value_has_type(value[k], at) for k, at in t.attributes)
        )
    return False


def canonical_decimal(d: Decimal) -> Decimal:
    """Strip trailing zeros but keep at least one fractional digit (2.000 -> 2.0)."""
    d = d.normalize()
    sign, digits, exp = d.as_tuple()
    if exp >= 0:
        return d.quantize(Decimal("0.1"))
    return d


def format_value(value: Value) -> str:
    """Short textual form of a primitive value (``true``, ``2.0``, ``PART AV``)."""
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


# --------------------------------------------------------------------------
# domains


@dataclass(frozen=True)
class EnumDomain:
    """An explicit finite set of primitive values."""

    type: PrimType
    values: tuple

    def __post_init__(self):
        if not self.values:
            raise DomainError("empty value set")
        for v in self.values:
            if not value_has_type(v, self.type):
                raise DomainError(f"value {format_value(v)!r} is not a {self.type}")
        if len(set(self.values)) != len(self.values):
            raise DomainError("duplicate values in range")


@dataclass(frozen=True)
class IntRange:
    """Closed integer interval ``[lo, hi]``."""

    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise DomainError(f"empty integer range [{self.lo},{self.hi}]")

    @property
    def type(self) -> PrimType:
        return T_INTEGER


@dataclass(frozen=True)
class DecimalRange:
    lo: Decimal
    hi: Decimal
    lo_open: bool = True
    hi_open: bool = True

    def __post_init__(self):
        if self.lo > self.hi or (self.lo == self.hi and (self.lo_open or self.hi_open)):
            raise DomainError(f"empty decimal range {self}")

    @property
    def type(self) -> PrimType:
        return T_DECIMAL

    def __contains__(self, d) -> bool:
        if not isinstance(d, Decimal):
            return False
        above = d > self.lo if self.lo_open else d >= self.lo
        below = d < self.hi if self.hi_open else d <= self.hi
        return above and below

    def __str__(self):
        return f"{'(' if self.lo_open else '['}{self.lo},{self.hi}{')' if self.hi_open else ']'}"


@dataclass(frozen=True)
class ArrayDomain:
    element: "Domain"
    min_len: int
    max_len: int

    def __post_init__(self):
        if not 1 <= self.min_len <= self.max_len:
            raise DomainError(f"array cardinality must satisfy 1 <= min <= max, got {self.min_len}..{self.max_len}")

    @property
    def type(self) -> ArrayType:
        return ArrayType(self.element.type)


@dataclass(frozen=True)
class StructDomain:
    attributes: tuple[tuple[str, "Domain"], ...]

    @property
    def type(self) -> StructType:
        return StructType(tuple((k, d.type) for k, d in self.attributes))


Domain = Union[EnumDomain, IntRange, DecimalRange, ArrayDomain, StructDomain]


def domain_contains(domain: Domain, value: Value) -> bool:
    if isinstance(domain, EnumDomain):
        return value_has_type(value, domain.type) and value in domain.values
    if isinstance(domain, IntRange):
        return value_has_type(value, T_INTEGER) and domain.lo <= value <= domain.hi
    if isinstance(domain, DecimalRange):
        return value in domain
    if isinstance(domain, ArrayDomain):
        return (
            isinstance(value, tuple)
            and domain.min_len <= len(value) <= domain.max_len
            and all(domain_contains(domain.element, v) for v in value)
        )
    if isinstance(domain, StructDomain):
        if not isinstance(value, Struct) or set(value) != {k for k, _ in domain.attributes}:
            return False
        return all(domain_contains(d, value[k]) for k, d in domain.attributes)
    return False


def decimal_paths(domain: Domain, path: str) -> Iterator[tuple[str, DecimalRange]]:
    """Yield ``(path, range)`` for every decimal interval nested in ``domain``."""
    if isinstance(domain, DecimalRange):
        yield path, domain
    elif isinstance(domain, ArrayDomain):
        yield from decimal_paths(domain.element, path)
    elif isinstance(domain, StructDomain):
        for k, d in domain.attributes:
            yield from decimal_paths(d, f"{path}.{k}")


@dataclass(frozen=True)
class SamplingPlan:
    """Finite sample sets standing in for decimal intervals.

    ``samples`` maps a variable path (``"faulty detectors.length position"``)
    to an ordered sample list. Paths without an entry get a default set when
    ``auto`` is true: the interval bounds nudged inward by ``epsilon``, the
    quartile points, and any ``constants`` lying strictly inside.
    """

    samples: Mapping[str, tuple[Decimal, ...]] = field(default_factory=dict)
    epsilon: Decimal = DEFAULT_EPSILON
    constants: tuple[Decimal, ...] = ()
    auto: bool = True

    def samples_for(self, path: str, domain: DecimalRange) -> tuple[Decimal, ...]:
        if path in self.samples:
            chosen = tuple(Decimal(s) for s in self.samples[path])
            for s in chosen:
                if s not in domain:
                    raise SamplingError(f"sample {s} for {path!r} lies outside {domain}")
            return chosen
        if not self.auto:
            raise SamplingError(f"no sample set for decimal domain {path!r}")
        return default_samples(domain, self.epsilon, self.constants)


def default_samples(domain: DecimalRange, epsilon: Decimal = DEFAULT_EPSILON,
                    constants=()) -> tuple[Decimal, ...]:
    lo = domain.lo + epsilon if domain.lo_open else domain.lo
    hi = domain.hi - epsilon if domain.hi_open else domain.hi
    width = domain.hi - domain.lo
    points = {lo, hi}
    for q in (Decimal(1) / 4, Decimal(1) / 2, Decimal(3) / 4):
        points.add((domain.lo + width * q).quantize(epsilon))
    points.update(c for c in constants if c in domain)
    return tuple(canonical_decimal(p) for p in sorted(points) if p in domain)


def enumerate_domain(domain: Domain, plan: SamplingPlan | None = None, path: str = "") -> list:
    """All values of the finitized domain in a fixed order.

    Arrays are enumerated as sets of distinct elements (order irrelevant),
    shortest first, each length in ``itertools.combinations`` order.
    """
    if isinstance(domain, EnumDomain):
        return list(domain.values)
    if isinstance(domain, IntRange):
        return list(range(domain.lo, domain.hi + 1))
    if isinstance(domain, DecimalRange):
        if plan is None:
            raise SamplingError(f"no sampling plan for decimal domain {path!r}")
        return list(plan.samples_for(path, domain))
    if isinstance(domain, StructDomain):
        keys = [k for k, _ in domain.attributes]
        columns = [enumerate_domain(d, plan, f"{path}.{k}") for k, d in domain.attributes]
        return [Struct(tuple(zip(keys, combo))) for combo in itertools.product(*columns)]
    if isinstance(domain, ArrayDomain):
        elements = enumerate_domain(domain.element, plan, path)
        out = []
        for n in range(domain.min_len, domain.max_len + 1):
            out.extend(itertools.combinations(elements, n))
        return out
    raise DomainError(f"not a domain: {domain!r}")


def domain_size(domain: Domain, plan: SamplingPlan | None = None, path: str = "") -> int:
    """Cardinality of the finitized domain, without materialising arrays."""
    from math import comb

    if isinstance(domain, ArrayDomain):
        n = domain_size(domain.element, plan, path)
        return sum(comb(n, k) for k in range(domain.min_len, domain.max_len + 1))
    if isinstance(domain, StructDomain):
        total = 1
        for k, d in domain.attributes:
            total *= domain_size(d, plan, f"{path}.{k}")
        return total
    if isinstance(domain, IntRange):
        return domain.hi - domain.lo + 1
    return len(enumerate_domain(domain, plan, path))
