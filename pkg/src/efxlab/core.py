"""Domain types, ranking construction and exact fairness metrics.

Values are exact rationals (``fractions.Fraction``); every envy factor is
computed and compared without any floating point.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

Value = Fraction


class FairDivisionError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(FairDivisionError):
    """Parameters outside the domain an operation supports."""


class InvalidAllocation(FairDivisionError):
    """Allocation violates a structural invariant."""


class OverlapError(InvalidAllocation):
    """A good appears in more than one bundle."""


class CompletenessError(InvalidAllocation):
    """Completeness flag disagrees with the allocated goods."""


def parse_value(text: str | int) -> Value:
    """Parse "p/q", decimal, or integer text into an exact rational."""
    v = Fraction(str(text))
    if v < 0:
        raise DomainError(f"negative value not allowed: {text}")
    return v


def format_value(v: Value) -> str:
    if v.denominator == 1:
        return str(v.numerator)
    return f"{v.numerator}/{v.denominator}"


@dataclass(frozen=True)
class Instance:
    """An agents-by-goods matrix of exact non-negative values.

    ``bivalued_meta`` optionally records per-agent (high, low) value pairs;
    when present every entry of that agent's row must be one of the two.
    """

    n: int
    m: int
    values: tuple[tuple[Value, ...], ...]
    bivalued_meta: Optional[tuple[tuple[Value, Value], ...]] = None

    def __post_init__(self) -> None:
        if self.n < 1 or self.m < 1:
            raise DomainError(f"need n >= 1 and m >= 1, got n={self.n}, m={self.m}")
        if len(self.values) != self.n or any(len(row) != self.m for row in self.values):
            raise DomainError("values matrix must be n x m")
        for row in self.values:
            for v in row:
                if v < 0:
                    raise DomainError("values must be non-negative")
        if self.bivalued_meta is not None:
            if len(self.bivalued_meta) != self.n:
                raise DomainError("bivalued_meta must have one (h, l) pair per agent")
            for i, (h, low) in enumerate(self.bivalued_meta):
                if not h > low >= 0:
                    raise DomainError(f"agent {i}: need h > l >= 0")
                for v in self.values[i]:
                    if v != h and v != low:
                        raise DomainError(
                            f"agent {i}: value {v} is neither h={h} nor l={low}"
                        )

    @staticmethod
    def from_rows(
        rows: Sequence[Sequence[Value | int | str]],
        bivalued_meta: Optional[Sequence[tuple[Value, Value]]] = None,
    ) -> "Instance":
        values = tuple(tuple(Fraction(v) for v in row) for row in rows)
        meta = None
        if bivalued_meta is not None:
            meta = tuple((Fraction(h), Fraction(low)) for h, low in bivalued_meta)
        return Instance(len(values), len(values[0]), values, meta)

    def to_json(self) -> dict:
        out: dict = {
            "n": self.n,
            "m": self.m,
            "values": [[format_value(v) for v in row] for row in self.values],
        }
        if self.bivalued_meta is not None:
            out["bivalued"] = [
                {"h": format_value(h), "l": format_value(low)}
                for h, low in self.bivalued_meta
            ]
        return out

    @staticmethod
    def from_json(data: dict) -> "Instance":
        values = tuple(
            tuple(parse_value(v) for v in row) for row in data["values"]
        )
        meta = None
        if data.get("bivalued") is not None:
            meta = tuple(
                (parse_value(e["h"]), parse_value(e["l"])) for e in data["bivalued"]
            )
        inst = Instance(int(data["n"]), int(data["m"]), values, meta)
        return inst

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @staticmethod
    def loads(text: str) -> "Instance":
        return Instance.from_json(json.loads(text))


@dataclass(frozen=True)
class PreferenceProfile:
    """Per-agent permutation of good indices, best first."""

    rankings: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        m = len(self.rankings[0]) if self.rankings else 0
        for r in self.rankings:
            if sorted(r) != list(range(m)):
                raise DomainError("each ranking must be a permutation of 0..m-1")

    @property
    def n(self) -> int:
        return len(self.rankings)

    @property
    def m(self) -> int:
        return len(self.rankings[0])


@dataclass(frozen=True)
class Allocation:
    """Disjoint bundles of good indices, one per agent."""

    bundles: tuple[frozenset[int], ...]
    complete: bool

    @staticmethod
    def from_bundles(bundles: Sequence[Sequence[int]], complete: bool = True) -> "Allocation":
        return Allocation(tuple(frozenset(b) for b in bundles), complete)

    def to_json(self) -> dict:
        return {"bundles": [sorted(b) for b in self.bundles]}

    @staticmethod
    def from_json(data: dict, m: Optional[int] = None) -> "Allocation":
        bundles = tuple(frozenset(int(g) for g in b) for b in data["bundles"])
        allocated = sum(len(b) for b in bundles)
        complete = m is not None and allocated == m
        return Allocation(bundles, complete)


@dataclass(frozen=True)
class FairnessReport:
    """Exact envy factors with the pair and removed good that attain them.

    ``alpha_efx`` uses the worst-case removal from the envied bundle,
    ``alpha_ef1`` the best-case one; both are capped at 1. Bindings are
    (envious agent, envied agent, removed good) or None when no pair
    constrains.
    """

    alpha_efx: Value
    alpha_ef1: Value
    efx_binding: Optional[tuple[int, int, int]] = None
    ef1_binding: Optional[tuple[int, int, int]] = None
    raw_efx_ratio: Optional[Value] = None


def build_ranking(instance: Instance) -> PreferenceProfile:
    """Rank each agent's goods by value descending, ties by ascending index."""
    rankings = tuple(
        tuple(sorted(range(instance.m), key=lambda g: (-instance.values[i][g], g)))
        for i in range(instance.n)
    )
    return PreferenceProfile(rankings)


def validate(instance: Instance, allocation: Allocation) -> None:
    """Raise a diagnostic error if the allocation is malformed for the instance."""
    if len(allocation.bundles) != instance.n:
        raise InvalidAllocation(
            f"expected {instance.n} bundles, got {len(allocation.bundles)}"
        )
    seen: set[int] = set()
    for i, bundle in enumerate(allocation.bundles):
        for g in bundle:
            if not 0 <= g < instance.m:
                raise InvalidAllocation(f"bundle {i} references unknown good {g}")
            if g in seen:
                raise OverlapError(f"good {g} appears in more than one bundle")
            seen.add(g)
    if allocation.complete and len(seen) != instance.m:
        raise CompletenessError(
            f"allocation marked complete but covers {len(seen)} of {instance.m} goods"
        )
    if not allocation.complete and len(seen) == instance.m:
        raise CompletenessError("allocation covers all goods but is not marked complete")


def fairness_report(instance: Instance, allocation: Allocation) -> FairnessReport:
    """Compute exact EFX and EF1 envy factors for an allocation.

    For each ordered pair (i, j) with a nonempty envied bundle, the EFX
    factor contribution is min(1, v_i(X_i) / (v_i(X_j) - worst-removal)),
    and the EF1 one uses the best removal instead. Pairs whose denominator
    is zero impose no constraint; with no constraining pair both factors
    are 1.
    """
    validate(instance, allocation)
    n, m = instance.n, instance.m
    owner = [-1] * m
    for j, bundle in enumerate(allocation.bundles):
        for g in bundle:
            owner[g] = j

    one = Fraction(1)
    alpha_efx = one
    alpha_ef1 = one
    raw_efx: Optional[Fraction] = None
    efx_binding: Optional[tuple[int, int, int]] = None
    ef1_binding: Optional[tuple[int, int, int]] = None

    for i in range(n):
        row = instance.values[i]
        sums = [Fraction(0)] * n
        min_good = [-1] * n
        max_good = [-1] * n
        for g in range(m):
            j = owner[g]
            if j < 0:
                continue
            v = row[g]
            sums[j] += v
            if min_good[j] < 0 or v < row[min_good[j]]:
                min_good[j] = g
            if max_good[j] < 0 or v > row[max_good[j]]:
                max_good[j] = g
        own = sums[i]
        for j in range(n):
            if j == i or not allocation.bundles[j]:
                continue
            efx_den = sums[j] - row[min_good[j]]
            if efx_den > 0:
                ratio = own / efx_den
                if raw_efx is None or ratio < raw_efx:
                    raw_efx = ratio
                capped = min(one, ratio)
                if capped < alpha_efx:
                    alpha_efx = capped
                    efx_binding = (i, j, min_good[j])
            ef1_den = sums[j] - row[max_good[j]]
            if ef1_den > 0:
                capped = min(one, own / ef1_den)
                if capped < alpha_ef1:
                    alpha_ef1 = capped
                    ef1_binding = (i, j, max_good[j])

    return FairnessReport(alpha_efx, alpha_ef1, efx_binding, ef1_binding, raw_efx)


def alpha_efx(instance: Instance, allocation: Allocation) -> FairnessReport:
    return fairness_report(instance, allocation)


def alpha_ef1(instance: Instance, allocation: Allocation) -> FairnessReport:
    return fairness_report(instance, allocation)


def trivial_few_goods_allocation(n: int, m: int) -> Allocation:
    """One good per agent in ascending order; used whenever m < n.

    With at most one good per bundle the result is exactly EFX.
    """
    bundles = [frozenset([g]) if g < m else frozenset() for g in range(n)]
    return Allocation(tuple(bundles[:n]), complete=True)
