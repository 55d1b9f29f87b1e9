"""Metered access to hidden valuations: free rankings, counted value queries.

Algorithms receive a :class:`QueryOracle` instead of the instance itself.
The ranking is free; each (agent, good) value costs one query the first
time it is asked, and repeated queries are answered from the transcript at
no cost. An optional per-agent budget is enforced fail-fast.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .core import (
    FairDivisionError,
    Instance,
    PreferenceProfile,
    Value,
    build_ranking,
    format_value,
    parse_value,
)


class BudgetExceeded(FairDivisionError):
    """A fresh query would push an agent past her budget."""


@dataclass(frozen=True)
class Transcript:
    """Ordered record of answered queries."""

    entries: tuple[tuple[int, int, Value], ...]

    @property
    def per_agent_counts(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for agent, _, _ in self.entries:
            counts[agent] = counts.get(agent, 0) + 1
        return counts

    def to_json(self) -> dict:
        return {
            "entries": [[a, g, format_value(v)] for a, g, v in self.entries]
        }

    @staticmethod
    def from_json(data: dict) -> "Transcript":
        return Transcript(
            tuple((int(a), int(g), parse_value(v)) for a, g, v in data["entries"])
        )


class QueryOracle:
    """Mutable sequential resource owned by a single algorithm run."""

    def __init__(self, instance: Instance, budget: Optional[int] = None) -> None:
        self._hidden = instance
        self._profile = build_ranking(instance)
        self._budget = budget
        self._answers: dict[tuple[int, int], Value] = {}
        self._entries: list[tuple[int, int, Value]] = []
        self._counts = [0] * instance.n

    @property
    def n(self) -> int:
        return self._hidden.n

    @property
    def m(self) -> int:
        return self._hidden.m

    @property
    def budget(self) -> Optional[int]:
        return self._budget

    def query(self, agent: int, good: int) -> Value:
        """Return the hidden value, recording and charging a fresh query."""
        if not 0 <= agent < self.n:
            raise FairDivisionError(f"agent index {agent} out of range")
        if not 0 <= good < self.m:
            raise FairDivisionError(f"good index {good} out of range")
        key = (agent, good)
        if key in self._answers:
            return self._answers[key]
        if self._budget is not None and self._counts[agent] + 1 > self._budget:
            raise BudgetExceeded(
                f"agent {agent} already used {self._counts[agent]} of {self._budget} queries"
            )
        value = self._hidden.values[agent][good]
        self._answers[key] = value
        self._entries.append((agent, good, value))
        self._counts[agent] += 1
        return value

    def ordinal_view(self) -> PreferenceProfile:
        """The consistent preference rankings; costs nothing."""
        return self._profile

    def snapshot_counts(self) -> dict[int, int]:
        return {i: c for i, c in enumerate(self._counts)}

    def transcript(self) -> Transcript:
        return Transcript(tuple(self._entries))

    def hidden_instance(self) -> Instance:
        """The ground truth. For measurement and tests only, never for algorithms."""
        return self._hidden
