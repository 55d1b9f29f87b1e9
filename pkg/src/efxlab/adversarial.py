"""Hard instance families with identical rankings, plus the adversary that
picks a consistent valuation after seeing an algorithm's queries and output.

Both families hide the valuation behind a shared ranking; the adversary
responds to a (transcript, allocation) pair with a completion that agrees
with every answered query and with the ranking, chosen to make the
achieved EFX factor as small as the construction allows.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import (
    Allocation,
    DomainError,
    FairDivisionError,
    Instance,
    Value,
    fairness_report,
    validate,
)
from .elicitation import Transcript
from .enclosures import sqrt_enclosure


class InconsistentTranscript(FairDivisionError):
    """Transcript answers disagree with the family's revealed values."""


@dataclass(frozen=True)
class OrdinalLBFamily:
    """Identical rankings; two consistent valuations an ordinal algorithm
    cannot tell apart: top n-1 goods worth 1 and the rest 0, or all ones."""

    n: int
    m: int
    case1: Instance
    case2: Instance


def ordinal_lb_build(n: int, m: int) -> OrdinalLBFamily:
    if m <= n + 2:
        raise DomainError("family requires m > n + 2")
    one, zero = Fraction(1), Fraction(0)
    case1_row = tuple(one if g < n - 1 else zero for g in range(m))
    case1 = Instance(n, m, tuple(case1_row for _ in range(n)))
    case2 = Instance(n, m, tuple(tuple(one for _ in range(m)) for _ in range(n)))
    return OrdinalLBFamily(n, m, case1, case2)


def ordinal_adversary_pick(
    family: OrdinalLBFamily, allocation: Allocation
) -> tuple[Instance, Value]:
    """Choose the consistent valuation under which the allocation fares worst.

    If some top-(n-1) good sits in a bundle of size >= 2 the sparse
    valuation gives factor 0; otherwise the top goods are singletons and
    the all-ones valuation caps the factor at 1/(m-n).
    """
    validate(family.case1, allocation)
    if not allocation.complete:
        raise DomainError("adversary requires a complete allocation")
    top = set(range(family.n - 1))
    for bundle in allocation.bundles:
        if len(bundle) >= 2 and bundle & top:
            return family.case1, Fraction(0)
    return family.case2, Fraction(1, family.m - family.n)


@dataclass(frozen=True)
class QueryLBFamily:
    """Shared ranking: n-1 top goods, then k-1 segments of sharply decaying
    value, then a large zero-valued block; m = t**(2k-1)."""

    n: int
    k: int
    t: int
    m: int
    segment_sizes: tuple[int, ...]  # sizes of the k-1 middle segments
    block_size: int  # size of the trailing zero block
    top_value: Value  # rational stand-in for sqrt(k) (lower enclosure)
    top_value_hi: Value  # matching upper enclosure
    revealed: Instance  # every agent at the revealed values

    def segment_value(self, level: int) -> Value:
        """Revealed value of goods in middle segment ``level`` (1-based)."""
        return Fraction(1, self.t ** (2 * level))

    def good_block(self, good: int) -> tuple[str, int]:
        """Classify a good index: ("top", pos), ("seg", level) or ("block", 0)."""
        if good < self.n - 1:
            return "top", good
        offset = good - (self.n - 1)
        for level, size in enumerate(self.segment_sizes, start=1):
            if offset < size:
                return "seg", level
            offset -= size
        return "block", 0


def query_lb_build(n: int, k: int, t: int) -> QueryLBFamily:
    """Build the family for m = t**(2k-1) goods.

    Requires m > n + 2 and a trailing block of at least m/4 goods, which
    rules out degenerate sizes where the target factor is unattainable.
    """
    if n < 2 or k < 1 or t < 2:
        raise DomainError("need n >= 2, k >= 1, t >= 2")
    m = t ** (2 * k - 1)
    if m <= n + 2:
        raise DomainError("family requires m > n + 2")
    sizes = tuple(t ** (2 * level - 1) for level in range(1, k))
    block = m - (n - 1) - sum(sizes)
    if 4 * block < m:
        raise DomainError("trailing zero block must hold at least a quarter of the goods")
    sqrt_lo, sqrt_hi = sqrt_enclosure(k)
    row: list[Value] = []
    row.extend([sqrt_lo] * (n - 1))
    for level, size in enumerate(sizes, start=1):
        row.extend([Fraction(1, t ** (2 * level))] * size)
    row.extend([Fraction(0)] * block)
    revealed = Instance(n, m, tuple(tuple(row) for _ in range(n)))
    return QueryLBFamily(
        n=n,
        k=k,
        t=t,
        m=m,
        segment_sizes=sizes,
        block_size=block,
        top_value=sqrt_lo,
        top_value_hi=sqrt_hi,
        revealed=revealed,
    )


def _pair_cap(instance: Instance, allocation: Allocation, i: int, j: int) -> Value:
    """Capped EFX contribution of the ordered pair (i, j); 1 if unconstrained."""
    row = instance.values[i]
    own = sum((row[g] for g in allocation.bundles[i]), Fraction(0))
    bundle = allocation.bundles[j]
    if not bundle:
        return Fraction(1)
    worst = sum((row[g] for g in bundle), Fraction(0)) - min(row[g] for g in bundle)
    if worst <= 0:
        return Fraction(1)
    return min(Fraction(1), own / worst)


def _with_row(base: Instance, agent: int, row: tuple[Value, ...]) -> Instance:
    rows = list(base.values)
    rows[agent] = row
    return Instance(base.n, base.m, tuple(rows))


def query_adversary_complete(
    family: QueryLBFamily, transcript: Transcript, allocation: Allocation
) -> tuple[Instance, Value]:
    """Pick a consistent completion minimizing the achieved EFX factor.

    Mirrors the family's case analysis: a top good in a bundle of size two
    or more already sinks the unserved agent under the revealed values;
    otherwise the top goods are singletons, and the valuation of the agent
    holding the last top good is bent on whatever she left unqueried (her
    own good dropped a tier, or an untouched segment raised a tier).

    Returns the completion and the exact capped envy factor of the pair the
    construction targets (an upper bound on the allocation's EFX factor).
    """
    revealed = family.revealed
    validate(revealed, allocation)
    if not allocation.complete:
        raise DomainError("adversary requires a complete allocation")
    queried: dict[int, set[int]] = {i: set() for i in range(family.n)}
    for agent, good, value in transcript.entries:
        if revealed.values[agent][good] != value:
            raise InconsistentTranscript(
                f"transcript says v_{agent}(g{good}) = {value}, family reveals "
                f"{revealed.values[agent][good]}"
            )
        queried[agent].add(good)

    n = family.n
    top = set(range(n - 1))
    owner = {g: j for j, b in enumerate(allocation.bundles) for g in b}
    unserved = next(i for i in range(n) if not (allocation.bundles[i] & top))

    for g in sorted(top):
        holder = owner[g]
        if len(allocation.bundles[holder]) >= 2:
            return revealed, _pair_cap(revealed, allocation, unserved, holder)

    # All top goods are singleton bundles; the remaining agent holds the rest.
    last_top = n - 2
    holder = owner[last_top]
    ranking_row = list(revealed.values[holder])

    if last_top not in queried[holder]:
        # Drop the unqueried own good to the next tier's value.
        next_value = family.segment_value(1) if family.k >= 2 else Fraction(0)
        ranking_row[last_top] = next_value
        completed = _with_row(revealed, holder, tuple(ranking_row))
        return completed, _pair_cap(completed, allocation, holder, unserved)

    # Otherwise raise the lowest entirely-unqueried tier to its predecessor's value.
    tiers: list[tuple[str, int]] = [("seg", level) for level in range(1, family.k)]
    tiers.append(("block", 0))
    for kind, level in tiers:
        members = [
            g for g in range(family.m) if family.good_block(g) == (kind, level)
        ]
        if any(g in queried[holder] for g in members):
            continue
        if kind == "seg":
            raised = (
                family.top_value if level == 1 else family.segment_value(level - 1)
            )
        else:
            raised = (
                family.segment_value(family.k - 1)
                if family.k >= 2
                else family.top_value
            )
        for g in members:
            ranking_row[g] = raised
        completed = _with_row(revealed, holder, tuple(ranking_row))
        return completed, _pair_cap(completed, allocation, holder, unserved)

    raise DomainError(
        "no entirely-unqueried tier exists; transcript exceeds the family's budget"
    )
