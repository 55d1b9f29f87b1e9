"""Query-budgeted algorithms: threshold bucketing with a full-information
black box, and the partition-then-round-robin singleton filter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .core import (
    Allocation,
    DomainError,
    FairDivisionError,
    Instance,
    Value,
    fairness_report,
    trivial_few_goods_allocation,
    validate,
)
from .elicitation import QueryOracle
from .enclosures import pow_enclosure, sqrt_enclosure
from .ordinal import round_robin

FullInfoAllocator = Callable[[Instance], Allocation]


class BlackboxInvalid(FairDivisionError):
    """The full-information allocator returned a malformed allocation."""


class ParamDomainError(DomainError):
    """Algorithm parameters outside their admissible range."""


@dataclass(frozen=True)
class AgentVirtualValuation:
    """One agent's lower-bounding proxy valuation.

    ``top_values`` are the queried values of her first n-1 ranked goods.
    ``bucket_bounds`` lists, per threshold level, the last ranking position
    (0-based, inclusive) whose value clears that level; positions past the
    final bound get virtual value 0.
    """

    agent: int
    top_values: tuple[Value, ...]
    thresholds: tuple[Value, ...]
    bucket_bounds: tuple[int, ...]

    def virtual_row(self, ranking: Sequence[int], m: int) -> tuple[Value, ...]:
        anchor = self.top_values[-1] if self.top_values else Fraction(0)
        row = [Fraction(0)] * m
        for pos, v in enumerate(self.top_values):
            row[ranking[pos]] = v
        start = len(self.top_values)
        for level, bound in enumerate(self.bucket_bounds):
            level_value = anchor * self.thresholds[level]
            for pos in range(start, bound + 1):
                row[ranking[pos]] = level_value
            start = max(start, bound + 1)
        return tuple(row)


def bucket_thresholds(m: int, k: int) -> tuple[Value, ...]:
    """Lower rational enclosures of m**(-level/(k+1)) for level 1..k.

    Using the lower endpoint both for the search predicate and for the
    virtual values keeps every virtual value at most the true one.
    """
    return tuple(pow_enclosure(m, -level, k + 1)[0] for level in range(1, k + 1))


def _last_position_at_least(
    oracle: QueryOracle, agent: int, threshold: Value, lo: int, hi: int
) -> int:
    """Largest ranking position in [lo, hi] whose value >= threshold, or lo-1.

    Values along the ranking are nonincreasing, so the predicate is monotone
    and binary search applies; repeated probes are free via deduplication.
    """
    ranking = oracle.ordinal_view().rankings[agent]
    answer = lo - 1
    while lo <= hi:
        mid = (lo + hi) // 2
        if oracle.query(agent, ranking[mid]) >= threshold:
            answer = mid
            lo = mid + 1
        else:
            hi = mid - 1
    return answer


def bucketize(oracle: QueryOracle, agent: int, k: int) -> AgentVirtualValuation:
    """Learn one agent's top n-1 values, then cut the tail into value buckets.

    Spends at most (n-1) + k * ceil(log2 m) queries for the agent.
    """
    if k < 1:
        raise ParamDomainError("k must be >= 1")
    n, m = oracle.n, oracle.m
    if m < n:
        raise DomainError("bucketize requires m >= n")
    ranking = oracle.ordinal_view().rankings[agent]
    top_values = tuple(oracle.query(agent, ranking[pos]) for pos in range(n - 1))
    thresholds = bucket_thresholds(m, k)
    anchor = top_values[-1] if top_values else Fraction(0)
    bounds = []
    prev = n - 2
    for level_value in thresholds:
        if anchor == 0:
            bounds.append(prev)
            continue
        cut = _last_position_at_least(oracle, agent, anchor * level_value, prev + 1, m - 1)
        cut = max(cut, prev)
        bounds.append(cut)
        prev = cut
    return AgentVirtualValuation(agent, top_values, thresholds, tuple(bounds))


def virtual_instance(
    oracle: QueryOracle, virtuals: Sequence[AgentVirtualValuation]
) -> Instance:
    profile = oracle.ordinal_view()
    rows = tuple(
        virtuals[i].virtual_row(profile.rankings[i], oracle.m)
        for i in range(oracle.n)
    )
    return Instance(oracle.n, oracle.m, rows)


def virtual_efx(
    oracle: QueryOracle, k: int, blackbox: FullInfoAllocator
) -> tuple[Allocation, list[AgentVirtualValuation], Value]:
    """Build virtual valuations, delegate to a full-information allocator.

    Returns the allocation, the per-agent virtual valuations, and the EFX
    factor the allocation achieves under the virtual valuations (the
    quantity the transferred guarantee depends on).
    """
    if k < 1:
        raise ParamDomainError("k must be >= 1")
    n, m = oracle.n, oracle.m
    if m < n:
        return trivial_few_goods_allocation(n, m), [], Fraction(1)
    virtuals = [bucketize(oracle, i, k) for i in range(n)]
    proxy = virtual_instance(oracle, virtuals)
    allocation = blackbox(proxy)
    try:
        validate(proxy, allocation)
    except FairDivisionError as exc:
        raise BlackboxInvalid(str(exc)) from exc
    if not allocation.complete:
        raise BlackboxInvalid("black box returned a partial allocation")
    measured_rho = fairness_report(proxy, allocation).alpha_efx
    return allocation, virtuals, measured_rho


def virtual_efx_bound(m: int, k: int, measured_rho: Value) -> Value:
    """Guaranteed EFX floor rho' / (2 m**(1/(k+1))), rounded down to stay fair."""
    root_hi = pow_enclosure(m, 1, k + 1)[1]
    return measured_rho / (2 * root_hi)


@dataclass(frozen=True)
class PRRParams:
    """Segment sizes and value-gap thresholds for the singleton filter."""

    k: int
    alpha: tuple[int, ...]
    beta: tuple[Value, ...]
    lam: Optional[Value] = None

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ParamDomainError("k must be >= 1")
        if len(self.alpha) != self.k - 1 or len(self.beta) != self.k - 1:
            raise ParamDomainError("need exactly k-1 segment sizes and thresholds")
        if any(a < 1 for a in self.alpha):
            raise ParamDomainError("segment sizes must be >= 1")
        if any(b <= 0 for b in self.beta):
            raise ParamDomainError("thresholds must be positive")


def theorem5_params(n: int, m: int, k: int, lam: Value) -> PRRParams:
    """Parameterization achieving the query/EFX tradeoff guarantee.

    Sizes are ceil(lam * m**((2l-1)/(2k-1))); thresholds are upper rational
    enclosures of sqrt(k) * m**(2l/(2k-1)). Requires
    lam >= max(1, n / m**(1/(2k-1))), checked exactly via
    lam**(2k-1) * m >= n**(2k-1).
    """
    if k < 1:
        raise ParamDomainError("k must be >= 1")
    lam = Fraction(lam)
    if lam < 1 or lam ** (2 * k - 1) * m < n ** (2 * k - 1):
        raise ParamDomainError(
            "lam must be at least max(1, n / m**(1/(2k-1)))"
        )
    sqrt_k_hi = sqrt_enclosure(k)[1]
    alphas = []
    betas = []
    for level in range(1, k):
        rel = Fraction(1, 10**12)
        while True:
            lo, hi = pow_enclosure(m, 2 * level - 1, 2 * k - 1, rel)
            a_lo = math.ceil(lam * lo)
            a_hi = math.ceil(lam * hi)
            if a_lo == a_hi or rel < Fraction(1, 10**40):
                break
            rel /= 10**6
        alphas.append(a_hi)
        betas.append(sqrt_k_hi * pow_enclosure(m, 2 * level, 2 * k - 1)[1])
    if sum(alphas) >= m:
        raise ParamDomainError("segment sizes must leave goods for the final segment")
    return PRRParams(k=k, alpha=tuple(alphas), beta=tuple(betas), lam=lam)


def theorem5_bound(n: int, m: int, k: int, lam: Value) -> Value:
    """Lower endpoint of the guaranteed EFX floor for theorem5 parameters."""
    sqrt_k_hi = sqrt_enclosure(k)[1]
    root_hi = pow_enclosure(m, 1, 2 * k - 1)[1]
    lam = Fraction(lam)
    first = 1 / ((sqrt_k_hi + 1) * lam * root_hi)
    second = 1 / (1 + sqrt_k_hi * Fraction(n) / lam * root_hi)
    return min(first, second)


def _segment_tops(
    ranking: Sequence[int], taken: Sequence[bool], alpha: Sequence[int], k: int
) -> list[int]:
    """First available good of each of the k rank segments (sizes alpha + rest)."""
    available = [g for g in ranking if not taken[g]]
    tops = []
    start = 0
    for level in range(k):
        if start >= len(available):
            break
        tops.append(available[start])
        size = alpha[level] if level < k - 1 else len(available) - start
        start += size
    return tops


def prr(oracle: QueryOracle, params: PRRParams) -> Allocation:
    """Give a singleton to each agent whose top good dwarfs her segment tops,
    then round-robin the remaining goods among everyone else.

    Each agent is considered at most once and queried for at most k goods.
    """
    n, m = oracle.n, oracle.m
    if m < n:
        return trivial_few_goods_allocation(n, m)
    profile = oracle.ordinal_view()
    k = params.k
    active = set(range(n))
    singled: dict[int, int] = {}
    rr_agents = set(range(n))
    taken = [False] * m

    while active and len(singled) < n - 1:
        tops = {}
        for i in sorted(active):
            tops[i] = next(g for g in profile.rankings[i] if not taken[g])
        top_goods = sorted(set(tops.values()))
        progressed = False
        for g in top_goods:
            if taken[g]:
                continue
            for i in sorted(i for i in active if tops[i] == g):
                if i not in active:
                    continue
                segment_tops = _segment_tops(
                    profile.rankings[i], taken, params.alpha, k
                )
                seg_values = [oracle.query(i, sg) for sg in segment_tops]
                active.discard(i)
                progressed = True
                top_value = seg_values[0]
                if all(
                    top_value >= params.beta[level - 1] * seg_values[level]
                    for level in range(1, len(seg_values))
                ):
                    singled[i] = segment_tops[0]
                    taken[segment_tops[0]] = True
                    rr_agents.discard(i)
                    break
                if len(singled) >= n - 1:
                    break
            if len(singled) >= n - 1:
                break
        if not progressed:
            break

    bundles: list[set[int]] = [set() for _ in range(n)]
    for i, g in singled.items():
        bundles[i].add(g)
    remaining = [g for g in range(m) if not taken[g]]
    if remaining:
        rr = round_robin(oracle, participants=sorted(rr_agents), pool=remaining)
        for i in range(n):
            bundles[i] |= set(rr.bundles[i])
    return Allocation(tuple(frozenset(b) for b in bundles), complete=True)
