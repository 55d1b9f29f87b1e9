"""Algorithms for instances where each agent has one high and one low value.

The full-information routine matches unfrozen agents to high-valued goods
each round and freezes agents who take a high good someone else wanted;
the query version first uncovers each agent's valuation (or learns it is
flat near the top) with a short binary search, then interleaves matching
rounds with round-robin picks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .core import (
    Allocation,
    DomainError,
    FairDivisionError,
    Instance,
    Value,
    trivial_few_goods_allocation,
)
from .elicitation import QueryOracle
from .query_enhanced import PRRParams, prr


class NotBivalued(FairDivisionError):
    """Instance is not (or not declared) bivalued."""


class ZeroLowValue(FairDivisionError):
    """A zero low value makes the freeze duration undefined."""


@dataclass
class MatchFreezeState:
    """Mutable per-run bookkeeping for the matching rounds."""

    freeze_counters: list[int]
    pool: set[int]
    bundles: list[set[int]]
    frozen_events: list[int] = field(default_factory=list)


def prioritized_max_matching(
    agents: Sequence[int],
    high_edges: dict[int, Sequence[int]],
    pool: set[int],
) -> dict[int, int]:
    """Maximum matching whose matched-agent set is lexicographically optimal
    with respect to the given priority order.

    Standard augmenting-path construction: agents are tried in order, and an
    agent joins the matching exactly when an augmenting path exists; earlier
    commitments are never undone.
    """
    match_of_good: dict[int, int] = {}
    match_of_agent: dict[int, int] = {}

    def augment(agent: int, visited: set[int]) -> bool:
        for g in high_edges.get(agent, ()):
            if g not in pool or g in visited:
                continue
            visited.add(g)
            holder = match_of_good.get(g)
            if holder is None or augment(holder, visited):
                match_of_good[g] = agent
                match_of_agent[agent] = g
                return True
        return False

    for agent in agents:
        augment(agent, set())
    return match_of_agent


def _check_bivalued(instance: Instance, participants: Sequence[int]) -> None:
    if instance.bivalued_meta is None:
        raise NotBivalued("instance has no bivalued metadata")
    for i in participants:
        if instance.bivalued_meta[i][1] == 0:
            raise ZeroLowValue(f"agent {i} has low value 0")


def match_freeze_round(
    instance: Instance,
    participants: Sequence[int],
    state: MatchFreezeState,
) -> None:
    """One matching round: matched agents take high goods, the rest take the
    lowest-index available good, and freeze counters are updated in place."""
    assert instance.bivalued_meta is not None
    meta = instance.bivalued_meta
    unfrozen = []
    for i in participants:
        if state.freeze_counters[i] > 0:
            state.freeze_counters[i] -= 1
        else:
            unfrozen.append(i)
    # Higher high-to-low ratio first, ties by agent index.
    priority = sorted(unfrozen, key=lambda i: (-(meta[i][0] / meta[i][1]), i))
    high_edges = {
        i: [g for g in sorted(state.pool) if instance.values[i][g] == meta[i][0]]
        for i in unfrozen
    }
    matching = prioritized_max_matching(priority, high_edges, state.pool)
    for i, g in matching.items():
        state.bundles[i].add(g)
        state.pool.discard(g)
    matched_this_round = list(matching.items())
    # Unmatched agents pick lowest-index goods, the agent with the smallest
    # bundle first: when the pool runs dry mid-round, the leftover must go
    # to whoever is behind, or exact EFX is lost.
    unmatched = sorted(
        set(unfrozen) - set(matching), key=lambda i: (len(state.bundles[i]), i)
    )
    for i in unmatched:
        if not state.pool:
            break
        g = min(state.pool)
        state.bundles[i].add(g)
        state.pool.discard(g)
        h_i, l_i = meta[i]
        for j, gj in matched_this_round:
            if instance.values[i][gj] == h_i:
                # ceil(h/l) - 1 low goods are needed to catch up to the lost
                # high good; the floor variant undercompensates whenever l
                # does not divide h, and measurably breaks exact EFX.
                duration = math.ceil(h_i / l_i) - 1
                if state.freeze_counters[j] == 0 and duration > 0:
                    state.frozen_events.append(j)
                state.freeze_counters[j] = duration


def match_and_freeze(
    instance: Instance,
    participants: Optional[Sequence[int]] = None,
    state: Optional[MatchFreezeState] = None,
) -> Allocation | MatchFreezeState:
    """Full run of the matching-with-freezing procedure over all goods.

    When ``state`` is supplied, performs a single round instead and returns
    the updated state (the caller owns the loop).
    """
    agents = list(participants) if participants is not None else list(range(instance.n))
    _check_bivalued(instance, agents)
    if state is not None:
        match_freeze_round(instance, agents, state)
        return state
    run_state = MatchFreezeState(
        freeze_counters=[0] * instance.n,
        pool=set(range(instance.m)),
        bundles=[set() for _ in range(instance.n)],
    )
    if not agents:
        raise DomainError("participants must be nonempty")
    while run_state.pool:
        match_freeze_round(instance, agents, run_state)
    return Allocation(
        tuple(frozenset(b) for b in run_state.bundles), complete=True
    )


@dataclass(frozen=True)
class TransitionInfo:
    """Uncovered valuation of an agent with a high-to-low drop in her top-n."""

    high: Value
    low: Value
    transition_rank: int  # 1-based rank of the first low-valued good


def discover_transition(
    oracle: QueryOracle, agent: int
) -> Optional[TransitionInfo]:
    """Binary-search the agent's top-n ranks for the high-to-low drop.

    Returns None when all top-n values are equal (nothing uncovered).
    Spends at most 1 + ceil(log2 n) queries. Raises NotBivalued if a third
    distinct value shows up among the probes.
    """
    n = oracle.n
    if oracle.m < n:
        raise DomainError("discover_transition requires m >= n")
    ranking = oracle.ordinal_view().rankings[agent]
    top_value = oracle.query(agent, ranking[0])
    observed = {top_value}
    # First 1-based rank r in [2, n] whose value is below the top, if any.
    lo, hi = 2, n
    first_low = None
    while lo <= hi:
        mid = (lo + hi) // 2
        v = oracle.query(agent, ranking[mid - 1])
        observed.add(v)
        if len(observed) > 2:
            raise NotBivalued(f"agent {agent}: three distinct values observed")
        if v < top_value:
            first_low = mid
            hi = mid - 1
        else:
            lo = mid + 1
    if first_low is None:
        return None
    low = next(v for v in observed if v != top_value)
    return TransitionInfo(high=top_value, low=low, transition_rank=first_low)


def _uncovered_instance(
    oracle: QueryOracle, transitions: dict[int, TransitionInfo]
) -> Instance:
    """Materialize the valuations the transitions fully determine.

    Agents without a transition get an all-zero placeholder row; the
    matching rounds never look at those rows.
    """
    profile = oracle.ordinal_view()
    n, m = oracle.n, oracle.m
    rows = []
    meta = []
    for i in range(n):
        info = transitions.get(i)
        if info is None:
            rows.append([Fraction(0)] * m)
            meta.append((Fraction(1), Fraction(0)))
            continue
        row = [Fraction(0)] * m
        for pos, g in enumerate(profile.rankings[i]):
            row[g] = info.high if pos < info.transition_rank - 1 else info.low
        rows.append(row)
        meta.append((info.high, info.low))
    return Instance(n, m, tuple(tuple(r) for r in rows), tuple(meta))


def mfrr(oracle: QueryOracle) -> Allocation:
    """Uncover transitions, then alternate one matching round for the
    uncovered agents with one round-robin pick for the flat-top agents."""
    n, m = oracle.n, oracle.m
    if m < n:
        return trivial_few_goods_allocation(n, m)
    profile = oracle.ordinal_view()
    transitions: dict[int, TransitionInfo] = {}
    flat: list[int] = []
    for i in range(n):
        info = discover_transition(oracle, i)
        if info is not None:
            if info.low == 0:
                raise ZeroLowValue(f"agent {i} has low value 0")
            transitions[i] = info
        else:
            flat.append(i)
    uncovered = _uncovered_instance(oracle, transitions)
    matched_agents = sorted(transitions)
    state = MatchFreezeState(
        freeze_counters=[0] * n,
        pool=set(range(m)),
        bundles=[set() for _ in range(n)],
    )
    cursor = [0] * n
    while state.pool:
        if matched_agents:
            match_freeze_round(uncovered, matched_agents, state)
        for i in flat:
            if not state.pool:
                break
            pos = cursor[i]
            ranking = profile.rankings[i]
            while ranking[pos] not in state.pool:
                pos += 1
            cursor[i] = pos + 1
            state.bundles[i].add(ranking[pos])
            state.pool.discard(ranking[pos])
    return Allocation(tuple(frozenset(b) for b in state.bundles), complete=True)


def two_query_bivalued(oracle: QueryOracle) -> Allocation:
    """Two queries per agent: a singleton filter with one cut of size n-1
    and threshold m/2, then round-robin for everyone else."""
    n, m = oracle.n, oracle.m
    if m < 2 * n:
        raise DomainError("two-query variant requires m >= 2n")
    params = PRRParams(k=2, alpha=(n - 1,), beta=(Fraction(m, 2),))
    return prr(oracle, params)
