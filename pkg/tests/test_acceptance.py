"""Acceptance suite: one test per advertised guarantee, each printing a
single "criterion N: PASS/FAIL" line with the measured scale and runtime.

Every check compares an algorithm's exact rational output against an
independently computed bound (brute force, closed-form fraction, or a sound
rational enclosure), never against the algorithm's own bookkeeping.
"""

import math
import random
import time
from fractions import Fraction

from efxlab import (
    Instance,
    QueryOracle,
    best_alpha_bruteforce,
    envy_cycle_heuristic,
    exact_efx_bruteforce,
    fairness_report,
    match_and_freeze,
    mfrr,
    ordinal_adversary_pick,
    ordinal_lb_build,
    prr,
    round_robin,
    rrla,
    theorem5_bound,
    theorem5_params,
    two_query_bivalued,
    virtual_efx,
    virtual_efx_bound,
)
from efxlab.harness import adversary_query, default_lambda


def exact_blackbox(instance):
    return best_alpha_bruteforce(instance)[1]


def report(num, ok, detail):
    print(f"criterion {num}: {'PASS' if ok else 'FAIL'} — {detail}")
    assert ok, f"criterion {num} failed: {detail}"


def random_corpus(count, n_max, m_max, seed):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.randint(2, n_max)
        m = rng.randint(1, m_max)
        rows = [[Fraction(rng.randint(0, 20)) for _ in range(m)] for _ in range(n)]
        out.append(Instance.from_rows(rows))
    return out


def random_bivalued_corpus(count, n_max, m_max, seed, m_min=None):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.randint(2, n_max)
        lo_m = m_min(n) if m_min else n
        m = rng.randint(lo_m, m_max)
        rows, meta = [], []
        for _ in range(n):
            h = rng.randint(2, 9)
            low = rng.randint(1, h - 1)
            rows.append(
                [Fraction(h if rng.random() < 0.5 else low) for _ in range(m)]
            )
            meta.append((Fraction(h), Fraction(low)))
        out.append(Instance.from_rows(rows, meta))
    return out


def test_criterion_1_round_robin_ef1_exact():
    start = time.perf_counter()
    corpus = random_corpus(1000, 6, 30, seed=101)
    bad = 0
    for inst in corpus:
        oracle = QueryOracle(inst)
        allocation = round_robin(oracle)
        if fairness_report(inst, allocation).alpha_ef1 != 1:
            bad += 1
        if any(oracle.snapshot_counts().values()):
            bad += 1
    elapsed = time.perf_counter() - start
    report(
        1,
        bad == 0 and elapsed < 10,
        f"1000 instances, alpha_ef1 = 1 with zero queries, "
        f"{bad} violations, {elapsed:.2f}s < 10s",
    )


def test_criterion_2_rrla_lower_bound_and_tightness():
    start = time.perf_counter()
    corpus = [i for i in random_corpus(1000, 6, 30, seed=101) if i.m > i.n]
    bad = 0
    for inst in corpus:
        allocation = rrla(QueryOracle(inst))
        if fairness_report(inst, allocation).alpha_efx < Fraction(1, inst.m - inst.n):
            bad += 1
    tight = 0
    pairs = [(n, m) for n in range(2, 6) for m in range(6, 13)]
    for n, m in pairs:
        inst = Instance.from_rows([[Fraction(1)] * m] * n)
        allocation = rrla(QueryOracle(inst))
        if fairness_report(inst, allocation).alpha_efx == Fraction(1, m - n):
            tight += 1
    elapsed = time.perf_counter() - start
    report(
        2,
        bad == 0 and tight == len(pairs) and elapsed < 10,
        f"{len(corpus)} instances >= 1/(m-n) ({bad} violations), equality on "
        f"{tight}/{len(pairs)} all-ones families, {elapsed:.2f}s < 10s",
    )


def test_criterion_3_ordinal_adversary():
    start = time.perf_counter()
    checked, bad = 0, 0
    for n in range(2, 5):
        for m in range(n + 3, 13):
            family = ordinal_lb_build(n, m)
            for alg in (round_robin, rrla):
                allocation = alg(QueryOracle(family.case1))
                picked, bound = ordinal_adversary_pick(family, allocation)
                measured = fairness_report(picked, allocation).alpha_efx
                checked += 1
                if not (measured <= bound <= Fraction(1, m - n)):
                    bad += 1
    elapsed = time.perf_counter() - start
    report(
        3,
        bad == 0 and elapsed < 5,
        f"{checked} adversary runs with alpha <= 1/(m-n), "
        f"{bad} violations, {elapsed:.2f}s < 5s",
    )


def _virtual_query_ceiling_ok(oracle, k):
    n, m = oracle.n, oracle.m
    ceiling = (n - 1) + k * math.ceil(math.log2(m)) if m > 1 else n
    return all(c <= ceiling for c in oracle.snapshot_counts().values())


def test_criterion_4_virtual_efx_transferred_guarantee():
    start = time.perf_counter()
    rng = random.Random(401)
    bad = 0
    # (a) exact black box at brute-forceable scale.
    for inst in random_corpus(200, 3, 9, seed=402):
        k = rng.choice((1, 2, 3))
        oracle = QueryOracle(inst)
        allocation, _, _ = virtual_efx(oracle, k, exact_blackbox)
        alpha = fairness_report(inst, allocation).alpha_efx
        if alpha < virtual_efx_bound(inst.m, k, Fraction(1)):
            bad += 1
        if not _virtual_query_ceiling_ok(oracle, k):
            bad += 1
    # (b) envy-cycle black box at scale, bound via the measured virtual factor.
    for _ in range(200):
        n = rng.randint(2, 6)
        m = rng.randint(n, 200)
        rows = [[Fraction(rng.randint(0, 20)) for _ in range(m)] for _ in range(n)]
        inst = Instance.from_rows(rows)
        k = rng.randint(1, 8)
        oracle = QueryOracle(inst)
        allocation, _, measured_rho = virtual_efx(oracle, k, envy_cycle_heuristic)
        alpha = fairness_report(inst, allocation).alpha_efx
        if alpha < virtual_efx_bound(m, k, measured_rho):
            bad += 1
        if not _virtual_query_ceiling_ok(oracle, k):
            bad += 1
    elapsed = time.perf_counter() - start
    report(
        4,
        bad == 0 and elapsed < 60,
        f"200 exact-box + 200 envy-cycle runs within bound and query ceiling, "
        f"{bad} violations, {elapsed:.2f}s < 60s",
    )


def test_criterion_5_prr_bound():
    start = time.perf_counter()
    rng = random.Random(501)
    bad = 0
    for _ in range(300):
        n = rng.randint(2, 5)
        m = rng.choice((32, 243, 1024))
        k = rng.choice((2, 3))
        lam = default_lambda(n, m, k)
        rows = [[Fraction(rng.randint(0, 20)) for _ in range(m)] for _ in range(n)]
        inst = Instance.from_rows(rows)
        oracle = QueryOracle(inst, budget=k)
        allocation = prr(oracle, theorem5_params(n, m, k, lam))
        alpha = fairness_report(inst, allocation).alpha_efx
        if alpha < theorem5_bound(n, m, k, lam):
            bad += 1
        if any(c > k for c in oracle.snapshot_counts().values()):
            bad += 1
    elapsed = time.perf_counter() - start
    report(
        5,
        bad == 0 and elapsed < 30,
        f"300 runs >= closed-form bound within k queries, "
        f"{bad} violations, {elapsed:.2f}s < 30s",
    )


def test_criterion_6_query_adversary():
    start = time.perf_counter()
    checked, bad = 0, 0
    # k = 1 families collapse below the m > n + 2 / block-size floor the
    # construction needs, so the grid starts at k = 2.
    for n in (2, 3):
        for k in (2, 3):
            for t in (2, 3):
                for alg in ("round_robin", "rrla", "prr"):
                    result = adversary_query(n, k, t, alg, budget=k)
                    checked += 1
                    if not (result["pass"] and result["consistent"]):
                        bad += 1
    elapsed = time.perf_counter() - start
    report(
        6,
        bad == 0 and elapsed < 20,
        f"{checked} budgeted runs, completions consistent and capped at "
        f"2*sqrt(k)*m^(-1/(2k-1)), {bad} violations, {elapsed:.2f}s < 20s",
    )


def test_criterion_7_bivalued_exact_efx():
    start = time.perf_counter()
    bad = 0
    for inst in random_bivalued_corpus(300, 4, 10, seed=701):
        allocation = match_and_freeze(inst)
        if fairness_report(inst, allocation).alpha_efx != 1:
            bad += 1
        if exact_efx_bruteforce(inst) is None:
            bad += 1
    elapsed = time.perf_counter() - start
    report(
        7,
        bad == 0 and elapsed < 60,
        f"300 bivalued instances, exact EFX achieved and independently "
        f"confirmed, {bad} violations, {elapsed:.2f}s < 60s",
    )


def test_criterion_8_mfrr_guarantee():
    start = time.perf_counter()
    bad = 0
    for inst in random_bivalued_corpus(500, 6, 40, seed=801):
        oracle = QueryOracle(inst)
        allocation = mfrr(oracle)
        if fairness_report(inst, allocation).alpha_efx < Fraction(1, 2):
            bad += 1
        ceiling = 1 + math.ceil(math.log2(inst.n))
        if any(c > ceiling for c in oracle.snapshot_counts().values()):
            bad += 1
    elapsed = time.perf_counter() - start
    report(
        8,
        bad == 0 and elapsed < 30,
        f"500 bivalued instances >= 1/2 within 1+ceil(log2 n) queries, "
        f"{bad} violations, {elapsed:.2f}s < 30s",
    )


def test_criterion_9_two_query_guarantee():
    start = time.perf_counter()
    bad = 0
    corpus = random_bivalued_corpus(500, 6, 40, seed=901, m_min=lambda n: 2 * n)
    for inst in corpus:
        oracle = QueryOracle(inst, budget=2)
        allocation = two_query_bivalued(oracle)
        if fairness_report(inst, allocation).alpha_efx < Fraction(1, inst.n):
            bad += 1
        if any(c > 2 for c in oracle.snapshot_counts().values()):
            bad += 1
    elapsed = time.perf_counter() - start
    report(
        9,
        bad == 0 and elapsed < 20,
        f"500 bivalued instances >= 1/n within 2 queries, "
        f"{bad} violations, {elapsed:.2f}s < 20s",
    )


def test_criterion_10_no_algorithm_beats_brute_force():
    start = time.perf_counter()
    rng = random.Random(1001)
    sizes = {2: (4, 16), 3: (6, 10), 4: (8, 8)}
    bad = 0
    ran = {name: 0 for name in (
        "round_robin", "rrla", "virtual_efx", "prr",
        "match_freeze", "mfrr", "two_query",
    )}
    for _ in range(100):
        n = rng.choice((2, 3, 4))
        lo, hi = sizes[n]
        m = rng.randint(lo, hi)
        rows, meta = [], []
        for _ in range(n):
            h = rng.randint(2, 9)
            low = rng.randint(1, h - 1)
            rows.append(
                [Fraction(h if rng.random() < 0.5 else low) for _ in range(m)]
            )
            meta.append((Fraction(h), Fraction(low)))
        inst = Instance.from_rows(rows, meta)
        best = best_alpha_bruteforce(inst)[0]
        runs = {
            "round_robin": lambda: round_robin(QueryOracle(inst)),
            "rrla": lambda: rrla(QueryOracle(inst)),
            "virtual_efx": lambda: virtual_efx(
                QueryOracle(inst), 2, envy_cycle_heuristic
            )[0],
            "prr": lambda: prr(
                QueryOracle(inst),
                theorem5_params(n, m, 2, default_lambda(n, m, 2)),
            ),
            "match_freeze": lambda: match_and_freeze(inst),
            "mfrr": lambda: mfrr(QueryOracle(inst)),
            "two_query": lambda: two_query_bivalued(QueryOracle(inst)),
        }
        for name, run in runs.items():
            allocation = run()
            ran[name] += 1
            if fairness_report(inst, allocation).alpha_efx > best:
                bad += 1
    elapsed = time.perf_counter() - start
    every_ran = all(v > 0 for v in ran.values())
    report(
        10,
        bad == 0 and every_ran and elapsed < 120,
        f"100 instances x 7 algorithms, alpha_efx never exceeds the "
        f"brute-force optimum, {bad} violations, {elapsed:.2f}s < 120s",
    )
