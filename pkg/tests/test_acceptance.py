"""Acceptance suite: one test per criterion, one PASS/FAIL line each.

Criteria 6 and 7 are statistical comparisons of desk-scale Monte Carlo
runs against pure limit laws.  The limit laws converge at rate
O(1/log n), which is ~0.1 at n = 10^5, so some of those pinned
tolerances are not attainable at the stated size with any correct
implementation; the assertions are still made exactly as stated, with
supporting diagnostics printed and a passing exact-expectation
cross-check (criterion 6b') demonstrating the pipeline itself is sound.
See notes in the README about finite-size deviations.
"""

import itertools
import math
import time
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from invperm.counting import build_table, max_inversions
from invperm.coupling import (
    BetaTable,
    enumerate_inversion_sequences,
    materialize_rho,
    solve_betas,
    symbolic_chain_distributions,
)
from invperm.experiments import (
    ExperimentConfig,
    run_block_census,
    run_component_census,
    run_monotonicity_check,
)
from invperm.limits import alpha_for_mu, threshold_params
from invperm.permutations import (
    blocks,
    decomposition_points,
    inversion_count,
    inversion_sequence,
    permutation_from_inversion_sequence,
    permutation_graph_edges,
    psi,
)
from invperm.rng import SamplerContext
from invperm.sampling import SplitSampler, sample_inversion_sequence

F = Fraction


def _report(name: str, ok: bool, detail: str = "") -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else ""))


# ---------------------------------------------------------------- criterion 1
def test_criterion_1_exact_counting():
    t0 = time.time()
    table12 = build_table(12)
    assert table12.row(3) == [1, 2, 2, 1]
    assert table12.count(4, 2) == 5 and table12.count(4, 3) == 6
    table40 = build_table(40)
    from invperm.counting import mahonian_polynomial

    for n in range(1, 41):
        row = table40.row(n)
        assert mahonian_polynomial(n) == row
        top = max_inversions(n)
        assert sum(row) == math.factorial(n)
        assert all(row[m] == row[top - m] for m in range(top + 1))
        assert all(
            row[m - 1] * row[m + 1] <= row[m] ** 2 for m in range(1, top)
        )
    elapsed = time.time() - t0
    ok = elapsed < 10.0
    _report(
        "criterion 1 (exact counting, n <= 40, < 10 s)",
        ok,
        f"{elapsed:.2f}s",
    )
    assert ok


# ---------------------------------------------------------------- criterion 2
def test_criterion_2_beta_construction():
    t0 = time.time()
    table = build_table(8)
    bt = BetaTable(table)
    entry = solve_betas(4, 2, table)
    assert entry.values == (F(7, 12), F(9, 12), F(10, 12))
    rho42 = materialize_rho(4, 2, bt)
    twelfth = [
        [5, 7, 0, 0, 0, 0],
        [5, 0, 7, 0, 0, 0],
        [0, 3, 0, 9, 0, 0],
        [0, 0, 3, 0, 9, 0],
        [0, 0, 0, 1, 1, 10],
    ]
    assert rho42.dense() == [[F(v, 12) for v in row] for row in twelfth]

    for n in range(2, 8):
        for m in range(max_inversions(n)):
            rho = materialize_rho(n, m, bt)
            row_totals = {x: F(0) for x in rho.rows}
            col_totals = {y: F(0) for y in rho.cols}
            for (x, y), v in rho.entries.items():
                assert 0 <= v <= 1
                row_totals[x] += v
                col_totals[y] += v
            assert all(v == 1 for v in row_totals.values())
            gamma = F(table.count(n, m), table.count(n, m + 1))
            assert all(v == gamma for v in col_totals.values())
            if 2 * m < max_inversions(n):
                for b in solve_betas(n, m, table).values:
                    assert 0 <= b <= 1
    elapsed = time.time() - t0
    ok = elapsed < 30.0
    _report(
        "criterion 2 (beta construction, n <= 7 all budgets, < 30 s)",
        ok,
        f"{elapsed:.2f}s",
    )
    assert ok


# ---------------------------------------------------------------- criterion 3
def test_criterion_3_chain_uniformity():
    t0 = time.time()
    table = build_table(7)
    bt = BetaTable(table)
    for n in range(2, 7):
        for m, dist in enumerate(symbolic_chain_distributions(n, bt)):
            size = table.count(n, m)
            assert len(dist) == size
            assert all(p == F(1, size) for p in dist.values())
    elapsed = time.time() - t0
    ok = elapsed < 60.0
    _report(
        "criterion 3 (exact chain uniformity, n <= 6 every budget, < 60 s)",
        ok,
        f"{elapsed:.2f}s",
    )
    assert ok


# ---------------------------------------------------------------- criterion 4
def test_criterion_4_monotonicity():
    t0 = time.time()
    report = run_monotonicity_check(8)
    elapsed = time.time() - t0
    ok = report.passed and elapsed < 300.0
    _report(
        "criterion 4 (monotonicity + domination + indecomposable totals, n <= 8, < 5 min)",
        ok,
        f"nondecreasing={report.nondecreasing_ok} domination={report.domination_ok} "
        f"totals={report.totals_ok} {elapsed:.1f}s",
    )
    assert ok


# ---------------------------------------------------------------- criterion 5
def test_criterion_5_bijection_and_structure():
    t0 = time.time()
    for n in range(1, 9):
        for word in itertools.permutations(range(1, n + 1)):
            x = inversion_sequence(word)
            assert permutation_from_inversion_sequence(x) == word
            cuts = decomposition_points(x)
            comps = _components(word)
            assert (len(cuts) == 0) == (len(comps) == 1)
            assert [set(range(a + 1, b + 1)) for a, b in
                    zip((0,) + tuple(cuts), tuple(cuts) + (n,))] == comps
            image = psi(word)
            assert psi(image) == word
            assert inversion_count(image) == sum(x)
            assert blocks(image).sizes == tuple(reversed(blocks(word).sizes))
    elapsed = time.time() - t0
    ok = elapsed < 120.0
    _report(
        "criterion 5 (bijection/connectivity/psi, exhaustive n <= 8, < 2 min)",
        ok,
        f"{elapsed:.1f}s",
    )
    assert ok


def _components(word):
    n = len(word)
    parent = list(range(n + 1))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in permutation_graph_edges(word):
        parent[find(a)] = find(b)
    comps = {}
    for v in range(1, n + 1):
        comps.setdefault(find(v), set()).add(v)
    return sorted(comps.values(), key=min)


# ---------------------------------------------------------------- criterion 6
N_DESK = 100_000
TRIALS_DESK = 2000


@pytest.fixture(scope="module")
def component_census():
    cfg = ExperimentConfig(
        n=N_DESK,
        mode="components",
        trials=TRIALS_DESK,
        seed=20_260_810,
        mu_list=[-1.0, 0.0, 1.0],
    )
    return run_component_census(cfg)


def test_criterion_6_poisson_limit(component_census):
    report = component_census
    lines = []
    for p in report.points:
        lines.append(
            f"mu={p.mu:+.0f}: lambda={p.lam:.4f} mean={p.mean:.4f} "
            f"se={p.stderr:.4f} gap={p.mean_gap_sigma:.1f}sigma "
            f"TV={p.tv:.4f} (mean_ok={p.mean_ok}, tv_ok={p.tv_ok})"
        )
    ok = all(p.mean_ok and p.tv_ok for p in report.points)
    _report(
        "criterion 6 (Poisson limit, n=1e5, mu in {-1,0,1}, 2000 trials)",
        ok,
        "; ".join(lines),
    )
    if not ok:
        print(
            "  note: E[C-1] exceeds n*h by a short-edge-block term of size "
            "Theta(1/log n) ~ 0.3 at n=1e5 (see criterion 6b cross-check and "
            "README); the pinned 3-sigma/TV<=0.1 bounds are not attainable "
            "at this n for the exact uniform law itself."
        )
    assert ok, "desk-scale gap to the asymptotic law exceeds pinned tolerances"


def test_criterion_6b_exact_expectation_cross_check():
    """Supporting evidence for criterion 6: at n=300 the empirical mean of
    C-1 from the production sampler matches the exactly computed
    E[C-1] = sum_j sum_a s(j,a) s(n-j, m-a) / s(n,m) well within Monte
    Carlo error, while E[C-1] itself sits far above n*h.  The criterion-6
    gap is a property of the finite-n distribution, not of this code."""
    n = 300
    _, m = alpha_for_mu(n, 0.0)
    table = build_table(n, m_cap=m)
    s_nm = table.count(n, m)
    total = 0
    for j in range(1, n):
        amax = min(max_inversions(j), m)
        row = table._rows[j]
        for a in range(amax + 1):
            other = table.count(n - j, m - a)
            if other:
                total += row[a] * other
    exact_mean = total / s_nm

    sampler = SplitSampler(n, m)
    trials = 20_000
    values = np.fromiter(
        (
            len(decomposition_points(sampler.sample(SamplerContext(None, 7, (0, t)))))
            for t in range(trials)
        ),
        dtype=np.int64,
        count=trials,
    )
    se = values.std(ddof=1) / math.sqrt(trials)
    gap = abs(values.mean() - exact_mean) / se
    lam = threshold_params(n, m).lam
    ok = gap <= 4.0
    _report(
        "criterion 6b (sampler mean vs exact E[C-1], n=300)",
        ok,
        f"exact={exact_mean:.4f} empirical={values.mean():.4f} gap={gap:.2f}sigma "
        f"(n*h={lam:.4f}: the finite-n excess {exact_mean - lam:+.4f} is real)",
    )
    assert ok


# ---------------------------------------------------------------- criterion 7
@pytest.fixture(scope="module")
def block_census():
    cfg = ExperimentConfig(
        n=N_DESK,
        mode="blocks",
        trials=TRIALS_DESK,
        seed=20_260_811,
        mu_list=[-3.0],
    )
    return run_block_census(cfg)


def test_criterion_7_block_size_limits(block_census):
    p = block_census.points[0]
    detail = (
        f"KS(U, Exp(1))={p.ks_min_exp:.4f} (<= 0.08: {p.ks_exp_ok}); "
        f"KS(V, Gumbel)={p.ks_max_gumbel:.4f} (<= 0.08: {p.ks_gumbel_ok}); "
        f"first/last two-sample p={p.first_last_pvalue:.4f} (> 1e-3: {p.first_last_ok})"
    )
    ok = p.ks_exp_ok and p.ks_gumbel_ok and p.first_last_ok
    _report(
        "criterion 7 (block-size limits, n=1e5, mu=-3, 2000 trials)", ok, detail
    )
    if not ok:
        print(
            "  note: at n=1e5, mu=-3 the expected number of decomposition-"
            "point pairs closer than nu is ~ (n h) * Theta(1/log n) ~ 4, so "
            "tiny internal blocks are near-certain and L_min is far from its "
            "Exp(1) limit; the law requires |mu| << log log log n.  The "
            "first/last symmetry is exact and passes."
        )
    assert ok, "desk-scale gap to the Exp/Gumbel limits exceeds pinned tolerances"


def test_criterion_7b_first_last_symmetry(block_census):
    p = block_census.points[0]
    ok = p.first_last_ok
    _report(
        "criterion 7b (L_first vs L_last equidistribution)",
        ok,
        f"two-sample KS p={p.first_last_pvalue:.4f}",
    )
    assert ok


# ---------------------------------------------------------------- criterion 8
def test_criterion_8_sampler_correctness():
    t0 = time.time()
    table = build_table(6)
    # symbolic: the sampler's per-coordinate preimage counts make every
    # outcome probability telescope to exactly 1/s(n,m)
    from invperm.sampling import _draw_last_coordinate

    for n in range(2, 7):
        for m in range(max_inversions(n) + 1):
            for x in enumerate_inversion_sequences(n, m):
                work = x if 2 * m <= max_inversions(n) else tuple(
                    i - v for i, v in enumerate(x)
                )
                budget = sum(work)
                prob = F(1)
                for level in range(n, 0, -1):
                    if budget == 0:
                        break
                    u_count = 0
                    total = table.count(level, budget)
                    for u in range(total):
                        if _draw_last_coordinate(table, level, budget, u) == work[level - 1]:
                            u_count += 1
                    prob *= F(u_count, total)
                    budget -= work[level - 1]
                assert prob == F(1, table.count(n, m))

    # empirical chi-square over X(4,2): 5 cells, 1e5 draws
    draws = 100_000
    counts = Counter(
        tuple(sample_inversion_sequence(4, 2, SamplerContext(table, 12, (t,))))
        for t in range(draws)
    )
    space = enumerate_inversion_sequences(4, 2)
    assert set(counts) == set(space)
    expect = draws / 5
    chisq = sum((counts[s] - expect) ** 2 / expect for s in space)
    pvalue = stats.chi2.sf(chisq, df=4)
    elapsed = time.time() - t0
    ok = pvalue > 1e-4
    _report(
        "criterion 8 (sampler exact-uniform symbolically n <= 6; chi-square X(4,2))",
        ok,
        f"p={pvalue:.4f} {elapsed:.1f}s",
    )
    assert ok
