"""The uniformity-preserving one-ball-at-a-time Markov process.

States are inversion sequences; one step adds 1 to a single coordinate.
The transition matrix rho(n, m) from sum-m states to sum-(m+1) states is
block-bidiagonal: with probability beta_{j+1} (j = current last
coordinate) the last coordinate is incremented, otherwise the step
recurses into the length-(n-1) prefix with budget m - j.  The beta's are
the unique solution of

    beta_{k-1} + (1 - beta_k) * gamma_{k-1} = gamma,    beta_0 = 0,

with gamma = s(n,m)/s(n,m+1) and gamma_i = s(n-1,m-i)/s(n-1,m-i+1); this
forces every row sum to 1 and every column sum to s(n,m)/s(n,m+1), which
is exactly the condition for a uniform state at m to stay uniform at m+1.
Budgets at or above half the maximum are realized through the transpose
of the mirrored matrix (the reflection x_i -> (i-1) - x_i swaps the two).

Everything here is exact rational arithmetic; randomness enters only at
the final Bernoulli/categorical draw, performed exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .counting import InversionTable, max_inversions
from .rng import SamplerContext
from .sampling import reflect_sequence

_MATERIALIZE_LIMIT = 9


class BetaSolveError(AssertionError):
    """Internal-consistency failure of the beta system (never expected)."""


@dataclass(frozen=True)
class BetaEntry:
    """Solved parameters for one (level, budget), or a reflection marker."""

    n: int
    m: int
    reflected: bool
    reflected_budget: int | None
    values: tuple[Fraction, ...] | None


class _BetaSolver:
    """Lazy forward solution of the beta system for one direct (n, m)."""

    def __init__(self, n: int, m: int, table: InversionTable):
        self.n = n
        self.m = m
        self.table = table
        cp = max_inversions(n - 1)
        self.r = min(n - 1, m + 1)
        self.gamma = Fraction(table.count(n, m), table.count(n, m + 1))
        # column blocks y_n = k-1 with k < k0 are empty; the row block
        # x_n = k0-2 (if any) holds a maximal prefix and must move up
        self.k0 = max(1, m + 2 - cp)
        self.vals: list[Fraction] = [Fraction(1)] * (self.k0 - 1)

    def get(self, i: int) -> Fraction:
        """beta_i, extending the forward recursion as needed."""
        if i > self.r:
            return Fraction(0)
        while len(self.vals) < i:
            k = len(self.vals) + 1
            prev = self.vals[-1] if self.vals else Fraction(0)
            gk = Fraction(
                self.table.count(self.n - 1, self.m - k + 1),
                self.table.count(self.n - 1, self.m - k + 2),
            )
            beta = 1 + (prev - self.gamma) / gk
            if not 0 <= beta <= 1:
                raise BetaSolveError(
                    f"beta_{k}({self.n},{self.m}) = {beta} outside [0,1]"
                )
            self.vals.append(beta)
        return self.vals[i - 1]

    def full(self) -> tuple[Fraction, ...]:
        """All beta_1..beta_r plus the surplus-equation verification."""
        vals = tuple(self.get(i) for i in range(1, self.r + 1))
        if self.m >= self.n - 1:
            g_last = Fraction(
                self.table.count(self.n - 1, self.m - self.n + 1),
                self.table.count(self.n - 1, self.m - self.n + 2),
            )
            if vals[-1] + g_last != self.gamma:
                raise BetaSolveError(
                    f"surplus equation fails at ({self.n},{self.m})"
                )
        elif vals[self.m] != self.gamma:
            raise BetaSolveError(
                f"beta_{self.m + 1}({self.n},{self.m}) != gamma"
            )
        return vals


class BetaTable:
    """Memoized beta systems over a shared count table.

    Append-only: safe for concurrent readers with per-thread instances.
    """

    def __init__(self, table: InversionTable):
        self.table = table
        self._solvers: dict[tuple[int, int], _BetaSolver] = {}

    def _solver(self, n: int, m: int) -> _BetaSolver:
        key = (n, m)
        solver = self._solvers.get(key)
        if solver is None:
            if 2 * m >= max_inversions(n):
                raise ValueError(f"budget {m} of level {n} must be reflected")
            solver = _BetaSolver(n, m, self.table)
            self._solvers[key] = solver
        return solver

    def entry(self, n: int, m: int) -> BetaEntry:
        if n < 2 or not 0 <= m <= max_inversions(n) - 1:
            raise ValueError(f"no transition matrix for (n={n}, m={m})")
        if 2 * m >= max_inversions(n):
            return BetaEntry(n, m, True, max_inversions(n) - 1 - m, None)
        return BetaEntry(n, m, False, None, self._solver(n, m).full())

    def beta(self, n: int, m: int, i: int) -> Fraction:
        """beta_i(n, m) for a direct budget, with beta_n = 0."""
        if i >= n:
            return Fraction(0)
        return self._solver(n, m).get(i)


def solve_betas(n: int, m: int, table: InversionTable) -> BetaEntry:
    """Solve the beta system for (n, m), or mark the budget as reflected."""
    return BetaTable(table).entry(n, m)


def rho_entry(
    n: int,
    m: int,
    x: Sequence[int],
    y: Sequence[int],
    betas: BetaTable,
) -> Fraction:
    """Exact transition probability rho_{n,m}(x, y).

    Zero unless y covers x (equal except one coordinate larger by 1).
    """
    total = max_inversions(n)
    if 2 * m >= total:
        mt = total - 1 - m
        scale = Fraction(betas.table.count(n, mt + 1), betas.table.count(n, mt))
        return rho_entry(n, mt, reflect_sequence(y), reflect_sequence(x), betas) * scale
    j, i = x[n - 1], y[n - 1]
    if i == j + 1 and tuple(x[: n - 1]) == tuple(y[: n - 1]):
        return betas.beta(n, m, i)
    if i == j:
        # a maximal prefix has no outgoing sub-transitions
        if n - 1 < 2 or m - j >= max_inversions(n - 1):
            return Fraction(0)
        sub = rho_entry(n - 1, m - j, x[: n - 1], y[: n - 1], betas)
        if sub:
            return (1 - betas.beta(n, m, j + 1)) * sub
        return Fraction(0)
    return Fraction(0)


def enumerate_inversion_sequences(n: int, m: int) -> list[tuple[int, ...]]:
    """All length-n inversion sequences with sum m, in reverse-lex order.

    Reverse-lex: x before y iff x_i < y_i at the last differing index.
    """
    out: list[tuple[int, ...]] = []

    def rec(level: int, budget: int, suffix: tuple[int, ...]) -> None:
        if level == 0:
            if budget == 0:
                out.append(suffix)
            return
        if budget > max_inversions(level) or budget < 0:
            return
        for v in range(min(level - 1, budget) + 1):
            rec(level - 1, budget - v, (v,) + suffix)

    rec(n, m, ())
    out.sort(key=lambda t: t[::-1])
    return out


@dataclass(frozen=True)
class RhoMatrix:
    """Materialized sparse transition matrix for small-n validation."""

    n: int
    m: int
    rows: tuple[tuple[int, ...], ...]
    cols: tuple[tuple[int, ...], ...]
    entries: dict[tuple[tuple[int, ...], tuple[int, ...]], Fraction]

    def entry(self, x: tuple[int, ...], y: tuple[int, ...]) -> Fraction:
        return self.entries.get((x, y), Fraction(0))

    def row_sum(self, x: tuple[int, ...]) -> Fraction:
        return sum((v for (a, _), v in self.entries.items() if a == x), Fraction(0))

    def col_sum(self, y: tuple[int, ...]) -> Fraction:
        return sum((v for (_, b), v in self.entries.items() if b == y), Fraction(0))

    def dense(self) -> list[list[Fraction]]:
        return [[self.entry(x, y) for y in self.cols] for x in self.rows]


def materialize_rho(n: int, m: int, betas: BetaTable) -> RhoMatrix:
    """Explicit rho_{n,m} over the covering pairs; guarded to small n."""
    if n > _MATERIALIZE_LIMIT:
        raise ValueError(f"materialize_rho limited to n <= {_MATERIALIZE_LIMIT}")
    if not 0 <= m < max_inversions(n):
        raise ValueError(f"no transition matrix for (n={n}, m={m})")
    rows = tuple(enumerate_inversion_sequences(n, m))
    cols = tuple(enumerate_inversion_sequences(n, m + 1))
    entries = {}
    for x in rows:
        for k in range(n):
            if x[k] < k:  # room to add a ball in box k+1
                y = x[:k] + (x[k] + 1,) + x[k + 1 :]
                value = rho_entry(n, m, x, y, betas)
                if value:
                    entries[(x, y)] = value
    return RhoMatrix(n, m, rows, cols, entries)


@dataclass(frozen=True)
class ChainState:
    """Occupancy numbers after t balls: an inversion sequence with sum t."""

    x: tuple[int, ...]
    t: int

    @property
    def n(self) -> int:
        return len(self.x)


def initial_state(n: int) -> ChainState:
    return ChainState((0,) * n, 0)


def chain_step(
    state: ChainState, betas: BetaTable, ctx: SamplerContext
) -> tuple[ChainState, int]:
    """One ball throw; returns the new state and the box index (1-based)."""
    n = state.n
    if state.t >= max_inversions(n):
        raise ValueError("chain is already at the maximal state")
    x = list(state.x)
    k = _advance(x, n, state.t, betas, ctx)
    return ChainState(tuple(x), state.t + 1), k + 1


def _advance(
    x: list[int], level: int, budget: int, betas: BetaTable, ctx: SamplerContext
) -> int:
    """Increment one coordinate of x[:level] per rho(level, budget)."""
    while True:
        total = max_inversions(level)
        if 2 * budget >= total:
            return _advance_reflected(x, level, budget, betas, ctx)
        j = x[level - 1]
        if ctx.bernoulli_fraction(betas.beta(level, budget, j + 1)):
            x[level - 1] += 1
            return level - 1
        budget -= j
        level -= 1


def _advance_reflected(
    x: list[int], level: int, budget: int, betas: BetaTable, ctx: SamplerContext
) -> int:
    """Transition via the transpose of the mirrored matrix.

    Mirroring the current prefix gives a sum of mt+1; its predecessors
    under rho(level, mt), weighted by the matrix column, give exactly the
    transpose transition, and un-mirroring turns the removed ball back
    into an added one.
    """
    mt = max_inversions(level) - 1 - budget
    mirrored = reflect_sequence(x[:level])
    candidates = [k for k in range(level) if mirrored[k] >= 1]
    weights = []
    for k in candidates:
        pred = mirrored[:k] + [mirrored[k] - 1] + mirrored[k + 1 :]
        weights.append(rho_entry(level, mt, pred, mirrored, betas))
    pick = candidates[ctx.categorical_fractions(weights)]
    x[pick] += 1
    return pick


def run_chain(
    n: int,
    m_target: int,
    ctx: SamplerContext,
    betas: BetaTable | None = None,
    trace: list[int] | None = None,
) -> ChainState:
    """Throw m_target balls starting from the empty state.

    The resulting state is uniform on the inversion sequences of sum
    m_target; successive states couple all budgets along one trajectory.
    """
    if not 0 <= m_target <= max_inversions(n):
        raise ValueError(f"m_target outside 0..{max_inversions(n)}")
    if betas is None:
        if ctx.table is None:
            raise ValueError("run_chain needs a count table")
        betas = BetaTable(ctx.table)
    state = initial_state(n)
    for _ in range(m_target):
        state, box = chain_step(state, betas, ctx)
        if trace is not None:
            trace.append(box)
    return state


def symbolic_chain_distributions(
    n: int, betas: BetaTable
) -> list[dict[tuple[int, ...], Fraction]]:
    """Exact forward propagation of the point mass at zero through every
    materialized matrix; element m of the result is the distribution on
    sum-m sequences."""
    dist: dict[tuple[int, ...], Fraction] = {(0,) * n: Fraction(1)}
    history = [dist]
    for m in range(max_inversions(n)):
        rho = materialize_rho(n, m, betas)
        nxt: dict[tuple[int, ...], Fraction] = {}
        for (x, y), p in rho.entries.items():
            mass = dist.get(x)
            if mass:
                nxt[y] = nxt.get(y, Fraction(0)) + mass * p
        history.append(nxt)
        dist = nxt
    return history
