"""Exact uniform sampling of inversion sequences with a fixed sum.

Two engines, both exactly uniform on the target set:

* ``sample_inversion_sequence`` walks the count table: the last
  coordinate is j with probability s(n-1, m-j)/s(n, m), then recurse.
  Categorical draws use a uniform big integer below s(n, m), so there is
  no rounding bias.  Budgets above half the maximum are reflected through
  x_i -> (i-1) - x_i first, halving the table columns needed.

* ``SplitSampler`` handles sizes where the table is out of reach.  It
  splits the sequence into a short truncated head (where the bounds
  x_i <= i-1 actually bite) and a long tail, proposes the head sum from
  its exact marginal, the head from the table, and the tail as a uniform
  composition (stars and bars), then rejects the rare tail that violates
  a bound.  Every (head, composition) pair is proposed with the same
  probability, so conditioned on validity the output is exactly uniform.
"""

from __future__ import annotations

import bisect
from typing import Sequence

import numpy as np

from .counting import InversionTable, build_table, max_inversions
from .rng import SamplerContext


def _draw_last_coordinate(table: InversionTable, level: int, budget: int, u: int) -> int:
    """Map a uniform draw u in [0, s(level, budget)) to the last coordinate.

    Outcome j absorbs exactly s(level-1, budget-j) values of u, walking
    cumulative sums from j = 0.
    """
    for j in range(min(level - 1, budget) + 1):
        w = table.count(level - 1, budget - j)
        if u < w:
            return j
        u -= w
    raise AssertionError("draw exceeded row total")  # pragma: no cover


def _sample_direct(n: int, m: int, ctx: SamplerContext) -> list[int]:
    table = ctx.table
    x = [0] * n
    budget = m
    for level in range(n, 0, -1):
        if budget == 0:
            break
        u = ctx.uniform_below(table.count(level, budget))
        j = _draw_last_coordinate(table, level, budget, u)
        x[level - 1] = j
        budget -= j
    return x


def reflect_sequence(x: Sequence[int]) -> list[int]:
    """The involution x_i -> (i-1) - x_i; maps sum m to C(n,2) - m."""
    return [i - v for i, v in enumerate(x)]


def sample_inversion_sequence(n: int, m: int, ctx: SamplerContext) -> list[int]:
    """Uniform inversion sequence of length n with sum exactly m."""
    if n < 1:
        raise ValueError("n must be >= 1")
    total = max_inversions(n)
    if not 0 <= m <= total:
        raise ValueError(f"m={m} outside 0..{total}")
    if ctx.table is None or not ctx.table.covers(n, min(m, total - m)):
        raise ValueError("context table does not cover the requested size")
    if 2 * m > total:
        return reflect_sequence(_sample_direct(n, total - m, ctx))
    return _sample_direct(n, m, ctx)


def sample_composition(parts: int, total: int, ctx: SamplerContext) -> np.ndarray:
    """Uniform composition of ``total`` into ``parts`` nonnegative parts.

    Stars and bars: a uniform (parts-1)-subset of positions in a
    (total+parts-1)-row marks the bars; gap lengths are the parts.
    """
    if parts < 1:
        raise ValueError("parts must be >= 1")
    if total < 0:
        raise ValueError("total must be >= 0")
    if parts == 1:
        return np.array([total], dtype=np.int64)
    gen = ctx.generator
    bars = gen.choice(total + parts - 1, size=parts - 1, replace=False)
    bars.sort()
    out = np.empty(parts, dtype=np.int64)
    out[0] = bars[0]
    out[1:-1] = np.diff(bars) - 1
    out[-1] = (total + parts - 2) - bars[-1]
    return out


def default_head_size(n: int, m: int) -> int:
    """Head length for the split sampler.

    Chosen so a tail coordinate exceeds its bound with probability about
    1e-2 per draw or less: coordinates look geometric with ratio
    q = alpha/(alpha+1), so q^c/(1-q) <= 1e-2 needs
    c >= (alpha+1) * (log(alpha+1) + log 100), padded a little.
    """
    alpha = m / n
    c = int((alpha + 1.0) * (np.log(alpha + 1.0) + np.log(100.0))) + 8
    return min(max(16, c), n - 1)


class SplitSampler:
    """Exact uniform sampler for one fixed (n, m), built once, drawn many.

    For budgets above half the maximum the whole problem is reflected.
    The head-sum marginal is proportional to

        w(a) = s(c, a) * C(m - a + K - 1, K - 1),   K = n - c,

    i.e. (#heads with sum a) * (#tail compositions of the remainder).
    The binomials are carried as a common-factor-scaled integer chain so
    no giant factorials are ever formed.
    """

    def __init__(self, n: int, m: int, head_size: int | None = None):
        if n < 1:
            raise ValueError("n must be >= 1")
        total = max_inversions(n)
        if not 0 <= m <= total:
            raise ValueError(f"m={m} outside 0..{total}")
        self.n = n
        self.m = m
        self.reflected = 2 * m > total
        self._m_work = total - m if self.reflected else m
        mw = self._m_work
        c = default_head_size(n, mw) if head_size is None else head_size
        if c >= n:
            c = n - 1
        self.head_size = c
        if not 1 <= c < n:
            raise ValueError("split sampler needs 1 <= head_size < n")
        self.table = build_table(c, m_cap=min(mw, max_inversions(c)))
        self._tail_parts = n - c
        a_max = min(max_inversions(c), mw)
        self._a_max = a_max
        self._cum_weights = self._weight_cumsums(a_max, mw, self._tail_parts)
        # tail bound check: tail coordinate i (1-based) is x_{c+i} <= c+i-1
        self._tail_bounds = np.arange(c, n, dtype=np.int64)
        self.restarts = 0

    def _weight_cumsums(self, a_max: int, m: int, parts: int) -> list[int]:
        # scaled weights W(a) = s(c,a) * prod_{j=a}^{a_max-1}(m-j+parts-1)
        #                              * prod_{j=0}^{a-1}(m-j)
        # so W(a+1)/W(a) = [s-ratio] * (m-a)/(m-a+parts-1), matching the
        # ratio of tail-composition counts.
        suffix = [1] * (a_max + 1)
        for a in range(a_max - 1, -1, -1):
            suffix[a] = suffix[a + 1] * (m - a + parts - 1)
        cums = []
        acc = 0
        prefix = 1
        for a in range(a_max + 1):
            acc += self.table.count(self.head_size, a) * suffix[a] * prefix
            cums.append(acc)
            prefix *= m - a
        return cums

    def sample(self, ctx: SamplerContext) -> np.ndarray:
        """One exactly uniform inversion sequence, as an int64 array."""
        c = self.head_size
        mw = self._m_work
        head_ctx = SamplerContext(self.table, ctx.seed, ctx.stream)
        head_ctx._gen = ctx.generator  # share the stream
        while True:
            u = ctx.uniform_below(self._cum_weights[-1])
            a = bisect.bisect_right(self._cum_weights, u)
            head = sample_inversion_sequence(c, a, head_ctx)
            tail = sample_composition(self._tail_parts, mw - a, ctx)
            if np.all(tail <= self._tail_bounds):
                x = np.concatenate([np.asarray(head, dtype=np.int64), tail])
                if self.reflected:
                    x = np.arange(self.n, dtype=np.int64) - x
                return x
            self.restarts += 1
