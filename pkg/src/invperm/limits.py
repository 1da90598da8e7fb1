"""Numeric ingredients of the connectivity-threshold limit laws.

With m inversions spread over n positions, alpha = m/n and
q = alpha/(alpha+1), the per-position chance that a fresh block starts
approaches the Euler product h(q) = prod_{j>=1} (1 - q^j); n*h(q) is the
Poisson mean governing the number of blocks minus one.  The window
length nu = ceil(2*(alpha+1)*log n) is what a cut must "see" for the
truncated product to have converged.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.ndimage import minimum_filter1d

from .counting import max_inversions

# below n-1 edges the permutation graph cannot be connected; above
# C(n-1,2) it cannot be disconnected
REGIME_THRESHOLD = "threshold"
REGIME_ALWAYS_DECOMPOSABLE = "always_decomposable"
REGIME_ALWAYS_INDECOMPOSABLE = "always_indecomposable"


def euler_h(q: float, tol: float = 1e-12) -> float:
    """Truncated Euler product prod_{j<=K} (1 - q^j) with relative error < tol.

    K is the smallest truncation whose tail satisfies
    q^(K+1) / ((1-q)(1-q^(K+1))) < tol.
    """
    if q == 0.0:
        return 1.0
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie in [0, 1)")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    # first K from logs, then nudge until the bound really holds
    k = max(1, int(math.log(tol * (1.0 - q)) / math.log(q)))
    while q ** (k + 1) / ((1.0 - q) * (1.0 - q ** (k + 1))) >= tol:
        k += 1
    prod = 1.0
    power = 1.0
    for _ in range(k):
        power *= q
        prod *= 1.0 - power
    return prod


def euler_h_highprec(q, dps: int = 50):
    """Euler product in arbitrary precision (mpmath), for regression anchors."""
    import mpmath

    with mpmath.workdps(dps):
        return mpmath.qp(mpmath.mpf(q))


@dataclass(frozen=True)
class ThresholdParams:
    """All scalar quantities attached to one (n, m) pair."""

    n: int
    m: int
    alpha: float
    q: float
    nu: int
    h: float
    lam: float
    regime: str

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "alpha": self.alpha,
            "q": self.q,
            "nu": self.nu,
            "h": self.h,
            "lambda": self.lam,
            "regime": self.regime,
        }


def classify_regime(n: int, m: int) -> str:
    """Trivial classification outside the nontrivial band of m."""
    if m < n - 1:
        return REGIME_ALWAYS_DECOMPOSABLE
    if m > max_inversions(n - 1):
        return REGIME_ALWAYS_INDECOMPOSABLE
    return REGIME_THRESHOLD


def threshold_params(n: int, m: int, tol: float = 1e-14) -> ThresholdParams:
    """alpha, q, nu, h, and the Poisson mean lambda = n*h for (n, m)."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if not 0 <= m <= max_inversions(n):
        raise ValueError(f"m={m} outside 0..{max_inversions(n)}")
    alpha = m / n
    q = alpha / (alpha + 1.0)
    nu = max(1, math.ceil(2.0 * (alpha + 1.0) * math.log(n)))
    h = euler_h(q, tol)
    return ThresholdParams(
        n=n,
        m=m,
        alpha=alpha,
        q=q,
        nu=nu,
        h=h,
        lam=n * h,
        regime=classify_regime(n, m),
    )


def alpha_for_mu(n: int, mu: float) -> tuple[float, int]:
    """Edge density alpha and edge count m hitting Poisson mean ~ e^-mu.

    alpha = (6/pi^2) (log n + (1/2) log log n + (1/2) log(12/pi)
            - pi^2/12 + mu); m = round(alpha*n) clamped to the band where
    the outcome is not forced.
    """
    if n < 3:
        raise ValueError("n must be >= 3")
    log_n = math.log(n)
    alpha = (6.0 / math.pi**2) * (
        log_n
        + 0.5 * math.log(log_n)
        + 0.5 * math.log(12.0 / math.pi)
        - math.pi**2 / 12.0
        + mu
    )
    m = round(alpha * n)
    m = max(n - 1, min(m, max_inversions(n - 1)))
    return alpha, m


def marked_points(y: Sequence[int], nu: int) -> list[int]:
    """Positions i in [len-2*nu] with y_{i+t} <= t-1 for all t in [nu].

    These are the cuts detectable from a length-nu window alone; every
    decomposition point at most len-2*nu is also marked.  Single pass via
    a sliding-window minimum of t - 1 - y_t.
    """
    length = len(y)
    if nu < 1:
        raise ValueError("nu must be >= 1")
    if nu > length:
        raise ValueError(f"nu={nu} exceeds sequence length {length}")
    limit = length - 2 * nu
    if limit < 1:
        return []
    # i is marked iff min over 0-based positions k in [i, i+nu-1] of
    # slack[k] = k - y[k] is at least i
    if isinstance(y, np.ndarray):
        slack = np.arange(length, dtype=np.int64) - np.asarray(y, dtype=np.int64)
        filt = minimum_filter1d(slack, size=nu, mode="nearest")
        # filt[j] = min(slack[j - nu//2 .. j - nu//2 + nu - 1])
        idx = np.arange(1, limit + 1)
        return idx[filt[idx + nu // 2] >= idx].tolist()
    slack = [k - y[k] for k in range(length)]
    out = []
    window: deque[int] = deque()  # indices with increasing slack
    for k in range(1, length):
        while window and slack[window[-1]] >= slack[k]:
            window.pop()
        window.append(k)
        i = k - nu + 1  # candidate cut whose window ends at k
        if i >= 1:
            while window[0] < i:
                window.popleft()
            if i <= limit and slack[window[0]] >= i:
                out.append(i)
    return out
