"""Exact moments of the success count and limit-law moment targets.

The k-th moment of the count expands over sorted support tuples as

    E(count_n)^k = sum_{m=1}^{k} c(k, m) * Psi_n(m),

where Psi_n(m) is the m-fold sum of joint success probabilities and
c(k, m) = sum over compositions of k into m positive parts of
k!/(l_1! ... l_m!), i.e. the number of surjections from a k-set onto an
m-set.  The coefficients are computed from the surjection recurrence
rather than by composition enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .kernels import DistanceKernel, RhoKernel
from .multisum import phi_fold_curves, psi_curve

__all__ = [
    "MomentTable",
    "composition_coefficient",
    "count_moment",
    "count_moment_curve",
    "geo_limit_moments",
    "scaled_moment_curve",
]

# beyond this order the coefficients exceed 2^53; opt in explicitly
_SAFE_ORDER = 20


@lru_cache(maxsize=None)
def composition_coefficient(k: int, m: int) -> int:
    """Number of surjections from a k-set onto an m-set (exact integer).

    Recurrence: S(k, m) = m * (S(k-1, m) + S(k-1, m-1)), S(0, 0) = 1.
    """
    if k < 0 or m < 0:
        raise ValueError("orders must be nonnegative")
    if k == 0 and m == 0:
        return 1
    if k == 0 or m == 0 or m > k:
        return 0
    return m * (composition_coefficient(k - 1, m) + composition_coefficient(k - 1, m - 1))


def _psi_matrix(kernel: RhoKernel, horizons, m_max: int) -> np.ndarray:
    """Psi_h(q) for q = 1..m_max; distance kernels ride the convolution path."""
    if isinstance(kernel, DistanceKernel):
        return phi_fold_curves(kernel.weights, horizons, m_max)
    return psi_curve(kernel, horizons, m_max)


def count_moment(kernel: RhoKernel, n: int, k: int, allow_large_k: bool = False) -> float:
    """Exact k-th moment of the success count over indices 1..n."""
    return float(count_moment_curve(kernel, k, [n], allow_large_k)[0])


def count_moment_curve(kernel: RhoKernel, k: int, horizons,
                       allow_large_k: bool = False) -> np.ndarray:
    """Exact k-th moments at several horizons, sharing one Psi table."""
    if k < 1:
        raise ValueError("moment order k must be >= 1")
    if k > _SAFE_ORDER and not allow_large_k:
        raise OverflowError(
            f"order k={k} exceeds the safe coefficient range (k <= {_SAFE_ORDER}); "
            "pass allow_large_k=True to accept reduced float accuracy"
        )
    psi = _psi_matrix(kernel, horizons, k)
    out = np.zeros(psi.shape[1])
    for m in range(1, k + 1):
        out += float(composition_coefficient(k, m)) * psi[m - 1]
    return out


def geo_limit_moments(zeta: float, K: int) -> list[float]:
    """Moments k = 1..K of the geometric law on {0, 1, ...} with mean zeta.

    Uses the self-consistency recursion E(X^k) = E(X) * (E((X+1)^k) - E(X^k)),
    solved by binomially expanding E((X+1)^k) over lower moments:
    m_k = zeta * sum_{j=0}^{k-1} C(k, j) m_j with m_0 = 1.
    """
    if zeta <= 0:
        raise ValueError(f"mean zeta must be positive, got {zeta}")
    from math import comb

    m = [1.0]
    for k in range(1, K + 1):
        m.append(zeta * sum(comb(k, j) * m[j] for j in range(k)))
    return m[1:]


def scaled_moment_curve(kernel: RhoKernel, k: int, horizons,
                        scaler: Callable[[int], float]) -> list[tuple[int, float]]:
    """(n, E(count_n)^k / scaler(n)^k) along increasing horizons."""
    hs = list(horizons)
    if any(b <= a for a, b in zip(hs, hs[1:])):
        raise ValueError("horizons must be strictly increasing")
    vals = count_moment_curve(kernel, k, hs)
    return [(n, float(v) / scaler(n) ** k) for n, v in zip(hs, vals)]


@dataclass(frozen=True)
class MomentTable:
    """Exact count moments on a (horizon, order) grid; values[i][j] = E(count_{n_j})^{k_i}."""

    horizons: tuple[int, ...]
    orders: tuple[int, ...]
    values: np.ndarray

    @classmethod
    def build(cls, kernel: RhoKernel, horizons: Sequence[int], k_max: int) -> "MomentTable":
        hs = tuple(int(h) for h in horizons)
        if any(b <= a for a, b in zip(hs, hs[1:])):
            raise ValueError("horizons must be strictly increasing")
        psi = _psi_matrix(kernel, hs, k_max)
        rows = []
        for k in range(1, k_max + 1):
            row = np.zeros(len(hs))
            for m in range(1, k + 1):
                row += float(composition_coefficient(k, m)) * psi[m - 1]
            rows.append(row)
        return cls(horizons=hs, orders=tuple(range(1, k_max + 1)), values=np.array(rows))
