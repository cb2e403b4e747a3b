"""Exact evaluation of gap-constrained multiple sums and their limit predictors.

The central object is the m-fold sum over increasing index tuples

    Phi(n, m) = sum_{1 <= j_1 < ... < j_m <= n, j_i - j_{i-1} >= n0}
                prod_i 1 / D(j_i - j_{i-1}),          j_0 = 0,

evaluated exactly by the level-by-level convolution recursion

    Phi(n, k) = sum_{j = n0}^{n - (k-1) n0} (1/D(j)) * Phi(n - j, k - 1).

A direct O(n^2)-per-fold convolution is the reference path; an FFT path
(O(n log n) per fold) is used for large horizons.  ``psi_general`` computes
the analogous sum for pairwise kernels r(i, j) that are not functions of
the index difference.  ``predict`` returns the limiting scaling and
coefficient for each supported regime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.signal import fftconvolve

from .special import gamma_fn, lambda_sigma, lambda_weight_array, script_O, zeta_tail

__all__ = [
    "AsymptoticPrediction",
    "MultiSumResult",
    "WeightSequence",
    "phi",
    "phi_curve",
    "phi_fold_curves",
    "predict",
    "psi_curve",
    "psi_general",
    "u_sum",
    "u_sum_curve",
]

# direct convolution below this horizon, FFT above
_FFT_THRESHOLD = 2048


@dataclass(frozen=True)
class WeightSequence:
    """A positive distance weight D(n) with the metadata the predictors need.

    ``weight`` must accept numpy integer arrays (all the built-in families
    do).  ``summable`` declares sum 1/D(n) < infinity; ``rv_index`` is the
    user-declared regular-variation index of the partial sums S(n) (it is
    modeling metadata, never inferred from finite data); ``gap`` is the
    minimal allowed spacing n0 between consecutive indices.
    """

    weight: Callable[[np.ndarray], np.ndarray]
    summable: bool = False
    rv_index: float | None = None
    gap: int = 1
    label: str = ""

    def __post_init__(self):
        if self.gap < 1:
            raise ValueError("gap must be a positive integer")

    def reciprocals(self, n: int) -> np.ndarray:
        """Array r with r[j] = 1/D(j) for gap <= j <= n, zero below the gap."""
        r = np.zeros(n + 1)
        if n >= self.gap:
            idx = np.arange(self.gap, n + 1)
            d = np.asarray(self.weight(idx), dtype=float)
            if np.any(d <= 0):
                raise ValueError(f"weights must be positive ({self.label or 'weight'})")
            r[self.gap:] = 1.0 / d
        return r

    def partial_sums(self, n: int) -> np.ndarray:
        """S with S[n'] = sum_{i=1}^{n'} 1/D(i); requires D defined from 1."""
        idx = np.arange(1, n + 1)
        d = np.asarray(self.weight(idx), dtype=float)
        s = np.zeros(n + 1)
        np.cumsum(1.0 / d, out=s[1:])
        return s


@dataclass(frozen=True)
class MultiSumResult:
    n: int
    m: int
    value: float
    constrained: bool


def _fold_tables(weights: WeightSequence, n: int, m: int, method: str) -> list[np.ndarray]:
    """Tables T[q][x] = Phi(x, q) for 0 <= x <= n, 0 <= q <= m (T[0] == 1)."""
    if method not in ("auto", "direct", "fft"):
        raise ValueError(f"unknown method {method!r}")
    use_fft = method == "fft" or (method == "auto" and n > _FFT_THRESHOLD)
    r = weights.reciprocals(n)
    tables = [np.ones(n + 1)]
    for _ in range(m):
        if use_fft:
            t = fftconvolve(r, tables[-1])[: n + 1]
            np.maximum(t, 0.0, out=t)  # FFT round-off may graze below zero
        else:
            t = np.convolve(r, tables[-1])[: n + 1]
        tables.append(t)
    return tables


def phi(weights: WeightSequence, n: int, m: int, method: str = "auto") -> MultiSumResult:
    """Exact gap-constrained m-fold sum of products of reciprocal weights."""
    if n < 1 or m < 1:
        raise ValueError("phi requires n >= 1 and m >= 1")
    tables = _fold_tables(weights, n, m, method)
    return MultiSumResult(n=n, m=m, value=float(tables[m][n]), constrained=weights.gap > 1)


def phi_curve(weights: WeightSequence, horizons, m: int, method: str = "auto") -> np.ndarray:
    """Phi(h, m) for every horizon h, sharing one prefix table."""
    hs = np.asarray(horizons, dtype=int)
    tables = _fold_tables(weights, int(hs.max()), m, method)
    return tables[m][hs].astype(float)


def phi_fold_curves(weights: WeightSequence, horizons, m: int, method: str = "auto") -> np.ndarray:
    """Matrix F[q-1, h] = Phi(h, q) for all fold counts q = 1..m at once."""
    hs = np.asarray(horizons, dtype=int)
    tables = _fold_tables(weights, int(hs.max()), m, method)
    return np.stack([tables[q][hs] for q in range(1, m + 1)])


def u_sum(k: int, m: int, n0: int, s: float, n: int, method: str = "auto") -> MultiSumResult:
    """k-fold gap-n0 sum with iterated-log weights of depth m and exponent s."""
    w = _u_weights(m, n0, s)
    res = phi(w, n, k, method)
    return MultiSumResult(n=n, m=k, value=res.value, constrained=n0 > 1)


def u_sum_curve(k: int, m: int, n0: int, s: float, horizons, method: str = "auto") -> np.ndarray:
    return phi_curve(_u_weights(m, n0, s), horizons, k, method)


def _u_weights(m: int, n0: int, s: float) -> WeightSequence:
    threshold = script_O(m)
    if n0 < threshold:
        raise ValueError(f"gap n0 must be >= script_O({m}) = {threshold}, got {n0}")
    return WeightSequence(
        weight=lambda i: lambda_weight_array(m, s, i),
        summable=s > 1,
        gap=n0,
        label=f"lambda(m={m}, s={s})",
    )


def psi_general(kernel, n: int, m: int) -> float:
    """m-fold sum over increasing tuples of kernel success-probability products.

    Uses the table T(j, 1) = r(0, j), T(j, q) = sum_{i<j} T(i, q-1) r(i, j)
    and returns sum_j T(j, m); cost O(n^2 m) for a generic pairwise kernel.
    """
    return float(psi_curve(kernel, [n], m)[m - 1, 0])


def psi_curve(kernel, horizons, m: int) -> np.ndarray:
    """Matrix P[q-1, h] = Psi_h(q) for q = 1..m over the given horizons."""
    hs = np.asarray(horizons, dtype=int)
    n = int(hs.max())
    if m < 1:
        raise ValueError("fold count m must be >= 1")
    tables = np.zeros((m + 1, n + 1))
    tables[1] = kernel.marginal_probs(n)
    for q in range(2, m + 1):
        prev = tables[q - 1]
        cur = tables[q]
        for j in range(q, n + 1):
            col = kernel.cond_column(j)
            cur[j] = float(np.dot(prev[1:j], col))
    prefix = np.cumsum(tables[1:], axis=1)
    return prefix[:, hs]


@dataclass(frozen=True)
class AsymptoticPrediction:
    """Limiting scaling (symbolic descriptor) and coefficient for a regime."""

    scaling: str
    coefficient: float


def predict(regime: str, order: int, **params) -> AsymptoticPrediction:
    """Scaling and coefficient of the limit for a multiple sum or moment.

    Regimes (``order`` is the fold/moment count m or k):

    - ``summable``: needs ``zeta_value`` = sum of reciprocal weights over
      the gap tail; the sum converges to a constant, zeta_value**m.
    - ``regularly_varying``: needs ``tau`` in [0, 1]; Phi(n, m) / S(n)^m
      tends to lambda_sigma(tau)**-(m-1).
    - ``power``: needs ``alpha`` (> 0) and optional ``beta`` (default 1);
      the k-fold pairwise power sum over (log n)^k tends to
      prod_{j<k}(j+alpha) / (k! alpha^k beta^k).  With ``moment=True``
      the coefficient is for the k-th count moment instead:
      prod_{j<k}(j+alpha) / (alpha beta)^k.
    - ``rzr``: needs ``m`` (log-iteration depth) and ``sigma``; dispatches
      on (sigma, m) to the four limit cases of the iterated-log sums
      (constant / iterated-log power / power-of-n scalings).
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    if regime == "summable":
        zeta_value = params["zeta_value"]
        return AsymptoticPrediction("constant", float(zeta_value) ** order)
    if regime == "regularly_varying":
        tau = params["tau"]
        return AsymptoticPrediction("S(n)^m", lambda_sigma(tau) ** (-(order - 1)))
    if regime == "power":
        alpha = params["alpha"]
        beta = params.get("beta", 1.0)
        if alpha <= 0 or beta <= 0:
            raise ValueError("power regime requires alpha > 0 and beta > 0")
        num = math.prod(j + alpha for j in range(order))
        if params.get("moment", False):
            return AsymptoticPrediction("(log n)^k", num / (alpha * beta) ** order)
        return AsymptoticPrediction(
            "(log n)^k", num / (math.factorial(order) * alpha**order * beta**order)
        )
    if regime == "rzr":
        m = params["m"]
        sigma = params["sigma"]
        if sigma > 1.0:
            n0 = params.get("n0") or script_O(m)
            z = zeta_tail(m, sigma, n0, tol=params.get("tol", 1e-10)).value
            return AsymptoticPrediction("constant", z**order)
        if sigma == 1.0:
            return AsymptoticPrediction("(log_{m+1} n)^k", 1.0)
        if 0.0 <= sigma < 1.0 and m >= 1:
            # Partial sums grow like (log_m n)^(1-sigma)/(1-sigma), so the
            # correct scale carries the 1-sigma exponent (it reduces to
            # (log_m n)^k only at sigma = 0).
            scaling = "(log_m n)^k" if sigma == 0.0 else "(log_m n)^{k(1-sigma)}"
            return AsymptoticPrediction(scaling, (1.0 - sigma) ** (-order))
        if 0.0 <= sigma < 1.0 and m == 0:
            c = gamma_fn(2.0 - sigma) * gamma_fn(1.0 - sigma) / gamma_fn(3.0 - 2.0 * sigma)
            return AsymptoticPrediction(
                "n^{k(1-sigma)}", c ** (order - 1) / (1.0 - sigma)
            )
        raise ValueError(f"no supported limit for sigma={sigma}, m={m}")
    raise ValueError(f"unsupported regime {regime!r}")
