"""Special functions and named constants with certified-accuracy tail sums.

Everything here is elementary but load-bearing: the Gamma-ratio constant
``lambda_sigma``, iterated logarithms with their admissibility threshold,
the weight ``(log_m i)^s * prod_{j<m} log_j i`` built from them, and
truncated series of reciprocal weights carrying a certified bound on the
omitted tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "IteratedLogSpec",
    "TailSum",
    "gamma_fn",
    "gamma_moment",
    "iterated_log",
    "iterated_log_array",
    "lambda_sigma",
    "lambda_weight",
    "lambda_weight_array",
    "script_O",
    "zeta_tail",
]


def gamma_fn(x: float) -> float:
    """Gamma function on the positive half line.

    Backed by the C library implementation, which is accurate to double
    precision (well beyond the 12 significant digits needed here).
    """
    if x <= 0:
        raise ValueError(f"gamma_fn requires x > 0, got {x}")
    return math.gamma(x)


def lambda_sigma(sigma: float) -> float:
    """The rate constant Gamma(1+2s) / (s * Gamma(s) * Gamma(1+s)) on [0, 1].

    The value at 0 is 1 by convention (the formula has a removable
    singularity there: the ratio tends to 1 as s -> 0+).
    """
    if not 0.0 <= sigma <= 1.0:
        raise ValueError(f"lambda_sigma requires sigma in [0, 1], got {sigma}")
    if sigma == 0.0:
        return 1.0
    return gamma_fn(1.0 + 2.0 * sigma) / (sigma * gamma_fn(sigma) * gamma_fn(1.0 + sigma))


def iterated_log(m: int, x: float) -> float:
    """log applied m times; ``iterated_log(0, x) == x``.

    Requires every intermediate value to stay positive, i.e. x >= the
    admissibility threshold ``script_O(m)`` for integer arguments.
    """
    if m < 0:
        raise ValueError("iteration depth must be nonnegative")
    v = float(x)
    for _ in range(m):
        if v <= 0.0:
            raise ValueError(f"iterated log undefined: reached {v} before depth {m} on input {x}")
        v = math.log(v)
    return v


def iterated_log_array(m: int, x: np.ndarray) -> np.ndarray:
    """Vectorized ``iterated_log``; caller guarantees admissibility."""
    v = np.asarray(x, dtype=float)
    for _ in range(m):
        v = np.log(v)
    return v


def script_O(m: int) -> int:
    """Smallest integer n with ``iterated_log(m, n) > 0``.

    Equals floor(e^^(m)) + 1 where e^^(m) is the m-fold iterated
    exponential of 0 (0, 1, e, e^e, ...).  Overflows float range for
    m >= 5; no experiment in this package needs depth beyond 2.
    """
    if m < 0:
        raise ValueError("iteration depth must be nonnegative")
    t = 0.0
    for _ in range(m):
        t = math.exp(t)  # OverflowError for m >= 6; explicit and loud
    return int(math.floor(t)) + 1


@dataclass(frozen=True)
class IteratedLogSpec:
    """An iteration depth m together with its admissibility threshold."""

    m: int
    threshold: int

    @classmethod
    def for_depth(cls, m: int) -> "IteratedLogSpec":
        return cls(m=m, threshold=script_O(m))


def lambda_weight(m: int, s: float, i: int) -> float:
    """The weight ``(log_m i)^s * prod_{j=0}^{m-1} log_j i`` (empty product = 1).

    Defined for i >= script_O(m) so that every factor is positive.
    """
    if i < script_O(m):
        raise ValueError(f"lambda_weight needs i >= {script_O(m)} at depth m={m}, got i={i}")
    prod = 1.0
    v = float(i)
    for _ in range(m):
        prod *= v
        v = math.log(v)
    return v**s * prod


def lambda_weight_array(m: int, s: float, i: np.ndarray) -> np.ndarray:
    """Vectorized ``lambda_weight``; all entries must be >= script_O(m)."""
    v = np.asarray(i, dtype=float)
    prod = np.ones_like(v)
    for _ in range(m):
        prod = prod * v
        v = np.log(v)
    return v**s * prod


@dataclass(frozen=True)
class TailSum:
    """A series value plus a certified bound on the truncation error.

    The reported ``value`` differs from the exact infinite sum by at most
    ``truncation_bound``.
    """

    value: float
    truncation_bound: float


def zeta_tail(m: int, s: float, n0: int | None = None, tol: float = 1e-10,
              max_terms: int = 50_000_000) -> TailSum:
    """Sum of ``1 / lambda_weight(m, s, i)`` over i >= n0, certified to ``tol``.

    Converges for s > 1.  Terms up to a cutoff N are accumulated exactly
    (``math.fsum``); the remaining tail is enclosed by the integral
    comparison

        I(N) <= sum_{i >= N} f(i) <= I(N) + f(N),

    valid because f is monotone decreasing, with the closed-form
    antiderivative I(N) = (log_m N)^(1-s) / (s-1).  The midpoint of the
    enclosure is added to the partial sum, so the certified error is
    f(N)/2; N is chosen as the first index where that is <= tol.
    """
    if s <= 1.0:
        raise ValueError(f"series of reciprocal weights diverges for s <= 1 (got s={s})")
    threshold = script_O(m)
    if n0 is None:
        n0 = threshold
    if n0 < threshold:
        raise ValueError(f"n0 must be >= script_O({m}) = {threshold}, got {n0}")

    blocks: list[np.ndarray] = []
    lo = n0
    block = 4096
    cutoff = None
    while cutoff is None:
        idx = np.arange(lo, lo + block)
        vals = 1.0 / lambda_weight_array(m, s, idx)
        hit = np.nonzero(vals <= 2.0 * tol)[0]
        if hit.size:
            cutoff = lo + int(hit[0])
            blocks.append(vals[: hit[0]])
        else:
            blocks.append(vals)
            lo += block
            block = min(2 * block, 1 << 22)
            if lo - n0 > max_terms:
                raise RuntimeError(
                    f"tolerance {tol} not reachable within {max_terms} terms (m={m}, s={s})"
                )
    partial = math.fsum(float(v) for b in blocks for v in b)
    f_cut = 1.0 / lambda_weight(m, s, cutoff)
    integral = iterated_log(m, cutoff) ** (1.0 - s) / (s - 1.0)
    return TailSum(value=partial + integral + 0.5 * f_cut, truncation_bound=0.5 * f_cut)


def gamma_moment(alpha, k: int):
    """k-th moment of a unit-rate Gamma(alpha) variable: prod_{j<k} (j + alpha).

    Works with any numeric type that supports ``+`` and ``*`` (floats,
    ``fractions.Fraction``), staying exact for exact inputs.  k = 0 gives 1.
    """
    if k < 0:
        raise ValueError("moment order must be nonnegative")
    if not (alpha > 0):
        raise ValueError(f"gamma_moment requires alpha > 0, got {alpha}")
    out = 1
    for j in range(k):
        out = out * (j + alpha)
    return out
