"""Pairwise success-probability kernels for dependent Bernoulli counting.

A kernel assigns to each index pair j > i >= 0 a value rho(i, j) >= 1 whose
reciprocal is the probability of a success at j given the most recent
success at i (i = 0 encodes the unconditional marginal).  Four concrete
families are provided:

- distance kernels        rho(i, j) = D(j - i)
- power kernels           rho(0, i) = beta*i,  rho(i, j) = beta*j^(1-alpha)*(j^alpha - i^alpha)
- branching kernels       rho(i, j) = 1 + sum_{t=i+1}^{j} m_t ... m_j,  m_t = (1-p_t)/p_t
- scale-function kernels  hitting-probability ratios of a transient level
  walk with w(x) = x^(-gamma)

Kernels are total over j > i >= 0: queries never range-check the resulting
probability, because the moment algebra is well defined for any positive
weights and some acceptance sweeps deliberately use boundary families
(e.g. D(n) = n, whose unit-gap value is exactly 1).  ``probability_range``
reports the observed range so tests can verify properness where it holds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .multisum import WeightSequence

__all__ = [
    "BranchingKernel",
    "DistanceKernel",
    "OffspringSchedule",
    "PowerKernel",
    "RhoKernel",
    "ScaleKernel",
    "ScaleSpec",
    "kernel_branching",
    "kernel_distance",
    "kernel_power",
    "kernel_scale",
    "probability_range",
]


class RhoKernel:
    """Base class; subclasses implement ``rho`` and the vectorized columns."""

    description = "generic"

    def rho(self, i: int, j: int) -> float:
        raise NotImplementedError

    def success_prob(self, i: int, j: int) -> float:
        """1 / rho(i, j) for j > i >= 0; equals 1 on the diagonal."""
        if j == i:
            return 1.0
        if j < i or i < 0:
            raise ValueError(f"success_prob needs j >= i >= 0, got ({i}, {j})")
        return 1.0 / self.rho(i, j)

    def marginal_probs(self, n: int) -> np.ndarray:
        """Array p with p[j] = success_prob(0, j) for 1 <= j <= n (p[0] = 0)."""
        p = np.zeros(n + 1)
        for j in range(1, n + 1):
            p[j] = 1.0 / self.rho(0, j)
        return p

    def cond_column(self, j: int) -> np.ndarray:
        """success_prob(i, j) for i = 1..j-1."""
        return np.array([1.0 / self.rho(i, j) for i in range(1, j)])

    def __repr__(self):
        return f"<{type(self).__name__} {self.description}>"


def probability_range(kernel: RhoKernel, n: int) -> tuple[float, float]:
    """(min, max) of success_prob over all pairs 0 <= i < j <= n."""
    lo, hi = np.inf, -np.inf
    marg = kernel.marginal_probs(n)[1:]
    lo, hi = min(lo, marg.min()), max(hi, marg.max())
    for j in range(2, n + 1):
        col = kernel.cond_column(j)
        lo, hi = min(lo, col.min()), max(hi, col.max())
    return float(lo), float(hi)


class DistanceKernel(RhoKernel):
    """rho(i, j) = D(j - i) for all j > i >= 0."""

    def __init__(self, weight: Callable[[np.ndarray], np.ndarray], label: str = ""):
        self._weight = weight
        self.description = label or "distance"
        self._recip = np.zeros(1)

    @property
    def weights(self) -> WeightSequence:
        """Unit-gap weight view, used by the fast convolution moment path."""
        return WeightSequence(weight=self._weight, gap=1, label=self.description)

    def _reciprocals(self, n: int) -> np.ndarray:
        if self._recip.size <= n:
            d = np.asarray(self._weight(np.arange(1, n + 1)), dtype=float)
            if np.any(d <= 0):
                raise ValueError(f"distance weight must be positive ({self.description})")
            r = np.zeros(n + 1)
            r[1:] = 1.0 / d
            self._recip = r
        return self._recip

    def rho(self, i: int, j: int) -> float:
        return 1.0 / self._reciprocals(j - i)[j - i]

    def marginal_probs(self, n: int) -> np.ndarray:
        return self._reciprocals(n)[: n + 1].copy()

    def cond_column(self, j: int) -> np.ndarray:
        r = self._reciprocals(j)
        return r[j - 1 : 0 : -1]  # gaps j-1, j-2, ..., 1 for i = 1..j-1


class PowerKernel(RhoKernel):
    """rho(0, i) = beta*i and rho(i, j) = beta * j^(1-alpha) * (j^alpha - i^alpha).

    With j_0 = 0 the marginal is the same formula evaluated at i = 0,
    since j^(1-alpha) * (j^alpha - 0) = j.
    """

    def __init__(self, alpha: float, beta: float):
        if alpha <= 0 or beta <= 0:
            raise ValueError("power kernel requires alpha > 0 and beta > 0")
        self.alpha = alpha
        self.beta = beta
        self.description = f"power(alpha={alpha}, beta={beta})"

    def rho(self, i: int, j: int) -> float:
        return self.beta * j ** (1.0 - self.alpha) * (j**self.alpha - i**self.alpha)

    def marginal_probs(self, n: int) -> np.ndarray:
        p = np.zeros(n + 1)
        p[1:] = 1.0 / (self.beta * np.arange(1, n + 1, dtype=float))
        return p

    def cond_column(self, j: int) -> np.ndarray:
        i = np.arange(1, j, dtype=float)
        return j ** (self.alpha - 1.0) / (self.beta * (float(j) ** self.alpha - i**self.alpha))


@dataclass(frozen=True)
class OffspringSchedule:
    """Per-generation geometric offspring parameter p_t, t = 1, 2, ...

    ``p`` maps integer arrays of generations to parameters in (0, 1); the
    per-individual offspring law is P(k) = p_t (1 - p_t)^k with mean
    m_t = (1 - p_t)/p_t.  Table-backed schedules carry their length in
    ``limit``.
    """

    p: Callable[[np.ndarray], np.ndarray]
    label: str
    limit: int | None = None

    def values(self, n: int) -> np.ndarray:
        if self.limit is not None and n > self.limit:
            raise ValueError(f"schedule {self.label} defined up to generation {self.limit}")
        t = np.arange(1, n + 1)
        p = np.asarray(self.p(t), dtype=float)
        if np.any((p <= 0.0) | (p >= 1.0)):
            raise ValueError(f"offspring parameters must lie in (0, 1) ({self.label})")
        return p

    @staticmethod
    def constant(p: float) -> "OffspringSchedule":
        return OffspringSchedule(p=lambda t: np.full(t.shape, float(p)), label=f"p={p}")

    @staticmethod
    def from_decay(r: Callable[[np.ndarray], np.ndarray], label: str = "") -> "OffspringSchedule":
        """p_t = 1/2 - r_t/4 for a given decay sequence r_t in [0, 1]."""

        def pfun(t):
            rt = np.asarray(r(t), dtype=float)
            if np.any((rt < 0.0) | (rt > 1.0)):
                raise ValueError("decay sequence must lie in [0, 1]")
            return 0.5 - rt / 4.0

        return OffspringSchedule(p=pfun, label=label or "p=1/2-r_t/4")

    @staticmethod
    def harmonic_drift(B: float) -> "OffspringSchedule":
        """p_t = 1/2 - B/(4t): offspring mean 1 + B/t + O(t^-2), B in [0, 1).

        This is the decay family with r_t = B/t; it produces the
        distance asymptotics rho(i, j) ~ j^B (j^(1-B) - i^(1-B)) / (1-B).
        """
        if not 0.0 <= B < 1.0:
            raise ValueError(f"drift strength B must lie in [0, 1), got {B}")
        return OffspringSchedule.from_decay(lambda t: B / t, label=f"p=1/2-{B}/(4t)")

    @staticmethod
    def from_table(p: Sequence[float]) -> "OffspringSchedule":
        arr = np.asarray(p, dtype=float)
        return OffspringSchedule(
            p=lambda t: arr[np.asarray(t) - 1], label=f"table[{arr.size}]", limit=arr.size
        )


class BranchingKernel(RhoKernel):
    """rho(i, j) = 1 + sum_{t=i+1}^{j} m_t m_{t+1} ... m_j with m_t = (1-p_t)/p_t.

    The partial products are formed in log space: with L_t = sum_{u<=t} log m_u
    and H_x = sum_{t'=0}^{x} exp(-L_{t'}),

        rho(i, j) = 1 + exp(L_j) * (H_{j-1} - H_{i-1}),    H_{-1} = 0,

    which makes every query O(1) after an O(n) prefix pass.
    """

    def __init__(self, schedule: OffspringSchedule):
        self.schedule = schedule
        self.description = f"branching({schedule.label})"
        self._L = np.zeros(1)
        self._H = np.ones(1)

    def _extend(self, n: int):
        if self._L.size <= n:
            size = max(2 * self._L.size, n + 1, 1024)
            if self.schedule.limit is not None:
                size = min(size, self.schedule.limit + 1)
            if size <= n:
                raise ValueError(
                    f"{self.description} defined up to generation {self.schedule.limit}, need {n}"
                )
            p = self.schedule.values(size - 1)
            logm = np.log1p(-p) - np.log(p)
            L = np.zeros(size)
            np.cumsum(logm, out=L[1:])
            self._L = L
            self._H = np.cumsum(np.exp(-L))

    def rho(self, i: int, j: int) -> float:
        self._extend(j)
        below = self._H[i - 1] if i >= 1 else 0.0
        return 1.0 + math.exp(self._L[j]) * (self._H[j - 1] - below)

    def rho_grid(self, i: np.ndarray, j: np.ndarray) -> np.ndarray:
        """rho over the outer grid of index arrays (requires j > i pairwise use)."""
        i = np.asarray(i)
        j = np.asarray(j)
        self._extend(int(j.max()))
        below = np.where(i >= 1, self._H[np.maximum(i - 1, 0)], 0.0)
        return 1.0 + np.exp(self._L[j]) * (self._H[j - 1] - below)

    def marginal_probs(self, n: int) -> np.ndarray:
        self._extend(n)
        p = np.zeros(n + 1)
        j = np.arange(1, n + 1)
        p[1:] = 1.0 / (1.0 + np.exp(self._L[j]) * self._H[j - 1])
        return p

    def cond_column(self, j: int) -> np.ndarray:
        self._extend(j)
        i = np.arange(1, j)
        return 1.0 / (1.0 + math.exp(self._L[j]) * (self._H[j - 1] - self._H[i - 1]))


@dataclass(frozen=True)
class ScaleSpec:
    """Exponent and level geometry for a transient level walk.

    ``gamma`` is the scale-function exponent (w(x) = x^(-gamma) decreasing),
    ``a`` the success offset and ``b`` the level spacing; levels live at
    k*b and k*b + a, so b > a > 0 keeps them interleaved.
    """

    gamma: float
    a: float
    b: float

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError(f"scale exponent gamma must be positive, got {self.gamma}")
        if not self.b > self.a > 0:
            raise ValueError(f"need spacing b > offset a > 0, got a={self.a}, b={self.b}")

    @property
    def offset_ratio(self) -> float:
        return self.a / self.b

    @classmethod
    def from_dimension(cls, d: float, a: float, b: float) -> "ScaleSpec":
        """Brownian motion in dimension d (> 2): gamma = d - 2."""
        if d <= 2:
            raise ValueError(f"transient level walk needs dimension d > 2, got {d}")
        return cls(gamma=d - 2.0, a=a, b=b)

    @classmethod
    def from_gbm(cls, mu: float, sigma: float, a: float, b: float) -> "ScaleSpec":
        """Geometric Brownian motion with drift mu and volatility sigma.

        Requires 2*mu > sigma^2 (otherwise the process is recurrent or
        drifts to zero and no level is ever cut); gamma = 2*mu/sigma^2 - 1.
        """
        if sigma <= 0:
            raise ValueError("volatility sigma must be positive")
        if 2.0 * mu <= sigma**2:
            raise ValueError(f"need 2*mu > sigma^2 for transience, got mu={mu}, sigma={sigma}")
        return cls(gamma=2.0 * mu / sigma**2 - 1.0, a=a, b=b)


class ScaleKernel(RhoKernel):
    """Success probabilities of the level walk in units of the spacing b.

    With c = a/b and w(x) = x^(-gamma):

        success_prob(0, i) = (w(i) - w(i+c)) / w(i)
        success_prob(i, j) = [w(i) / (w(i) - w(j+c))] * [(w(j) - w(j+c)) / w(j)]

    The same-point gap w(x) - w(x+c) is evaluated via expm1/log1p to avoid
    cancellation at large x.
    """

    def __init__(self, spec: ScaleSpec):
        self.spec = spec
        self.description = f"scale(gamma={spec.gamma}, a={spec.a}, b={spec.b})"

    def _w(self, x):
        return np.power(x, -self.spec.gamma)

    def _w_gap(self, x):
        """w(x) - w(x + c), cancellation-free."""
        g, c = self.spec.gamma, self.spec.offset_ratio
        return -np.power(x, -g) * np.expm1(-g * np.log1p(c / x))

    def rho(self, i: int, j: int) -> float:
        return 1.0 / self.success_prob(i, j)

    def success_prob(self, i: int, j: int) -> float:
        if j == i:
            return 1.0
        if j < i or i < 0:
            raise ValueError(f"success_prob needs j >= i >= 0, got ({i}, {j})")
        c = self.spec.offset_ratio
        if i == 0:
            return float(self._w_gap(j) / self._w(j))
        wi = self._w(float(i))
        return float(wi / (wi - self._w(j + c)) * self._w_gap(j) / self._w(j))

    def joint_prob(self, indices: Sequence[int]) -> float:
        """P(success at every index in the increasing tuple), product form."""
        js = list(indices)
        if any(b <= a for a, b in zip(js, js[1:])) or js[0] < 1:
            raise ValueError("indices must be strictly increasing and >= 1")
        c = self.spec.offset_ratio
        out = 1.0
        for a, b in zip(js, js[1:]):
            out *= float(self._w_gap(a) / (self._w(float(a)) - self._w(b + c)))
        last = js[-1]
        return out * float(self._w_gap(last) / self._w(float(last)))

    def marginal_probs(self, n: int) -> np.ndarray:
        p = np.zeros(n + 1)
        x = np.arange(1, n + 1, dtype=float)
        p[1:] = self._w_gap(x) / self._w(x)
        return p

    def cond_column(self, j: int) -> np.ndarray:
        c = self.spec.offset_ratio
        i = np.arange(1, j, dtype=float)
        wi = self._w(i)
        return wi / (wi - self._w(j + c)) * float(self._w_gap(j) / self._w(float(j)))


def kernel_distance(weight, label: str = "") -> DistanceKernel:
    """Distance kernel from a weight callable or a WeightSequence."""
    if isinstance(weight, WeightSequence):
        return DistanceKernel(weight.weight, label or weight.label)
    return DistanceKernel(weight, label)


def kernel_power(alpha: float, beta: float) -> PowerKernel:
    return PowerKernel(alpha, beta)


def kernel_branching(p) -> BranchingKernel:
    """Branching kernel from an OffspringSchedule or a bounded table of p_t."""
    if isinstance(p, OffspringSchedule):
        return BranchingKernel(p)
    return BranchingKernel(OffspringSchedule.from_table(p))


def kernel_scale(spec: ScaleSpec) -> ScaleKernel:
    return ScaleKernel(spec)
