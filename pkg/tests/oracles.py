"""Independent brute-force oracles used across the test suite.

Everything here enumerates or sums directly, never sharing code paths with
the implementations it checks.
"""

from __future__ import annotations

import itertools
import math


def phi_bruteforce(weight_fn, n: int, m: int, gap: int = 1) -> float:
    """Enumerate all gap-feasible increasing m-tuples in [1, n]."""
    terms = []
    for tup in itertools.combinations(range(1, n + 1), m):
        prev = 0
        prod = 1.0
        feasible = True
        for j in tup:
            if j - prev < gap:
                feasible = False
                break
            prod *= 1.0 / weight_fn(j - prev)
            prev = j
        if feasible:
            terms.append(prod)
    return math.fsum(terms)


def phi_recursion(weight_fn, n: int, m: int, gap: int = 1) -> float:
    """Scalar re-implementation of the level recursion with exact summation."""
    table = [1.0] * (n + 1)
    for _ in range(m):
        nxt = [0.0] * (n + 1)
        for x in range(gap, n + 1):
            nxt[x] = math.fsum(table[x - j] / weight_fn(j) for j in range(gap, x + 1))
        table = nxt
    return table[n]


def count_moment_bruteforce(kernel, n: int, k: int) -> float:
    """E(count^k) by expanding over every index tuple in [1, n]^k.

    Each tuple contributes the joint success probability of its distinct
    sorted indices, which is the product of conditional success
    probabilities along the sorted chain (starting from index 0).
    """
    terms = []
    for tup in itertools.product(range(1, n + 1), repeat=k):
        prev = 0
        prod = 1.0
        for j in sorted(set(tup)):
            prod *= kernel.success_prob(prev, j)
            prev = j
        terms.append(prod)
    return math.fsum(terms)


def psi_bruteforce(kernel, n: int, m: int) -> float:
    """Sum of joint success probabilities over increasing m-tuples."""
    terms = []
    for tup in itertools.combinations(range(1, n + 1), m):
        prev = 0
        prod = 1.0
        for j in tup:
            prod *= kernel.success_prob(prev, j)
            prev = j
        terms.append(prod)
    return math.fsum(terms)


def surjections_by_composition(k: int, m: int) -> int:
    """Sum of multinomials k!/(l_1! ... l_m!) over compositions of k into
    m positive parts."""
    if m == 0:
        return 1 if k == 0 else 0
    total = 0
    for cuts in itertools.combinations(range(1, k), m - 1):
        parts = []
        prev = 0
        for c in cuts:
            parts.append(c - prev)
            prev = c
        parts.append(k - prev)
        term = math.factorial(k)
        for p in parts:
            term //= math.factorial(p)
        total += term
    return total


def geometric_moment_bruteforce(p: float, k: int, tol: float = 1e-14) -> float:
    """Sum i^k (1-p)^i p until the remaining tail bound drops below tol."""
    total = 0.0
    i = 0
    while True:
        w = (1.0 - p) ** i * p
        total += i**k * w
        # crude but safe tail bound: remaining mass times a polynomial cap
        if (1.0 - p) ** (i + 1) * ((i + 1 + k / p) ** k) < tol:
            return total
        i += 1
