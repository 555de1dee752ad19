"""OR-queries on the hidden sign vector through the function oracle.

Querying the max-coordinate value oracle at x = (1/sqrt(n)) * sum_{i in S} e_i
answers whether any index of S carries a +1: the value is 1/sqrt(n) exactly
when one does, and 0 otherwise (or -1/sqrt(n) for the all-minus full-support
query, which folds into the negative answer).  A classical splitting learner
on top of these queries recovers the hidden vector with O(#ones * log n)
queries, demonstrating the oracle interface a group-testing algorithm
consumes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .instances import MaxCoordInstance, maxcoord_value

__all__ = ["LearnResult", "exhaustive_reduction_check", "learn_z_via_or", "or_query"]


def or_query(inst: MaxCoordInstance, S: Iterable[int]) -> int:
    """1 if some index in S has z_i = +1, else 0, via one value-oracle call."""
    idx = np.asarray(sorted(set(int(i) for i in S)), dtype=np.intp)
    if idx.size == 0:
        raise ValueError("S must be a nonempty subset of indices")
    if idx[0] < 0 or idx[-1] >= inst.n:
        raise ValueError("S contains out-of-range indices")
    x = np.zeros(inst.n)
    x[idx] = 1.0 / math.sqrt(inst.n)
    value = maxcoord_value(inst, x)
    # value is 1/sqrt(n) on a hit; 0 or -1/sqrt(n) (all-minus full support) on a miss
    return 1 if abs(value - 1.0 / math.sqrt(inst.n)) <= 1e-12 else 0


@dataclass(frozen=True)
class LearnResult:
    z_hat: np.ndarray
    queries_used: int
    complete: bool
    resolved: np.ndarray  # bool mask of indices whose sign is certain


def learn_z_via_or(inst: MaxCoordInstance, budget: int) -> LearnResult:
    """Recover z by adaptive interval splitting over OR-queries.

    Probes the full index range first, then bisects every interval that
    answers positively until each +1 index is isolated; intervals answering
    negatively resolve all their indices to -1 at once.  Uses at most
    2 * (#ones) * ceil(log2 n) + 1 queries; if the budget runs out the
    partial result is returned with ``complete=False`` and unresolved signs
    default to -1.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    n = inst.n
    z_hat = -np.ones(n)
    resolved = np.zeros(n, dtype=bool)
    queries = 0
    stack: list[tuple[int, int]] = [(0, n)]  # half-open intervals, LIFO
    while stack:
        lo, hi = stack.pop()
        if queries >= budget:
            return LearnResult(z_hat=z_hat, queries_used=queries, complete=False, resolved=resolved)
        queries += 1
        if or_query(inst, range(lo, hi)) == 0:
            z_hat[lo:hi] = -1.0
            resolved[lo:hi] = True
            continue
        if hi - lo == 1:
            z_hat[lo] = 1.0
            resolved[lo] = True
            continue
        mid = (lo + hi) // 2
        stack.append((mid, hi))
        stack.append((lo, mid))
    return LearnResult(z_hat=z_hat, queries_used=queries, complete=True, resolved=resolved)


def exhaustive_reduction_check(n: int) -> dict:
    """Check OR semantics and exact learner recovery for every z at size n.

    Every (z, S) pair with nonempty S goes through :func:`or_query` and is
    compared with the direct OR of the signs; every z then runs the learner
    with the worst-case budget 2*n*ceil(log2 n) + 1 and must recover z
    exactly within it.
    """
    if n < 1 or n > 20:
        raise ValueError("exhaustive check supported for 1 <= n <= 20")
    budget = 2 * n * max(1, math.ceil(math.log2(n))) + 1
    subsets = [[i for i in range(n) if (mask >> i) & 1] for mask in range(1, 1 << n)]
    or_mismatches = 0
    learner_failures = 0
    over_budget = 0
    for zmask in range(1 << n):
        z = np.array([1.0 if (zmask >> i) & 1 else -1.0 for i in range(n)])
        inst = MaxCoordInstance(z=z, epsilon=0.1)
        for S in subsets:
            expected = 1 if any(z[i] > 0 for i in S) else 0
            if or_query(inst, S) != expected:
                or_mismatches += 1
        res = learn_z_via_or(inst, budget)
        if not (res.complete and np.array_equal(res.z_hat, z)):
            learner_failures += 1
        if res.queries_used > budget:
            over_budget += 1
    return {
        "n": n,
        "pairs_checked": (1 << n) * ((1 << n) - 1),
        "or_mismatches": or_mismatches,
        "learner_failures": learner_failures,
        "over_budget": over_budget,
        "pass": or_mismatches == 0 and learner_failures == 0 and over_budget == 0,
    }
