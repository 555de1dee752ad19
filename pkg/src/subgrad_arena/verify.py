"""Monte Carlo estimators and property suites for the lemmas the bounds rest on.

Every estimator returns a :class:`LemmaEstimate` carrying the empirical
frequency, the trial count, the seed and the theoretical tail bound it is
measured against; the pass flag is always computed from those fields, never
set by hand.  Estimates whose bound is far below 1/trials can only pass with
zero observed events, so each escape-style estimator ships a gamma = 0
stress mode that must see frequent events, guarding against a silently
broken detector.

Instances derived from small epsilon live in dimensions from 2^20 upward,
where materializing the hidden orthonormal tuple for every trial is absurd.
The estimators therefore sample only what the statistics depend on: the
inner products of the resampled directions with a fixed query, whose joint
law is the first few coordinates of a Haar-random point on a sphere of the
complement's dimension.  That marginal is drawn exactly with a handful of
Gaussians plus one chi-square tail, independent of the ambient dimension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .core import RngStream, sample_unit_vector
from .instances import (
    MaxCoordInstance,
    NemYudInstance,
    maxcoord_subgrad,
    nemyud_params,
    nemyud_subgrad,
)
from .wall import (
    WallInstance,
    WallParams,
    fwall_subgrads,
    fwall_truncated_from_coords,
    fwall_values_from_coords,
    wall_params,
)

__all__ = [
    "DisclosureAudit",
    "FirstOrderOracle",
    "LemmaEstimate",
    "PropertyCheck",
    "PropertyReport",
    "adversarial_replay_audit",
    "disclosure_audit",
    "estimate_argmax_escape",
    "estimate_concentration",
    "estimate_guess_success",
    "oracle_for",
    "property_suite",
]

ESCAPE_TOL = 1e-9  # values closer than this count as equal for escape events


def binomial_slack(bound: float, trials: int) -> float:
    """3-sigma binomial slack plus one-trial resolution.

    The variance term treats the bound as a probability; bounds above 1
    (legal for tail bounds) are clamped, and then the pass test is vacuous
    anyway.
    """
    p = min(max(bound, 0.0), 1.0)
    return 3.0 * math.sqrt(p * (1.0 - p) / trials) + 1.0 / trials


@dataclass(frozen=True)
class LemmaEstimate:
    lemma_id: str
    successes: int
    trials: int
    theoretical_bound: float
    seed: int

    @property
    def empirical_probability(self) -> float:
        return self.successes / self.trials

    @property
    def passed(self) -> bool:
        return self.empirical_probability <= self.theoretical_bound + binomial_slack(self.theoretical_bound, self.trials)

    def to_dict(self) -> dict:
        return {
            "lemma_id": self.lemma_id,
            "empirical_probability": self.empirical_probability,
            "successes": self.successes,
            "trials": self.trials,
            "theoretical_bound": self.theoretical_bound,
            "seed": self.seed,
            "pass": self.passed,
        }


def _blocked_trials(trials: int, rng: RngStream, worker: Callable[[int, np.random.Generator], int],
                    block: int = 4096, threads: int = 1) -> int:
    """Run trials in fixed seed blocks so results never depend on threading."""
    blocks = [(i, min(block, trials - i * block)) for i in range((trials + block - 1) // block)]

    def run(args):
        idx, size = args
        return worker(size, rng.substream(idx).generator())

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            return sum(pool.map(run, blocks))
    return sum(run(b) for b in blocks)


# ---------------------------------------------------------------------------
# concentration on the sphere
# ---------------------------------------------------------------------------


def estimate_concentration(n: int, c: float, trials: int, rng: RngStream, threads: int = 1) -> LemmaEstimate:
    """Empirical Pr(|<e_1, v>| >= c) for Haar unit v against 2*exp(-n c^2 / 2).

    The first coordinate is what the event depends on, so each trial draws a
    full Gaussian vector blockwise and normalizes; e_1 is an arbitrary fixed
    direction by rotation invariance.
    """
    if trials < 1:
        raise ValueError("trials must be positive")

    def worker(size: int, gen: np.random.Generator) -> int:
        g = gen.standard_normal((size, n))
        first = g[:, 0] / np.linalg.norm(g, axis=1)
        return int(np.count_nonzero(np.abs(first) >= c))

    successes = _blocked_trials(trials, rng, worker, threads=threads)
    bound = 2.0 * math.exp(-n * c * c / 2.0)
    return LemmaEstimate("concentration", successes, trials, bound, rng.seed)


# ---------------------------------------------------------------------------
# implicit overlap sampling for the hidden-tuple families
# ---------------------------------------------------------------------------


def _suffix_overlaps(gen: np.random.Generator, size: int, count: int, ambient: int, scale) -> np.ndarray:
    """Joint law of <v_i, x> for `count` fresh orthonormal directions.

    The directions are Haar in a subspace of dimension `ambient` containing
    a fixed vector of norm `scale`; the overlaps are the first `count`
    coordinates of a Haar point on the unit sphere in that subspace, scaled.
    """
    g = gen.standard_normal((size, count))
    tail = gen.chisquare(ambient - count, size=size) if ambient > count else np.zeros(size)
    denom = np.sqrt(np.einsum("ij,ij->i", g, g) + tail)
    return np.asarray(scale)[..., None] * g / denom[:, None]


def _query_in_known_span(gen: np.random.Generator, t: int) -> tuple[np.ndarray, float]:
    """Unit query split over span(v_1..v_{t-1}) plus one fresh direction.

    Returns the t-1 known overlaps and the norm of the fresh component.
    """
    coords = sample_unit_vector(t, gen)
    return coords[:-1], float(abs(coords[-1]))


def estimate_argmax_escape(
    epsilon: float,
    t: int,
    trials: int,
    rng: RngStream,
    family: str = "nemyud",
    gamma_zero: bool = False,
    threads: int = 1,
) -> LemmaEstimate:
    """Frequency of the truncation-escape event f_V(x) != f_V^(t)(x).

    v_1..v_{t-1} stay fixed, the query is a fixed random unit vector in
    their span plus one fresh direction, and v_t..v_k are resampled every
    trial.  The theoretical bound is n^-7.  With ``gamma_zero=True`` the
    tie-breaking margin is removed (and, for the wall family, the query is
    shortened so the linear branch is exposed); escapes then become frequent
    and the detector is exercised for real.
    """
    if family not in ("nemyud", "wall"):
        raise ValueError("family must be 'nemyud' or 'wall'")
    if family == "nemyud":
        k, gamma, n = nemyud_params(epsilon)
        params = None
    else:
        params = wall_params(epsilon)
        k, n, gamma = params.k, params.n, params.gamma
    if not 1 <= t <= k:
        raise ValueError(f"t must lie in [1, {k}]")
    if gamma_zero:
        gamma = 0.0
        if params is not None:
            params = WallParams(k=params.k, n=params.n, delta=params.delta, gamma=1e-300,
                                alpha=params.alpha, beta=params.beta, epsilon=params.epsilon)

    setup_gen = rng.substream(2**32).generator()
    known, rho = _query_in_known_span(setup_gen, t)
    xnorm = 1.0
    if family == "wall" and gamma_zero:
        # short queries keep the linear part above the wall, which otherwise
        # masks every escape of the (gamma = 0) linear maximum
        assert params is not None
        xnorm = params.alpha * params.delta / (2.0 * (1.0 + params.alpha))
        known, rho = known * xnorm, rho * xnorm

    fresh = k - t + 1
    ambient = n - t + 1
    ranks = np.arange(k - 1, -1, -1, dtype=np.float64)  # k - i, i = 1..k

    def worker(size: int, gen: np.random.Generator) -> int:
        suffix = _suffix_overlaps(gen, size, fresh, ambient, rho)
        A = np.concatenate([np.broadcast_to(known, (size, t - 1)), suffix], axis=1)
        if family == "nemyud":
            terms = A + ranks * gamma * xnorm
            full = np.max(terms, axis=1)
            trunc = np.max(terms[:, :t], axis=1)
        else:
            assert params is not None
            rho_w = np.sqrt(np.maximum(xnorm**2 - np.einsum("ij,ij->i", A, A), 0.0))
            full = fwall_values_from_coords(params, A, rho_w)
            znorm = np.sqrt(np.maximum(xnorm**2 - np.einsum("ij,ij->i", A[:, :t], A[:, :t]), 0.0))
            trunc = fwall_truncated_from_coords(params, A[:, :t], znorm)
        return int(np.count_nonzero(np.abs(full - trunc) > ESCAPE_TOL))

    successes = _blocked_trials(trials, rng, worker, threads=threads)
    lemma_id = "wall-argmax-escape" if family == "wall" else "argmax-escape"
    if gamma_zero:
        lemma_id += "-stress"
    return LemmaEstimate(lemma_id, successes, trials, float(n) ** -7, rng.seed)


def estimate_guess_success(
    epsilon: float,
    trials: int,
    rng: RngStream,
    family: str = "nemyud",
    candidate: str = "best-guess",
    threads: int = 1,
) -> LemmaEstimate:
    """Frequency with which a candidate output is epsilon-optimal.

    v_1..v_{k-1} are fixed, v_k is resampled per trial.  Candidates:
    ``best-guess`` (-sum_{i<k} v_i / sqrt(k-1)), ``random-unit`` (one fixed
    Haar unit vector), ``origin``, and the ``full-knowledge`` point
    -sum_i v_i / sqrt(k) that does use v_k.  Epsilon-optimality is scored
    through its necessary consequence f(x) <= -8 eps (nemyud) or -9 eps
    (wall); the bound is the sphere-cap tail 2*exp(-32 (n-k+1) eps^2).
    """
    if family == "nemyud":
        k, gamma, n = nemyud_params(epsilon)
        params = None
    elif family == "wall":
        params = wall_params(epsilon)
        k, n, gamma = params.k, params.n, params.gamma
    else:
        raise ValueError("family must be 'nemyud' or 'wall'")

    threshold = -8.0 * epsilon if family == "nemyud" else -9.0 * epsilon
    ranks = np.arange(k - 1, -1, -1, dtype=np.float64)
    penalties = np.arange(1, k + 1, dtype=np.float64)

    if candidate == "best-guess":
        known = np.full(k - 1, -1.0 / math.sqrt(k - 1))
        rho, xnorm = 0.0, 1.0
    elif candidate == "random-unit":
        coords = sample_unit_vector(k, rng.substream(2**32).generator())
        known, rho, xnorm = coords[:-1], float(abs(coords[-1])), 1.0
    elif candidate == "origin":
        known, rho, xnorm = np.zeros(k - 1), 0.0, 0.0
    elif candidate == "full-knowledge":
        known, rho, xnorm = None, None, 1.0  # overlaps are -1/sqrt(k) with every v_i
    else:
        raise ValueError(f"unknown candidate {candidate!r}")

    def value_rows(A: np.ndarray, xnorms: np.ndarray) -> np.ndarray:
        if family == "nemyud":
            return np.max(A + ranks * gamma * xnorms[:, None], axis=1)
        assert params is not None
        p_vals = np.max(A - params.gamma * penalties, axis=1)
        out = p_vals.copy()
        maybe = p_vals <= threshold  # the wall can only raise the value
        if np.any(maybe):
            rho_w = np.sqrt(np.maximum(xnorms[maybe] ** 2 - np.einsum("ij,ij->i", A[maybe], A[maybe]), 0.0))
            wall_vals = fwall_values_from_coords(params, A[maybe], rho_w)
            out[maybe] = np.maximum(p_vals[maybe], wall_vals)
        return out

    def worker(size: int, gen: np.random.Generator) -> int:
        if candidate == "full-knowledge":
            A = np.full((size, k), -1.0 / math.sqrt(k))
        else:
            last = _suffix_overlaps(gen, size, 1, n - k + 1, rho)
            A = np.concatenate([np.broadcast_to(known, (size, k - 1)), last], axis=1)
        values = value_rows(A, np.full(size, xnorm))
        return int(np.count_nonzero(values <= threshold))

    successes = _blocked_trials(trials, rng, worker, threads=threads)
    bound = 2.0 * math.exp(-32.0 * (n - k + 1) * epsilon**2)
    return LemmaEstimate("guess", successes, trials, bound, rng.seed)


# ---------------------------------------------------------------------------
# information disclosure of the max-coordinate oracle
# ---------------------------------------------------------------------------


@dataclass
class DisclosureAudit:
    per_query_prefix_lengths: np.ndarray
    per_query_new_fixes: np.ndarray
    total_fixed: int

    @property
    def mean_prefix_length(self) -> float:
        return float(np.mean(self.per_query_prefix_lengths))

    @property
    def mean_new_fixes(self) -> float:
        return float(np.mean(self.per_query_new_fixes))

    def to_dict(self) -> dict:
        return {
            "queries": int(self.per_query_prefix_lengths.size),
            "mean_prefix_length": self.mean_prefix_length,
            "mean_new_fixes": self.mean_new_fixes,
            "total_fixed": self.total_fixed,
        }


def disclosure_audit(inst: MaxCoordInstance, queries: Iterable[np.ndarray]) -> DisclosureAudit:
    """Replay the subgradient oracle and record what each query fixes.

    A query fixes the signs along its revealed prefix; entries already fixed
    by earlier queries do not count again.  The running fixed set is the
    information-theoretic state the disclosure lemma tracks.
    """
    X = np.atleast_2d(np.asarray(list(queries), dtype=np.float64))
    B, n = X.shape
    if n != inst.n:
        raise ValueError("query dimension mismatch")
    orders = np.argsort(-np.abs(X), axis=1, kind="stable")
    agree = np.take_along_axis(np.where(X >= 0, 1.0, -1.0), orders, axis=1) == inst.z[orders]
    has_hit = agree.any(axis=1)
    j = np.where(has_hit, np.argmax(agree, axis=1), n - 1)

    fixed = np.zeros(n, dtype=bool)
    new_fixes = np.empty(B, dtype=np.int64)
    for q in range(B):
        prefix = orders[q, : j[q] + 1]
        new_fixes[q] = np.count_nonzero(~fixed[prefix])
        fixed[prefix] = True
    return DisclosureAudit(
        per_query_prefix_lengths=j + 1,
        per_query_new_fixes=new_fixes,
        total_fixed=int(np.count_nonzero(fixed)),
    )


def adversarial_replay_audit(inst: MaxCoordInstance, max_queries: int | None = None) -> DisclosureAudit:
    """Drive the oracle with the optimal sign-guessing replay strategy.

    Every known index is queried with the flipped sign at large magnitude, so
    the oracle must walk past it; unknown indices are probed at +1 with
    smaller, strictly decreasing magnitudes.  Each query therefore fixes a
    geometric number of new signs (mean below 2) until the whole vector is
    known.
    """
    n = inst.n
    if max_queries is None:
        max_queries = 4 * n + 16
    known = np.zeros(n, dtype=bool)
    z_seen = np.zeros(n)
    prefix_lengths: list[int] = []
    new_fixes: list[int] = []
    for _ in range(max_queries):
        if known.all():
            break
        x = np.zeros(n)
        idx_known = np.nonzero(known)[0]
        idx_unknown = np.nonzero(~known)[0]
        # known indices first (magnitudes > 1, disagreeing signs)
        x[idx_known] = -z_seen[idx_known] * (2.0 - np.arange(idx_known.size) / (2.0 * n))
        # unknown indices probed at +1, decreasing magnitudes keep a fixed order
        x[idx_unknown] = 0.5 * (1.0 - np.arange(idx_unknown.size) / (2.0 * n))
        answer = maxcoord_subgrad(inst, x)
        prefix = np.asarray(answer.disclosure.prefix, dtype=np.intp)
        fresh = prefix[~known[prefix]]
        # indices before the stopping one disagreed in sign; the stopping
        # index's sign is read off the returned subgradient
        signs = np.where(x[prefix] >= 0, 1.0, -1.0)
        z_seen[prefix[:-1]] = -signs[:-1]
        stop = prefix[-1]
        z_seen[stop] = answer.subgradient[stop]
        known[prefix] = True
        prefix_lengths.append(len(prefix))
        new_fixes.append(int(fresh.size))
    return DisclosureAudit(
        per_query_prefix_lengths=np.asarray(prefix_lengths, dtype=np.int64),
        per_query_new_fixes=np.asarray(new_fixes, dtype=np.int64),
        total_fixed=int(np.count_nonzero(known)),
    )


def disclosure_battery(n: int, trials: int, rng: RngStream, episodes: int = 200) -> dict:
    """Random-query and adversarial-replay disclosure statistics in one report.

    Random unit queries must fix at most 2.05 new signs per query on average
    (the lemma bound 2 plus Monte Carlo headroom); the adversarial replay is
    held to 2 plus 3 standard errors of its own per-query counts.
    """
    gen = rng.substream(0).generator()
    inst = MaxCoordInstance(z=np.where(gen.integers(0, 2, size=n) == 1, 1.0, -1.0), epsilon=0.1)
    queries = gen.standard_normal((trials, n))
    queries /= np.linalg.norm(queries, axis=1)[:, None]
    random_audit = disclosure_audit(inst, queries)

    adv_new: list[np.ndarray] = []
    for e in range(episodes):
        egen = rng.substream(e + 1).generator()
        z = np.where(egen.integers(0, 2, size=n) == 1, 1.0, -1.0)
        adv_audit = adversarial_replay_audit(MaxCoordInstance(z=z, epsilon=0.1))
        adv_new.append(adv_audit.per_query_new_fixes)
    counts = np.concatenate(adv_new)
    adv_mean = float(np.mean(counts))
    adv_sigma = float(np.std(counts) / math.sqrt(counts.size))

    passed = (
        random_audit.mean_new_fixes <= 2.05
        and random_audit.mean_prefix_length <= 2.05
        and adv_mean <= 2.0 + 3.0 * adv_sigma
    )
    return {
        "lemma_id": "disclosure",
        "n": n,
        "trials": trials,
        "random_mean_new_fixes": random_audit.mean_new_fixes,
        "random_mean_prefix_length": random_audit.mean_prefix_length,
        "adversarial_mean_new_fixes": adv_mean,
        "adversarial_sigma": adv_sigma,
        "adversarial_queries": int(counts.size),
        "theoretical_bound": 2.0,
        "seed": rng.seed,
        "pass": passed,
    }


# ---------------------------------------------------------------------------
# structural property suites
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FirstOrderOracle:
    """Uniform first-order access to one instance for the property suite."""

    dim: int
    lipschitz_bound: float
    positively_homogeneous: bool
    values: Callable[[np.ndarray], np.ndarray]  # (B, n) -> (B,)
    subgrads: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]  # -> (values, (B, n))


def oracle_for(inst) -> FirstOrderOracle:
    if isinstance(inst, MaxCoordInstance):
        def values(X):
            return np.max(inst.z * np.atleast_2d(X), axis=1)

        def subgrads(X):
            X = np.atleast_2d(X)
            answers = [maxcoord_subgrad(inst, x) for x in X]
            return (np.array([a.value for a in answers]), np.stack([a.subgradient for a in answers]))

        return FirstOrderOracle(inst.n, 1.0, False, values, subgrads)
    if isinstance(inst, NemYudInstance):
        ranks = np.arange(inst.k - 1, -1, -1, dtype=np.float64)

        def values(X):
            X = np.atleast_2d(X)
            return np.max(X @ inst.V.T + ranks * inst.gamma * np.linalg.norm(X, axis=1)[:, None], axis=1)

        def subgrads(X):
            X = np.atleast_2d(X)
            answers = [nemyud_subgrad(inst, x) for x in X]
            return (np.array([a.value for a in answers]), np.stack([a.subgradient for a in answers]))

        return FirstOrderOracle(inst.n, inst.lipschitz_bound, True, values, subgrads)
    if isinstance(inst, WallInstance):
        def values(X):
            X = np.atleast_2d(X)
            A = X @ inst.V.T
            rho = np.linalg.norm(X - A @ inst.V, axis=1)
            return fwall_values_from_coords(inst.params, A, rho)

        return FirstOrderOracle(inst.n, inst.params.lipschitz_bound, False, values,
                                lambda X: fwall_subgrads(inst, X))
    raise TypeError(f"no oracle adapter for {type(inst).__name__}")


@dataclass(frozen=True)
class PropertyCheck:
    name: str
    samples: int
    violations: int
    worst: float  # most positive violation observed (<= 0 means clean)

    @property
    def passed(self) -> bool:
        return self.violations == 0


@dataclass(frozen=True)
class PropertyReport:
    checks: tuple[PropertyCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "checks": [
                {"name": c.name, "samples": c.samples, "violations": c.violations, "worst": c.worst}
                for c in self.checks
            ],
        }


def property_suite(oracle: FirstOrderOracle, trials: int, rng: RngStream,
                   tol: float = 1e-9, lipschitz_tol: float = 1e-6) -> PropertyReport:
    """Subgradient inequality, midpoint convexity, Lipschitz norms, homogeneity.

    All sample points are drawn from the unit ball.  A check entry records
    how many sampled assertions failed beyond tolerance and the worst signed
    violation (negative means the inequality held with margin).
    """
    gen = rng.generator()

    def ball(count: int) -> np.ndarray:
        g = gen.standard_normal((count, oracle.dim))
        g /= np.linalg.norm(g, axis=1)[:, None]
        return g * gen.uniform(0.0, 1.0, size=count)[:, None] ** (1.0 / oracle.dim)

    X, Y = ball(trials), ball(trials)
    fx, gx = oracle.subgrads(X)
    fy = oracle.values(Y)

    sub_viol = fx + np.einsum("ij,ij->i", gx, Y - X) - fy
    checks = [PropertyCheck("subgradient-inequality", trials, int(np.count_nonzero(sub_viol > tol)), float(np.max(sub_viol)))]

    mid_viol = oracle.values((X + Y) / 2.0) - (oracle.values(X) + fy) / 2.0
    checks.append(PropertyCheck("convexity-midpoint", trials, int(np.count_nonzero(mid_viol > tol)), float(np.max(mid_viol))))

    norm_viol = np.linalg.norm(gx, axis=1) - oracle.lipschitz_bound
    checks.append(PropertyCheck("lipschitz-norm", trials, int(np.count_nonzero(norm_viol > lipschitz_tol)), float(np.max(norm_viol))))

    if oracle.positively_homogeneous:
        worst = -math.inf
        violations = 0
        fxv = oracle.values(X)
        for alpha in (0.5, 2.0, 10.0):
            fax, gax = oracle.subgrads(alpha * X)
            value_err = np.abs(fax - alpha * fxv) - tol * max(1.0, alpha)
            grad_err = np.max(np.abs(gax - gx), axis=1) - tol
            violations += int(np.count_nonzero(value_err > 0)) + int(np.count_nonzero(grad_err > 0))
            worst = max(worst, float(np.max(value_err)), float(np.max(grad_err)))
        checks.append(PropertyCheck("positive-homogeneity", 3 * trials, violations, worst))

    return PropertyReport(tuple(checks))
