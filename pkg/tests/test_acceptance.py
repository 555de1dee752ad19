"""Acceptance gate: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines alongside pytest's own verdicts.
"""

import json
import math
import time

import numpy as np
import pytest

from subgrad_arena.cli import main as cli_main
from subgrad_arena.core import RngStream, sample_orthonormal_tuple
from subgrad_arena.groupquery import exhaustive_reduction_check
from subgrad_arena.instances import (
    MaxCoordInstance,
    NemYudInstance,
    maxcoord_optimum,
    maxcoord_value,
    recover_z,
)
from subgrad_arena.optimize import GdConfig, projected_subgradient_descent
from subgrad_arena.cli import first_order_oracle
from subgrad_arena.verify import (
    adversarial_replay_audit,
    disclosure_audit,
    estimate_argmax_escape,
    estimate_concentration,
    estimate_guess_success,
    oracle_for,
    property_suite,
)
from subgrad_arena.wall import WallInstance, WallParams, wall_reference_point, wall_value

from _oracles import WallBruteForce


def report(number: int, ok: bool, detail: str) -> None:
    print(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'} — {detail}")
    assert ok, f"criterion {number} failed: {detail}"


def test_criterion_01_pgd_reproduces_theorem_rate():
    # eta = eps, T = ceil(1/eps^2) reaches gap <= eps on every seeded run
    started = time.perf_counter()
    runs_per_eps = 100
    worst = -math.inf
    for eps, expected_n in ((0.2, 22), (0.1, 90), (0.05, 360)):
        for seed in range(runs_per_eps):
            inst = MaxCoordInstance.from_epsilon(eps, RngStream(seed))
            assert inst.n == expected_n
            trace = projected_subgradient_descent(
                first_order_oracle(inst), GdConfig.for_accuracy(eps), dim=inst.n
            )
            gap = maxcoord_value(inst, trace.averaged_output) - maxcoord_optimum(inst)[1]
            worst = max(worst, gap / eps)
            assert trace.query_count == math.ceil(1.0 / eps**2)
            assert gap <= eps
    elapsed = time.perf_counter() - started
    report(1, elapsed < 5.0 and worst <= 1.0,
           f"300/300 runs within accuracy (worst gap/eps = {worst:.3f}), {elapsed:.2f}s < 5s")


def test_criterion_02_sweep_scaling_table(tmp_path):
    out = tmp_path / "sweep.json"
    rc = cli_main(["sweep", "--seed", "11", "--out", str(out)])
    rows = json.loads(out.read_text())["results"]
    exact = all(r["query_count"] == math.ceil(1.0 / r["epsilon"] ** 2) for r in rows)
    report(2, rc == 0 and exact,
           "query counts " + str([r["query_count"] for r in rows]) + " match ceil(1/eps^2) exactly")


def test_criterion_03_recovery_from_epsilon_optimal_points():
    points_per_instance = 1000
    total = recovered = 0
    for eps in (0.2, 0.1, 0.05):
        inst = MaxCoordInstance.from_epsilon(eps, RngStream(100))
        x_star, f_star = maxcoord_optimum(inst)
        gen = RngStream(101).generator()
        for _ in range(points_per_instance):
            x = x_star + (0.4 / math.sqrt(inst.n)) * gen.uniform(-1.0, 1.0, inst.n)
            assert maxcoord_value(inst, x) - f_star <= eps  # verified epsilon-optimal
            total += 1
            recovered += int(np.array_equal(recover_z(x), inst.z))
    report(3, recovered == total, f"recovered z exactly on {recovered}/{total} epsilon-optimal points")


def test_criterion_04_disclosure_bound():
    started = time.perf_counter()
    n, queries = 64, 100_000
    gen = RngStream(200).generator()
    inst = MaxCoordInstance(z=np.where(gen.integers(0, 2, n) == 1, 1.0, -1.0), epsilon=0.1)
    X = gen.standard_normal((queries, n))
    X /= np.linalg.norm(X, axis=1)[:, None]
    audit = disclosure_audit(inst, X)
    random_ok = audit.mean_new_fixes <= 2.05 and audit.mean_prefix_length <= 2.05

    counts = []
    for episode in range(200):
        egen = RngStream(201, episode).generator()
        z = np.where(egen.integers(0, 2, n) == 1, 1.0, -1.0)
        counts.append(adversarial_replay_audit(MaxCoordInstance(z=z, epsilon=0.1)).per_query_new_fixes)
    counts = np.concatenate(counts)
    adv_mean = float(np.mean(counts))
    adv_sigma = float(np.std(counts) / math.sqrt(counts.size))
    adversarial_ok = adv_mean <= 2.0 + 3.0 * adv_sigma
    elapsed = time.perf_counter() - started
    report(4, random_ok and adversarial_ok and elapsed < 10.0,
           f"random queries fix {audit.mean_new_fixes:.4f}/query (prefix {audit.mean_prefix_length:.4f}), "
           f"adversarial {adv_mean:.4f} <= 2 + 3*{adv_sigma:.4f}, {elapsed:.2f}s < 10s")


def test_criterion_05_concentration():
    results = []
    for i, c in enumerate((0.05, 0.1, 0.15)):
        est = estimate_concentration(1000, c, 100_000, RngStream(300, i))
        results.append(est)
        assert est.passed, est.to_dict()
    detail = ", ".join(
        f"c={c}: {est.empirical_probability:.5f} <= {est.theoretical_bound:.5f}+slack"
        for c, est in zip((0.05, 0.1, 0.15), results)
    )
    report(5, all(est.passed for est in results), detail)


def test_criterion_06_argmax_escape():
    eps, trials = 0.05, 10_000
    k = round(1.0 / (100.0 * eps**2))
    escape_counts = []
    for family in ("nemyud", "wall"):
        for t in (1, math.ceil(k / 2)):
            est = estimate_argmax_escape(eps, t, trials, RngStream(400, t), family=family)
            escape_counts.append((family, t, est.successes))
            assert est.successes == 0, (family, t, est.successes)
    stress_rates = []
    for family in ("nemyud", "wall"):
        stress = estimate_argmax_escape(eps, 1, 2000, RngStream(401), family=family, gamma_zero=True)
        stress_rates.append(stress.empirical_probability)
        assert stress.empirical_probability >= 1.0 / (2 * k)
    report(6, True,
           f"zero escapes in {trials} trials for " + str(escape_counts)
           + f"; gamma=0 stress rates {stress_rates} >= 1/(2k) = {1.0 / (2 * k)}")


def test_criterion_07_cannot_guess():
    best = estimate_guess_success(0.05, 10_000, RngStream(500), family="nemyud", candidate="best-guess")
    full = estimate_guess_success(0.05, 10_000, RngStream(501), family="nemyud", candidate="full-knowledge")
    report(7, best.successes == 0 and full.empirical_probability == 1.0,
           f"best-guess successes {best.successes}/10000, full-knowledge rate {full.empirical_probability}")


def test_criterion_08_wall_oracle_equivalence():
    # toy parameters, documented: delta = 0.65 keeps the probe-point anchor
    # feasible at n = 3, k = 2; beta = 0.05 keeps Omega wide enough to sample
    params = WallParams.toy(k=2, n=3, delta=0.65, beta=0.05, gamma=0.02)
    inst = WallInstance.toy(params, RngStream(600))
    gen = RngStream(601).generator()
    brute = WallBruteForce(inst, gen, rejection_samples=1_000_000, direction_grid=1000)
    worst = 0.0
    for _ in range(100):
        x = gen.standard_normal(3)
        x *= gen.uniform(0.05, 1.0) / np.linalg.norm(x)
        worst = max(worst, abs(wall_value(inst, x) - brute(x)))
    anchors_ok = (
        wall_value(inst, wall_reference_point(inst)) <= -1.0 / math.sqrt(2)
        and abs(wall_value(inst, np.zeros(3)) + params.alpha * params.delta) <= 1e-9
    )
    report(8, worst <= 1e-3 and anchors_ok,
           f"worst |evaluator - bruteforce| = {worst:.2e} <= 1e-3 over 100 queries; anchors hold")


def test_criterion_09_property_suites():
    trials = 10_000
    mc = MaxCoordInstance.from_epsilon(0.1, RngStream(700))
    ny = NemYudInstance(V=sample_orthonormal_tuple(64, 4, RngStream(701)), gamma=1.0 / 80.0, epsilon=0.05)
    wl = WallInstance.toy(WallParams.toy(k=3, n=16, delta=0.25, beta=0.1, gamma=0.01), RngStream(702))
    details = []
    all_ok = True
    for name, inst in (("maxcoord", mc), ("nemyud", ny), ("wall", wl)):
        rep = property_suite(oracle_for(inst), trials, RngStream(703))
        all_ok &= rep.passed
        details.append(f"{name}: {'ok' if rep.passed else 'VIOLATIONS'}")
        assert rep.passed, (name, rep.to_dict())
    report(9, all_ok, "; ".join(details) + f" over {trials} samples per family (bounds 1, 1+k*gamma, 3)")


def test_criterion_10_or_reduction_exhaustive():
    started = time.perf_counter()
    reports = [exhaustive_reduction_check(n) for n in range(1, 11)]
    elapsed = time.perf_counter() - started
    ok = all(r["pass"] for r in reports) and elapsed < 30.0
    pairs = sum(r["pairs_checked"] for r in reports)
    report(10, ok, f"OR semantics and learner recovery exact on {pairs} (z, S) pairs, n <= 10, "
                   f"{elapsed:.1f}s < 30s")
