"""Seeded, configuration-driven experiment runner.

Commands: ``gen`` (serialize an instance), ``gd`` (projected subgradient
descent at the theorem schedule), ``verify`` (lemma estimators and property
suites), ``reduce`` (exhaustive OR-reduction check), ``sweep`` (gd over an
epsilon grid, demonstrating the 1/epsilon^2 query scaling).

Reports are single-document JSON or header-row CSV, embed the fully resolved
configuration and library version, and are byte-identical for identical
configurations; wall-clock timestamps go to a ``<out>.meta.json`` sidecar.
Exit status 0 means every check passed, 1 a failed check (the failing
lemma-id is printed), 2 a usage error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import os
import sys
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .core import RngStream
from .instances import (
    MaxCoordInstance,
    NemYudInstance,
    instance_to_json,
    maxcoord_optimum,
    maxcoord_subgrad,
    maxcoord_value,
    nemyud_reference_point,
    nemyud_subgrad,
    nemyud_value,
)
from .optimize import GdConfig, projected_subgradient_descent, rescale_problem
from .groupquery import exhaustive_reduction_check
from .verify import (
    disclosure_battery,
    estimate_argmax_escape,
    estimate_concentration,
    estimate_guess_success,
)
from .wall import WallInstance, fwall_subgrad, fwall_value, wall_reference_point

FAMILIES = ("maxcoord", "nemyud", "wall")
COMMANDS = ("gen", "gd", "verify", "reduce", "sweep")
FORMATS = ("json", "csv")
LEMMAS = ("concentration", "argmax-escape", "wall-argmax-escape", "guess", "disclosure")
DEFAULT_SWEEP_GRID = (0.2, 0.1, 0.05, 0.025)
REPORT_FORMAT = 1


class ConfigError(Exception):
    pass


@dataclass
class ExperimentConfig:
    command: str
    epsilon: float | None = None
    family: str = "maxcoord"
    seed: int = 0
    trials: int | None = None
    output_path: str | None = None
    format: str = "json"
    lemma: str | None = None
    n: int | None = None
    c: float | None = None
    t: int | None = None
    threads: int = 1

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown family {self.family!r}")
        if self.format not in FORMATS:
            raise ConfigError(f"unknown format {self.format!r}")
        if self.epsilon is not None and not 0.0 < self.epsilon < 0.95:
            raise ConfigError("epsilon must lie in (0, 0.95)")
        if self.trials is not None and self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.lemma is not None and self.lemma not in LEMMAS:
            raise ConfigError(f"unknown lemma {self.lemma!r}; known: {', '.join(LEMMAS)}")
        if self.threads < 1:
            raise ConfigError("threads must be at least 1")

    @classmethod
    def from_sources(cls, command: str, file_values: dict, flag_values: dict) -> "ExperimentConfig":
        allowed = {f.name for f in dataclasses.fields(cls)}
        unknown = set(file_values) - allowed
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        merged = dict(file_values)
        merged.update({k: v for k, v in flag_values.items() if v is not None})
        merged["command"] = command
        try:
            return cls(**merged)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc


# ---------------------------------------------------------------------------
# instance plumbing shared by gd and sweep
# ---------------------------------------------------------------------------


def build_instance(family: str, epsilon: float, seed: int):
    rng = RngStream(seed)
    if family == "maxcoord":
        return MaxCoordInstance.from_epsilon(epsilon, rng)
    if family == "nemyud":
        return NemYudInstance.from_epsilon(epsilon, rng)
    return WallInstance.from_epsilon(epsilon, rng)


def first_order_oracle(inst):
    if isinstance(inst, MaxCoordInstance):
        return lambda x: maxcoord_subgrad(inst, x)
    if isinstance(inst, NemYudInstance):
        return lambda x: nemyud_subgrad(inst, x)
    return lambda x: fwall_subgrad(inst, x)


def instance_scales(inst) -> tuple[float, float, float]:
    """(Lipschitz bound G, reference value, epsilon) for the gap report.

    The reference is the known optimum for the max-coordinate family and the
    value at the -sum v_i / sqrt(k) probe point otherwise; the probe value
    upper-bounds the optimum, so the reported gap upper-bounds nothing it
    should not.
    """
    if isinstance(inst, MaxCoordInstance):
        return 1.0, maxcoord_optimum(inst)[1], inst.epsilon
    if isinstance(inst, NemYudInstance):
        return inst.lipschitz_bound, nemyud_value(inst, nemyud_reference_point(inst)), inst.epsilon
    return inst.params.lipschitz_bound, fwall_value(inst, wall_reference_point(inst)), inst.epsilon


def evaluate(inst, x) -> float:
    if isinstance(inst, MaxCoordInstance):
        return maxcoord_value(inst, x)
    if isinstance(inst, NemYudInstance):
        return nemyud_value(inst, x)
    return fwall_value(inst, x)


def pgd_on_instance(inst, record_iterates: bool = False) -> dict:
    """PGD at the theorem schedule, normalized through the G/R rescaling."""
    G, reference, epsilon = instance_scales(inst)
    scaling = rescale_problem(G=G, R=1.0, epsilon=epsilon)
    config = GdConfig.for_accuracy(scaling.epsilon_normalized)
    trace = projected_subgradient_descent(
        scaling.wrap_oracle(first_order_oracle(inst)), config, inst.n, record_iterates=record_iterates
    )
    output = scaling.map_back(trace.averaged_output)
    gap = evaluate(inst, output) - reference
    return {
        "family": type(inst).__name__,
        "epsilon": epsilon,
        "n": inst.n,
        "lipschitz": G,
        "eta": config.eta,
        "query_count": trace.query_count,
        "reference_value": reference,
        "achieved_value": evaluate(inst, output),
        "gap": gap,
        "pass": bool(gap <= epsilon),
        "trace": trace,
        "output": output,
    }


# ---------------------------------------------------------------------------
# report files
# ---------------------------------------------------------------------------


def _write_report(config: ExperimentConfig, results, csv_rows=None, csv_header=None) -> None:
    if config.output_path is None:
        return
    payload = {
        "format": REPORT_FORMAT,
        "library_version": __version__,
        "config": dataclasses.asdict(config),
        "results": results,
    }
    if config.format == "json" or csv_rows is None:
        with open(config.output_path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    else:
        with open(config.output_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(csv_header)
            writer.writerows(csv_rows)
    with open(config.output_path + ".meta.json", "w") as fh:
        json.dump({"written_at": datetime.now(timezone.utc).isoformat()}, fh)
        fh.write("\n")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _cmd_gen(config: ExperimentConfig) -> int:
    if config.epsilon is None:
        raise ConfigError("gen requires --epsilon")
    inst = build_instance(config.family, config.epsilon, config.seed)
    doc = instance_to_json(inst)
    if config.output_path:
        with open(config.output_path, "w") as fh:
            json.dump(doc, fh)
            fh.write("\n")
    else:
        json.dump(doc, sys.stdout)
    return 0


def _cmd_gd(config: ExperimentConfig) -> int:
    if config.epsilon is None:
        raise ConfigError("gd requires --epsilon")
    inst = build_instance(config.family, config.epsilon, config.seed)
    result = pgd_on_instance(inst, record_iterates=False)
    report = {k: v for k, v in result.items() if k not in ("trace", "output")}
    rows = [[result["epsilon"], result["n"], result["query_count"], repr(result["gap"]), result["pass"]]]
    _write_report(config, report, rows, ["epsilon", "n", "query_count", "gap", "pass"])
    print(f"gd {config.family} eps={config.epsilon}: gap={result['gap']:.6g} "
          f"queries={result['query_count']} pass={result['pass']}")
    return 0 if result["pass"] else 1


def _battery(config: ExperimentConfig) -> list[dict]:
    seed = config.seed
    eps = config.epsilon if config.epsilon is not None else 0.05
    results: list[dict] = []

    def concentration():
        n = config.n if config.n is not None else 1000
        c = config.c if config.c is not None else 0.1
        trials = config.trials if config.trials is not None else 100_000
        return [estimate_concentration(n, c, trials, RngStream(seed, 101), threads=config.threads).to_dict()]

    def argmax(family: str):
        trials = config.trials if config.trials is not None else 10_000
        t = config.t if config.t is not None else 1
        base = 201 if family == "nemyud" else 202
        main = estimate_argmax_escape(eps, t, trials, RngStream(seed, base), family=family, threads=config.threads)
        stress = estimate_argmax_escape(eps, t, min(trials, 2000), RngStream(seed, base + 10),
                                        family=family, gamma_zero=True, threads=config.threads)
        k = round(1.0 / (100.0 * eps**2))
        out = [main.to_dict()]
        out.append({**stress.to_dict(), "pass": stress.empirical_probability >= 1.0 / (2 * k),
                    "detector_floor": 1.0 / (2 * k)})
        return out

    def guess():
        trials = config.trials if config.trials is not None else 10_000
        main = estimate_guess_success(eps, trials, RngStream(seed, 301), family="nemyud",
                                      candidate="best-guess", threads=config.threads)
        sanity = estimate_guess_success(eps, min(trials, 1000), RngStream(seed, 302), family="nemyud",
                                        candidate="full-knowledge", threads=config.threads)
        return [main.to_dict(),
                {**sanity.to_dict(), "lemma_id": "guess-full-knowledge",
                 "pass": sanity.empirical_probability == 1.0}]

    def disclosure():
        n = config.n if config.n is not None else 64
        trials = config.trials if config.trials is not None else 100_000
        return [disclosure_battery(n, trials, RngStream(seed, 401))]

    runners = {
        "concentration": concentration,
        "argmax-escape": lambda: argmax("nemyud"),
        "wall-argmax-escape": lambda: argmax("wall"),
        "guess": guess,
        "disclosure": disclosure,
    }
    if config.lemma is not None:
        results.extend(runners[config.lemma]())
    else:
        for name in LEMMAS:
            results.extend(runners[name]())
    return results


def _cmd_verify(config: ExperimentConfig) -> int:
    results = _battery(config)
    rows = [[r["lemma_id"], repr(r.get("empirical_probability", r.get("random_mean_new_fixes"))),
             r.get("trials", ""), repr(r.get("theoretical_bound", "")), r["pass"]] for r in results]
    _write_report(config, results, rows, ["lemma_id", "empirical", "trials", "bound", "pass"])
    failing = [r["lemma_id"] for r in results if not r["pass"]]
    for r in results:
        print(f"{r['lemma_id']}: pass={r['pass']}")
    if failing:
        print(f"FAILED: {', '.join(failing)}", file=sys.stderr)
        return 1
    return 0


def _cmd_reduce(config: ExperimentConfig) -> int:
    n = config.n if config.n is not None else 8
    results = [exhaustive_reduction_check(m) for m in range(1, n + 1)]
    rows = [[r["n"], r["pairs_checked"], r["or_mismatches"], r["learner_failures"], r["pass"]] for r in results]
    _write_report(config, results, rows, ["n", "pairs_checked", "or_mismatches", "learner_failures", "pass"])
    ok = all(r["pass"] for r in results)
    print(f"reduce: exhaustive OR semantics and learner recovery up to n={n}: pass={ok}")
    return 0 if ok else 1


def _cmd_sweep(config: ExperimentConfig) -> int:
    grid = [config.epsilon] if config.epsilon is not None else list(DEFAULT_SWEEP_GRID)

    def one(eps: float) -> dict:
        inst = build_instance(config.family, eps, config.seed)
        result = pgd_on_instance(inst)
        expected = math.ceil(1.0 / result["eta"] ** 2)
        return {
            "epsilon": eps,
            "n": result["n"],
            "query_count": result["query_count"],
            "expected_query_count": expected,
            "scaling_exact": result["query_count"] == expected,
            "gap": result["gap"],
            "pass": result["pass"] and result["query_count"] == expected,
        }

    if config.threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            results = list(pool.map(one, grid))
    else:
        results = [one(eps) for eps in grid]
    rows = [[r["epsilon"], r["n"], r["query_count"], repr(r["gap"]), r["pass"]] for r in results]
    _write_report(config, results, rows, ["epsilon", "n", "query_count", "gap", "pass"])
    for r in results:
        print(f"eps={r['epsilon']}: queries={r['query_count']} gap={r['gap']:.6g} pass={r['pass']}")
    return 0 if all(r["pass"] for r in results) else 1


def run(config: ExperimentConfig) -> int:
    return {"gen": _cmd_gen, "gd": _cmd_gd, "verify": _cmd_verify,
            "reduce": _cmd_reduce, "sweep": _cmd_sweep}[config.command](config)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subgrad-arena", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--family", choices=FAMILIES)
    parser.add_argument("--epsilon", type=float)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--trials", type=int)
    parser.add_argument("--lemma", choices=LEMMAS)
    parser.add_argument("--n", type=int)
    parser.add_argument("--c", type=float)
    parser.add_argument("--t", type=int)
    parser.add_argument("--out", dest="output_path")
    parser.add_argument("--format", choices=FORMATS)
    parser.add_argument("--config", dest="config_path")
    parser.add_argument("--threads", type=int)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    file_values: dict = {}
    if args.config_path:
        try:
            with open(args.config_path) as fh:
                file_values = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return 2
        if not isinstance(file_values, dict):
            print("config error: config file must hold a JSON object", file=sys.stderr)
            return 2
    flag_values = {
        "family": args.family, "epsilon": args.epsilon, "seed": args.seed,
        "trials": args.trials, "lemma": args.lemma, "n": args.n, "c": args.c,
        "t": args.t, "output_path": args.output_path, "format": args.format,
        "threads": args.threads if args.threads is not None else _env_threads(),
    }
    try:
        config = ExperimentConfig.from_sources(args.command, file_values, flag_values)
        return run(config)
    except ConfigError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2


def _env_threads() -> int | None:
    raw = os.environ.get("SUBGRAD_ARENA_THREADS")
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"SUBGRAD_ARENA_THREADS must be an integer, got {raw!r}")


if __name__ == "__main__":
    sys.exit(main())
