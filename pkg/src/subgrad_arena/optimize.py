"""Projected subgradient descent and the G/R normalization wrapper.

The solver follows the textbook recursion x_{t+1} = P_K(x_t - eta * g_{x_t})
on the Euclidean ball, starting from the origin and returning the average of
the first T iterates.  With a 1-Lipschitz objective, radius 1, step size
eta = epsilon and T >= 1/epsilon^2 the averaged output is epsilon-optimal;
problems with other Lipschitz constants or radii are reduced to that case by
:func:`rescale_problem`.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import project_ball
from .instances import OracleAnswer

__all__ = ["GdConfig", "GdTrace", "ProblemRescaling", "projected_subgradient_descent", "rescale_problem", "trace_to_csv"]

Oracle = Callable[[np.ndarray], "OracleAnswer | tuple[float, np.ndarray]"]


@dataclass(frozen=True)
class GdConfig:
    eta: float  # step size
    T: int  # iteration / query count
    R: float = 1.0  # ball radius

    def __post_init__(self):
        if self.eta <= 0:
            raise ValueError("eta must be positive")
        if self.T < 1:
            raise ValueError("T must be at least 1")
        if self.R <= 0:
            raise ValueError("R must be positive")

    @classmethod
    def for_accuracy(cls, epsilon: float, radius: float = 1.0) -> "GdConfig":
        """eta = epsilon, T = ceil(1/epsilon^2): the theorem's schedule."""
        if epsilon <= 0:
            raise ValueError("epsilon must be positive")
        return cls(eta=epsilon, T=int(np.ceil(1.0 / epsilon**2)), R=radius)


@dataclass
class GdTrace:
    averaged_output: np.ndarray
    query_count: int
    values: np.ndarray  # f(x_t) for t = 0..T-1
    iterates: np.ndarray | None = None  # (T, n), omitted in streaming mode


def _ask(oracle: Oracle, x: np.ndarray, t: int) -> tuple[float, np.ndarray]:
    try:
        answer = oracle(x)
    except Exception as exc:
        raise RuntimeError(f"oracle failed at iteration {t}") from exc
    if isinstance(answer, OracleAnswer):
        value, sub = answer.value, answer.subgradient
    else:
        value, sub = answer
    sub = np.asarray(sub, dtype=np.float64)
    if not (np.isfinite(value) and np.all(np.isfinite(sub))):
        raise RuntimeError(f"oracle returned a non-finite answer at iteration {t}")
    return float(value), sub


def projected_subgradient_descent(
    oracle: Oracle,
    config: GdConfig,
    dim: int,
    record_iterates: bool = True,
) -> GdTrace:
    """Run exactly T projected subgradient steps from the origin.

    The oracle is queried once per iterate (value and subgradient together)
    and the averaged output is the arithmetic mean of x_0 .. x_{T-1}.  With
    ``record_iterates=False`` only the running average is stored, for sweeps
    where the full (T, n) trace would be wasteful.
    """
    x = np.zeros(dim)
    running_sum = np.zeros(dim)
    values = np.empty(config.T)
    iterates = np.empty((config.T, dim)) if record_iterates else None
    for t in range(config.T):
        if iterates is not None:
            iterates[t] = x
        running_sum += x
        value, sub = _ask(oracle, x, t)
        values[t] = value
        x = project_ball(x - config.eta * sub, config.R)
    return GdTrace(
        averaged_output=running_sum / config.T,
        query_count=config.T,
        values=values,
        iterates=iterates,
    )


@dataclass(frozen=True)
class ProblemRescaling:
    """Maps a (G, R)-problem to the normalized G = R = 1 problem.

    The wrapped oracle evaluates the original one at R*x and divides values
    by G*R and subgradients by G; the normalized accuracy is epsilon/(G*R)
    and ``map_back`` returns outputs to the original coordinates.
    """

    G: float
    R: float
    epsilon: float

    def __post_init__(self):
        if min(self.G, self.R, self.epsilon) <= 0:
            raise ValueError("G, R and epsilon must be positive")

    @property
    def epsilon_normalized(self) -> float:
        return self.epsilon / (self.G * self.R)

    def wrap_oracle(self, oracle: Oracle) -> Oracle:
        def wrapped(x: np.ndarray) -> tuple[float, np.ndarray]:
            value, sub = _ask(oracle, self.R * np.asarray(x, dtype=np.float64), -1)
            return value / (self.G * self.R), sub / self.G

        return wrapped

    def map_back(self, x: np.ndarray) -> np.ndarray:
        return self.R * np.asarray(x, dtype=np.float64)


def rescale_problem(G: float, R: float, epsilon: float) -> ProblemRescaling:
    return ProblemRescaling(G=G, R=R, epsilon=epsilon)


def trace_to_csv(trace: GdTrace, path, optimum_value: float | None = None) -> None:
    """Write per-step rows: t, f(x_t), gap-if-known, ||x_t||."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "f_x_t", "gap", "norm_x_t"])
        for t in range(trace.query_count):
            gap = "" if optimum_value is None else repr(trace.values[t] - optimum_value)
            norm = "" if trace.iterates is None else repr(float(np.linalg.norm(trace.iterates[t])))
            writer.writerow([t, repr(float(trace.values[t])), gap, norm])
