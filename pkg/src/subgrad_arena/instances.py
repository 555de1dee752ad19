"""Hard-instance families exposed as value/subgradient oracles.

Two families live here:

* max-coordinate: f_z(x) = max_i z_i * x_i over a hidden sign vector z,
  with the resisting tie-breaking that reveals a minimal prefix of z per
  subgradient query;
* nested linear max ("nemyud"): f_V(x) = max_i <v_i, x> + (k - i) * gamma * ||x||
  over a hidden orthonormal tuple V, which discloses one direction per query.

The wall-function family is in :mod:`subgrad_arena.wall`.  Oracles are pure:
identical (instance, query) pairs give bit-identical answers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .core import RngStream, as_generator, as_vector, gram_defect, sample_orthonormal_tuple

__all__ = [
    "ArgmaxDisclosure",
    "MaxCoordInstance",
    "NemYudInstance",
    "OracleAnswer",
    "PrefixDisclosure",
    "instance_from_json",
    "instance_to_json",
    "load_instance",
    "maxcoord_optimum",
    "maxcoord_params",
    "maxcoord_subgrad",
    "maxcoord_value",
    "nemyud_params",
    "nemyud_subgrad",
    "nemyud_truncated_value",
    "nemyud_value",
    "recover_z",
    "save_instance",
    "sign_pm1",
]

SERIALIZATION_FORMAT = 1


def sign_pm1(x: np.ndarray) -> np.ndarray:
    """Componentwise sign with sign(0) = +1."""
    return np.where(np.asarray(x) >= 0, 1.0, -1.0)


@dataclass(frozen=True)
class PrefixDisclosure:
    """What a max-coordinate subgradient answer reveals: the sign prefix."""

    prefix: tuple[int, ...]  # query-order indices i_1..i_j (0-based)

    @property
    def prefix_length(self) -> int:
        return len(self.prefix)


@dataclass(frozen=True)
class ArgmaxDisclosure:
    """What a nested-max subgradient answer reveals: the winning index."""

    index: int  # 0-based argmax index


@dataclass(frozen=True)
class OracleAnswer:
    value: float
    subgradient: np.ndarray
    disclosure: Any


# ---------------------------------------------------------------------------
# max-coordinate family
# ---------------------------------------------------------------------------


def maxcoord_params(epsilon: float) -> int:
    """Dimension n = floor(0.9 / epsilon^2) for a target accuracy epsilon.

    This choice guarantees epsilon < 1/sqrt(n), which is what makes an
    epsilon-optimal point pin down the hidden sign vector exactly.
    """
    if not 0 < epsilon < 0.95:
        raise ValueError("epsilon must lie in (0, 0.95)")
    # the 1e-9 nudge undoes binary representation noise (0.9/0.1^2 evaluates
    # to 89.99999999999999) so decimal epsilons hit their exact floor
    n = math.floor(0.9 / epsilon**2 + 1e-9)
    if n < 1:
        raise ValueError("epsilon too large: derived dimension is below 1")
    return n


@dataclass(frozen=True)
class MaxCoordInstance:
    """Hidden sign vector z in {-1,+1}^n with target accuracy epsilon."""

    z: np.ndarray
    epsilon: float
    seed: int | None = None

    def __post_init__(self):
        z = np.asarray(self.z, dtype=np.float64)
        if z.ndim != 1 or not np.all(np.abs(z) == 1.0):
            raise ValueError("z must be a 1-D vector of +/-1 entries")
        object.__setattr__(self, "z", z)

    @property
    def n(self) -> int:
        return self.z.shape[0]

    @classmethod
    def from_epsilon(cls, epsilon: float, rng: RngStream | np.random.Generator) -> "MaxCoordInstance":
        n = maxcoord_params(epsilon)
        gen = as_generator(rng)
        z = np.where(gen.integers(0, 2, size=n) == 1, 1.0, -1.0)
        seed = rng.seed if isinstance(rng, RngStream) else None
        return cls(z=z, epsilon=epsilon, seed=seed)


def maxcoord_value(inst: MaxCoordInstance, x) -> float:
    """f_z(x) = max_i z_i * x_i."""
    v = as_vector(x, inst.n)
    return float(np.max(inst.z * v))


def maxcoord_query_order(x: np.ndarray) -> np.ndarray:
    """Indices sorted by decreasing |x_i|, ties broken by increasing index."""
    return np.argsort(-np.abs(x), kind="stable")


def maxcoord_subgrad(inst: MaxCoordInstance, x) -> OracleAnswer:
    """Resisting subgradient oracle for the max-coordinate family.

    Walks the indices in decreasing order of |x_i| (ties by natural index)
    and stops at the first position whose query sign agrees with the hidden
    sign, falling back to the last position when none agrees.  The answer is
    the signed basis vector at the stopping index; the disclosure is the
    visited prefix, which is all the query learns about z.
    """
    v = as_vector(x, inst.n)
    order = maxcoord_query_order(v)
    signs = sign_pm1(v)
    agree = signs[order] == inst.z[order]
    hits = np.nonzero(agree)[0]
    j = int(hits[0]) if hits.size else inst.n - 1
    idx = int(order[j])
    sub = np.zeros(inst.n)
    sub[idx] = inst.z[idx]
    value = float(inst.z[idx] * v[idx])
    return OracleAnswer(value=value, subgradient=sub, disclosure=PrefixDisclosure(tuple(int(i) for i in order[: j + 1])))


def maxcoord_optimum(inst: MaxCoordInstance) -> tuple[np.ndarray, float]:
    """Minimizer x* = -z/sqrt(n) over the unit ball and its value -1/sqrt(n)."""
    n = inst.n
    return -inst.z / math.sqrt(n), -1.0 / math.sqrt(n)


def recover_z(x) -> np.ndarray:
    """Reconstruct the hidden signs from any epsilon-optimal point: z = -sign(x)."""
    return -sign_pm1(as_vector(x))


# ---------------------------------------------------------------------------
# nested linear max family
# ---------------------------------------------------------------------------


def nemyud_params(epsilon: float) -> tuple[int, float, int]:
    """Derive (k, gamma, n) from the target accuracy.

    k = round(1/(100 eps^2)), gamma = 1/(10 k^{3/2}), and n is the smallest
    power of two with 8*sqrt(ln n / n) <= gamma and n > 4k.  Logs are natural
    throughout; that only shifts constants.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    k = round(1.0 / (100.0 * epsilon**2))
    if k < 2:
        raise ValueError(f"epsilon={epsilon} too large: derived k={k} < 2")
    gamma = 1.0 / (10.0 * k**1.5)
    n = 8
    while not (8.0 * math.sqrt(math.log(n) / n) <= gamma and n > 4 * k):
        n *= 2
        if n > 2**40:
            raise ValueError("no feasible dimension below 2^40")
    return k, gamma, n


@dataclass(frozen=True)
class NemYudInstance:
    """Hidden orthonormal tuple V (rows of a (k, n) array) with scale gamma.

    ``from_epsilon`` enforces the accuracy-derived parameter relations;
    the direct constructor accepts relaxed (toy) parameters for tests and
    demos, where only orthonormality is checked.
    """

    V: np.ndarray
    gamma: float
    epsilon: float
    seed: int | None = None

    def __post_init__(self):
        V = np.asarray(self.V, dtype=np.float64)
        if V.ndim != 2:
            raise ValueError("V must be a (k, n) array")
        if gram_defect(V) > 1e-8:
            raise ValueError("V rows must be orthonormal")
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        object.__setattr__(self, "V", V)

    @property
    def k(self) -> int:
        return self.V.shape[0]

    @property
    def n(self) -> int:
        return self.V.shape[1]

    @property
    def lipschitz_bound(self) -> float:
        return 1.0 + self.k * self.gamma

    @classmethod
    def from_epsilon(cls, epsilon: float, rng: RngStream | np.random.Generator) -> "NemYudInstance":
        k, gamma, n = nemyud_params(epsilon)
        V = sample_orthonormal_tuple(n, k, rng)
        seed = rng.seed if isinstance(rng, RngStream) else None
        return cls(V=V, gamma=gamma, epsilon=epsilon, seed=seed)


def _nemyud_terms(inst: NemYudInstance, v: np.ndarray) -> np.ndarray:
    """All k competitors <v_i, x> + (k - i) * gamma * ||x|| (i is 1-based)."""
    overlaps = inst.V @ v
    ranks = np.arange(inst.k - 1, -1, -1, dtype=np.float64)  # k - i
    return overlaps + ranks * inst.gamma * np.linalg.norm(v)


def nemyud_value(inst: NemYudInstance, x) -> float:
    v = as_vector(x, inst.n)
    return float(np.max(_nemyud_terms(inst, v)))


def nemyud_truncated_value(inst: NemYudInstance, x, t: int) -> float:
    """Max over the first t competitors only; t = k recovers the full value."""
    if not 1 <= t <= inst.k:
        raise ValueError(f"t must lie in [1, {inst.k}]")
    v = as_vector(x, inst.n)
    return float(np.max(_nemyud_terms(inst, v)[:t]))


def nemyud_subgrad(inst: NemYudInstance, x) -> OracleAnswer:
    """Subgradient v_i* + (k - i*) * gamma * x/||x||, smallest argmax i*.

    At the origin every competitor ties; the oracle answers with the first
    direction and the canonical u = 0 member of the norm's subdifferential.
    """
    v = as_vector(x, inst.n)
    terms = _nemyud_terms(inst, v)
    i_star = int(np.argmax(terms))  # argmax returns the smallest tied index
    norm = float(np.linalg.norm(v))
    sub = inst.V[i_star].copy()
    if norm > 0:
        sub += (inst.k - 1 - i_star) * inst.gamma * (v / norm)
    return OracleAnswer(value=float(terms[i_star]), subgradient=sub, disclosure=ArgmaxDisclosure(i_star))


def nemyud_reference_point(inst: NemYudInstance) -> np.ndarray:
    """The near-minimizer -sum_i v_i / sqrt(k); its value is <= -9 epsilon."""
    return -np.sum(inst.V, axis=0) / math.sqrt(inst.k)


# ---------------------------------------------------------------------------
# serialization (family tag + hidden parameters, schema "format": 1)
# ---------------------------------------------------------------------------


def instance_to_json(inst) -> dict:
    from . import wall  # local import to avoid a cycle

    doc: dict[str, Any] = {"format": SERIALIZATION_FORMAT, "epsilon": inst.epsilon, "seed": inst.seed}
    if isinstance(inst, MaxCoordInstance):
        doc.update(family="maxcoord", n=inst.n, z=[int(s) for s in inst.z])
    elif isinstance(inst, NemYudInstance):
        doc.update(family="nemyud", n=inst.n, k=inst.k, gamma=inst.gamma, V=inst.V.tolist())
    elif isinstance(inst, wall.WallInstance):
        p = inst.params
        doc.update(
            family="wall", n=p.n, k=p.k, gamma=p.gamma, delta=p.delta,
            alpha=p.alpha, beta=p.beta, V=inst.V.tolist(),
        )
    else:
        raise TypeError(f"cannot serialize {type(inst).__name__}")
    return doc


def instance_from_json(doc: dict):
    from . import wall

    if doc.get("format") != SERIALIZATION_FORMAT:
        raise ValueError(f"unsupported serialization format: {doc.get('format')!r}")
    family = doc["family"]
    if family == "maxcoord":
        return MaxCoordInstance(z=np.asarray(doc["z"], dtype=np.float64), epsilon=doc["epsilon"], seed=doc.get("seed"))
    if family == "nemyud":
        return NemYudInstance(V=np.asarray(doc["V"]), gamma=doc["gamma"], epsilon=doc["epsilon"], seed=doc.get("seed"))
    if family == "wall":
        params = wall.WallParams(
            k=doc["k"], n=doc["n"], delta=doc["delta"], gamma=doc["gamma"],
            alpha=doc["alpha"], beta=doc["beta"], epsilon=doc["epsilon"],
        )
        return wall.WallInstance(V=np.asarray(doc["V"]), params=params, seed=doc.get("seed"))
    raise ValueError(f"unknown family: {family!r}")


def save_instance(inst, path) -> None:
    with open(path, "w") as fh:
        json.dump(instance_to_json(inst), fh)


def load_instance(path):
    with open(path) as fh:
        return instance_from_json(json.load(fh))
