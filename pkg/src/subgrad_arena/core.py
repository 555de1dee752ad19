"""Deterministic numerical primitives shared by every oracle and estimator.

Vectors are plain float64 numpy arrays.  Randomness flows through
:class:`RngStream`, a (seed, stream_id) pair backed by the counter-based
Philox generator, so that independent Monte Carlo blocks are reproducible
regardless of thread scheduling or execution order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "RngStream",
    "as_vector",
    "gram_defect",
    "project_ball",
    "sample_orthonormal_tuple",
    "sample_unit_vector",
]

_MASK64 = (1 << 64) - 1

# Orthonormality tolerance promised by sample_orthonormal_tuple.
ORTHONORMALITY_TOL = 1e-10


@dataclass(frozen=True)
class RngStream:
    """A reproducible random stream identified by (seed, stream_id).

    Identical (seed, stream_id) pairs yield identical sample sequences on
    every platform; distinct stream ids give statistically independent
    streams sharing one seed, which is how parallel trial blocks stay
    deterministic.
    """

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed & _MASK64, self.stream_id & _MASK64], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def substream(self, stream_id: int) -> "RngStream":
        return RngStream(self.seed, stream_id)


def as_generator(rng: RngStream | np.random.Generator) -> np.random.Generator:
    """Accept either an RngStream or a ready generator."""
    if isinstance(rng, RngStream):
        return rng.generator()
    return rng


def as_vector(x, dim: int | None = None) -> np.ndarray:
    """Validate and return ``x`` as a finite 1-D float64 array."""
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"invalid vector: expected 1-D array, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("invalid vector: entries must be finite")
    if dim is not None and v.shape[0] != dim:
        raise ValueError(f"dimension mismatch: expected {dim}, got {v.shape[0]}")
    return v


def project_ball(y, radius: float) -> np.ndarray:
    """Euclidean projection of ``y`` onto the ball of the given radius.

    Returns ``y`` unchanged when it is already inside, else rescales it onto
    the sphere.  The result is re-checked so that its stored norm never
    exceeds ``radius``, making the projection exactly idempotent in floating
    point.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    v = as_vector(y)
    out = v.copy()
    # A single rescale can overshoot by one ulp; repeat until the norm check
    # passes so project_ball(project_ball(y)) == project_ball(y) bit for bit.
    for _ in range(4):
        norm = float(np.linalg.norm(out))
        if norm <= radius:
            break
        out *= radius / norm
    return out


def sample_unit_vector(n: int, rng: RngStream | np.random.Generator) -> np.ndarray:
    """Haar-random unit vector in R^n (normalized i.i.d. Gaussian draw)."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    gen = as_generator(rng)
    while True:
        g = gen.standard_normal(n)
        norm = np.linalg.norm(g)
        if norm > 0:
            return g / norm


def sample_orthonormal_tuple(n: int, k: int, rng: RngStream | np.random.Generator) -> np.ndarray:
    """Sample k orthonormal vectors in R^n, rows of the returned (k, n) array.

    Row i is Haar-distributed on the unit sphere of the orthogonal complement
    of rows 0..i-1: each row starts from an independent Gaussian vector and is
    orthogonalized by modified Gram-Schmidt with one re-orthogonalization
    pass, which keeps the pairwise inner products below 1e-10 even for n in
    the millions.
    """
    if k < 1 or n < 1:
        raise ValueError("n and k must be positive integers")
    if k > n:
        raise ValueError("tuple too large: k must not exceed n")
    gen = as_generator(rng)
    basis = np.empty((k, n), dtype=np.float64)
    for i in range(k):
        while True:
            v = gen.standard_normal(n)
            for _ in range(2):  # MGS + one re-orthogonalization pass
                for j in range(i):
                    v -= (basis[j] @ v) * basis[j]
            norm = np.linalg.norm(v)
            if norm > 1e-12:
                basis[i] = v / norm
                break
    return basis


def gram_defect(vectors: np.ndarray) -> float:
    """Max absolute deviation of the Gram matrix from the identity."""
    v = np.asarray(vectors, dtype=np.float64)
    gram = v @ v.T
    return float(np.max(np.abs(gram - np.eye(v.shape[0]))))
