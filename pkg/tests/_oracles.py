"""Independent brute-force oracles used to cross-check the evaluators.

Nothing in here calls the library's water-filling or golden-section code;
values come from direct enumeration of candidate points and the raw
defining formulas.
"""

from __future__ import annotations

import numpy as np


def sphere_box_grid_max(a, rho: float, c: float, bound: float, grid: int = 1000) -> float:
    """Grid maximum of sum y_i a_i + y_perp*rho over the k=2 sphere-box slice.

    Enumerates (y_1, y_2) over the inclusive box grid with
    y_perp = sqrt(c^2 - y_1^2 - y_2^2) >= 0, plus a dense angular grid on the
    y_perp = 0 ring, covering boundary maximizers that the surface grid
    misses.  Points violating |y_i| <= bound*c are rejected.
    """
    a = np.asarray(a, dtype=float)
    assert a.shape == (2,)
    lim = bound * c
    g = np.linspace(-lim, lim, grid)
    y1, y2 = np.meshgrid(g, g, indexing="ij")
    keep = y1**2 + y2**2 <= c**2
    y1, y2 = y1[keep], y2[keep]
    yp = np.sqrt(np.maximum(c**2 - y1**2 - y2**2, 0.0))
    best = float(np.max(a[0] * y1 + a[1] * y2 + rho * yp)) if y1.size else -np.inf

    theta = np.linspace(0.0, 2.0 * np.pi, 200_000)
    r1, r2 = c * np.cos(theta), c * np.sin(theta)
    ring = (np.abs(r1) <= lim + 1e-15) & (np.abs(r2) <= lim + 1e-15)
    if np.any(ring):
        best = max(best, float(np.max(a[0] * r1[ring] + a[1] * r2[ring])))
    # fully clipped candidate (the only feasible-by-filler point when the
    # sphere cannot be reached inside these coordinates)
    if rho == 0.0 and 2.0 * lim * lim < c * c:
        best = max(best, float(np.abs(a).sum() * lim))
    return best


class RadialEnvelope:
    """Exact max over a dense radius grid of the wall plane values.

    Per direction u the candidate planes contribute A(r) + B(r) * <u, x> with
    A(r) = -2*alpha*r^(1+alpha) and B(r) = 2*(1+alpha)*r^alpha; over a fixed
    radius grid this is the upper envelope of lines with strictly increasing
    slopes, queried in O(log grid) after one hull pass.
    """

    def __init__(self, delta: float, alpha: float, radii: int = 16384):
        r = np.linspace(delta, 1.0, radii)
        A = -2.0 * alpha * r ** (1.0 + alpha)
        B = 2.0 * (1.0 + alpha) * r**alpha
        hull_a: list[float] = [A[0]]
        hull_b: list[float] = [B[0]]
        for a_i, b_i in zip(A[1:], B[1:]):
            while len(hull_a) >= 2:
                x_last = (hull_a[-2] - hull_a[-1]) / (hull_b[-1] - hull_b[-2])
                x_new = (hull_a[-1] - a_i) / (b_i - hull_b[-1])
                if x_new <= x_last:
                    hull_a.pop()
                    hull_b.pop()
                else:
                    break
            hull_a.append(float(a_i))
            hull_b.append(float(b_i))
        self.hull_a = np.asarray(hull_a)
        self.hull_b = np.asarray(hull_b)
        self.breaks = (self.hull_a[:-1] - self.hull_a[1:]) / (self.hull_b[1:] - self.hull_b[:-1])

    def __call__(self, q: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.breaks, q)
        return self.hull_a[idx] + self.hull_b[idx] * q


class WallBruteForce:
    """Brute-force wall values for an n = 3, k = 2 instance.

    Candidate anchors y in Omega come from (a) ``rejection_samples`` random
    proposals over the cone-free direction box times the radius interval,
    rejecting anything outside Omega, and (b) a deterministic inclusive grid
    over the same direction box whose radial profile is maximized exactly on
    a dense radius grid.  The grid pins the box-corner maximizers that
    uniform sampling approaches only at rate 1/sqrt(samples).  Sampled
    candidates are drawn once and reused for every query.
    """

    def __init__(self, inst, rng: np.random.Generator, rejection_samples: int = 1_000_000,
                 direction_grid: int = 1000):
        params = inst.params
        assert inst.n == 3 and inst.k == 2
        beta, delta, self.alpha = params.beta, params.delta, params.alpha
        v3 = np.cross(inst.V[0], inst.V[1])
        v3 /= np.linalg.norm(v3)
        self.frame = np.stack([inst.V[0], inst.V[1], v3])

        # (a) rejection-sampled points of Omega
        u1 = rng.uniform(-beta, beta, rejection_samples)
        u2 = rng.uniform(-beta, beta, rejection_samples)
        sign = np.where(rng.integers(0, 2, rejection_samples) == 1, 1.0, -1.0)
        keep = u1**2 + u2**2 < 1.0  # cone-freeness holds by construction
        u1, u2, sign = u1[keep], u2[keep], sign[keep]
        u3 = sign * np.sqrt(1.0 - u1**2 - u2**2)
        self.sample_dirs = np.stack([u1, u2, u3], axis=1)
        self.sample_r = rng.uniform(delta, 1.0, u1.size)
        self.sample_A = -2.0 * self.alpha * self.sample_r ** (1.0 + self.alpha)
        self.sample_B = 2.0 * (1.0 + self.alpha) * self.sample_r**self.alpha

        # (b) inclusive direction grid plus exact radial-grid maximization
        g = np.linspace(-beta, beta, direction_grid)
        g1, g2 = np.meshgrid(g, g, indexing="ij")
        keep = g1**2 + g2**2 < 1.0
        g1, g2 = g1[keep], g2[keep]
        g3 = np.sqrt(1.0 - g1**2 - g2**2)
        self.grid_dirs = np.concatenate([
            np.stack([g1, g2, g3], axis=1),
            np.stack([g1, g2, -g3], axis=1),
        ])
        self.envelope = RadialEnvelope(delta, self.alpha)

    def __call__(self, x) -> float:
        xa = self.frame @ x
        q = self.sample_dirs @ xa
        best = float(np.max(self.sample_A + self.sample_B * q))
        q = self.grid_dirs @ xa
        return max(best, float(np.max(self.envelope(q))))


def wall_bruteforce(inst, x, rng: np.random.Generator, rejection_samples: int = 1_000_000,
                    direction_grid: int = 1000) -> float:
    return WallBruteForce(inst, rng, rejection_samples, direction_grid)(x)
