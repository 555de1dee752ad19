"""The wall-function instance family.

The construction masks a hidden orthonormal tuple V behind two surfaces:

* the informative part p_V(x) = max_i { <v_i, x> - i*gamma }, and
* the wall W_V(x) = max over y in Omega of h(y) + <grad h(y), x - y> with
  h(y) = 2*||y||^(1+alpha), where Omega is the annulus delta <= ||y|| <= 1
  with the correlation cones |<v_i, y>| >= beta*||y|| carved out.

The oracle serves f_V = max{p_V, W_V}.  Evaluating W_V is a nested
constrained maximization; substituting the gradient of h turns each plane
value into

    -2*alpha*c^(1+alpha) + 2*(1+alpha)*c^(alpha-1) * <y, x>,   c = ||y||,

so for fixed c the problem is a linear maximization over a sphere slice of a
box, solved by clipped water-filling with a bisected scale multiplier, and
the outer problem is one-dimensional in c.  Both the box and the sphere of
the inner problem scale linearly with c, so one inner solve per query
suffices.

Every evaluator works in the coordinates a_i = <v_i, x> plus the residual
norm, and accepts batches; the ``*_from_coords`` forms let Monte Carlo
estimators run at dimensions in the millions without materializing vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import RngStream, as_vector, gram_defect, sample_orthonormal_tuple
from .instances import OracleAnswer

__all__ = [
    "InnerMaxResult",
    "WallDisclosure",
    "WallInstance",
    "WallParams",
    "fwall_subgrad",
    "fwall_subgrads",
    "fwall_truncated",
    "fwall_value",
    "in_cone",
    "inner_max_sphere_box",
    "p_truncated",
    "p_value",
    "wall_params",
    "wall_value",
    "wall_value_truncated",
]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


# ---------------------------------------------------------------------------
# parameters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WallParams:
    """Scales of one wall instance: dimensions, annulus, cone width.

    ``from_epsilon`` derives everything from the target accuracy and
    validates the required inequalities; ``toy`` builds small hand-picked
    parameter sets for brute-force comparisons and property suites, where
    only alpha is still forced to satisfy delta^alpha = 1/2.
    """

    k: int
    n: int
    delta: float
    gamma: float
    alpha: float
    beta: float
    epsilon: float

    def __post_init__(self):
        if self.k < 1 or self.n < self.k + 1:
            raise ValueError("need k >= 1 and n >= k + 1")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if min(self.gamma, self.alpha, self.beta, self.epsilon) <= 0:
            raise ValueError("gamma, alpha, beta, epsilon must be positive")
        if abs(self.delta**self.alpha - 0.5) > 1e-9:
            raise ValueError("alpha must satisfy delta^alpha = 1/2")

    @property
    def lipschitz_bound(self) -> float:
        # the wall's planes have gradient norm 2*(1+alpha)*||y||^alpha <= 2*(1+alpha)
        return max(1.0, 2.0 * (1.0 + self.alpha))

    @classmethod
    def from_epsilon(cls, epsilon: float, c_const: float = 1e4) -> "WallParams":
        """Derive (k, n, delta, gamma, alpha, beta) from epsilon.

        k = round(1/(100 eps^2)); n is the smallest power of two at least
        c_const * k^2 * ln k for which delta/ln(1/delta) = 32*sqrt(k ln n/n)
        + 1/sqrt(k) has a root in (0, 1/2], k*gamma <= 1/(10 sqrt(k)) and
        n > 4k.  delta comes from bisecting the strictly increasing map
        delta -> delta/ln(1/delta); gamma = 8*delta*sqrt(ln n/n) and alpha
        solves delta^alpha = 1/2.
        """
        if epsilon <= 0:
            raise ValueError("epsilon must be positive")
        k = round(1.0 / (100.0 * epsilon**2))
        if k < 2:
            raise ValueError(f"epsilon={epsilon} out of supported range: derived k={k} < 2")
        n = 2 ** math.ceil(math.log2(max(c_const * k * k * math.log(k), 4 * k + 1, 8)))
        while True:
            if n > 2**40:
                raise ValueError("epsilon out of supported range: no feasible dimension")
            rhs = 32.0 * math.sqrt(k * math.log(n) / n) + 1.0 / math.sqrt(k)
            if rhs <= 0.5 / math.log(2.0) and n > 4 * k:  # solvable iff rhs <= g(1/2)
                delta = _bisect_delta(rhs)
                gamma = 8.0 * delta * math.sqrt(math.log(n) / n)
                if k * gamma <= 1.0 / (10.0 * math.sqrt(k)):
                    break
            n *= 2
        alpha = math.log(2.0) / math.log(1.0 / delta)
        beta = 8.0 * math.sqrt(math.log(n) / n)
        return cls(k=k, n=n, delta=delta, gamma=gamma, alpha=alpha, beta=beta, epsilon=epsilon)

    @classmethod
    def toy(cls, k: int, n: int, delta: float, beta: float, gamma: float,
            epsilon: float | None = None) -> "WallParams":
        alpha = math.log(2.0) / math.log(1.0 / delta)
        if epsilon is None:
            epsilon = 1.0 / (10.0 * math.sqrt(k))
        return cls(k=k, n=n, delta=delta, gamma=gamma, alpha=alpha, beta=beta, epsilon=epsilon)


def _bisect_delta(rhs: float) -> float:
    # root of delta/ln(1/delta) = rhs on (0, 1/2]; the map is strictly increasing
    lo, hi = 1e-300, 0.5
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid / math.log(1.0 / mid) < rhs:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def wall_params(epsilon: float) -> WallParams:
    return WallParams.from_epsilon(epsilon)


@dataclass(frozen=True)
class WallInstance:
    V: np.ndarray
    params: WallParams
    seed: int | None = None

    def __post_init__(self):
        V = np.asarray(self.V, dtype=np.float64)
        if V.shape != (self.params.k, self.params.n):
            raise ValueError(f"V must have shape ({self.params.k}, {self.params.n})")
        if gram_defect(V) > 1e-8:
            raise ValueError("V rows must be orthonormal")
        object.__setattr__(self, "V", V)

    @property
    def k(self) -> int:
        return self.params.k

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def epsilon(self) -> float:
        return self.params.epsilon

    @classmethod
    def from_epsilon(cls, epsilon: float, rng: RngStream | np.random.Generator) -> "WallInstance":
        params = WallParams.from_epsilon(epsilon)
        V = sample_orthonormal_tuple(params.n, params.k, rng)
        seed = rng.seed if isinstance(rng, RngStream) else None
        return cls(V=V, params=params, seed=seed)

    @classmethod
    def toy(cls, params: WallParams, rng: RngStream | np.random.Generator) -> "WallInstance":
        V = sample_orthonormal_tuple(params.n, params.k, rng)
        seed = rng.seed if isinstance(rng, RngStream) else None
        return cls(V=V, params=params, seed=seed)


def wall_reference_point(inst: WallInstance) -> np.ndarray:
    """The probe point -sum_i v_i / sqrt(k)."""
    return -np.sum(inst.V, axis=0) / math.sqrt(inst.k)


# ---------------------------------------------------------------------------
# inner maximization: linear objective over a sphere slice of a box
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InnerMaxResult:
    """Solution of one constrained linear maximization.

    From :func:`inner_max_sphere_box` the maximizer holds the k box
    coordinates followed by the residual coordinate; from the wall-level
    argmax helpers it is the full-dimensional point y in Omega.
    """

    maximizer: np.ndarray
    value: float
    multiplier: float
    clipped: tuple[int, ...]
    reached: bool  # False on the boundary-infeasible (fully clipped) branch


def _inner_max_batch(A: np.ndarray, rho: np.ndarray, bound: float, c: np.ndarray | float):
    """Batched clipped water-filling.

    Maximizes sum_i y_i a_i + y_perp * rho over sum y_i^2 + y_perp^2 = c^2
    with |y_i| <= bound and y_perp >= 0; `bound` is the absolute box limit at
    the solved radius.  Rows of A are coordinate vectors; rho and c
    broadcast.  Returns (value, y, y_perp, lam, reached).
    """
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    B = A.shape[0]
    rho = np.broadcast_to(np.asarray(rho, dtype=np.float64), (B,)).astype(np.float64)
    c = np.broadcast_to(np.asarray(c, dtype=np.float64), (B,)).astype(np.float64)
    absA = np.abs(A)
    nonzero = absA > 0.0
    # norm attainable as lam -> inf: every nonzero coordinate clips at `bound`
    clip_norm_sq = bound * bound * nonzero.sum(axis=1) + np.where(rho > 0, np.inf, 0.0)
    reached = clip_norm_sq >= c * c

    with np.errstate(divide="ignore", invalid="ignore"):
        min_nonzero = np.min(np.where(nonzero, absA, np.inf), axis=1)
        hi_clip = np.where(np.isfinite(min_nonzero), bound / min_nonzero, 0.0)
        hi_rho = np.where(rho > 0, c / np.maximum(rho, 1e-300), 0.0)
    lam_hi = np.where(rho > 0, hi_rho, hi_clip)
    lam_hi = np.where(reached, lam_hi, 0.0)

    lo = np.zeros(B)
    hi = np.maximum(lam_hi, 1e-300)
    target = c * c
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        y = np.minimum(mid[:, None] * absA, bound)
        norm_sq = np.einsum("ij,ij->i", y, y) + (mid * rho) ** 2
        too_small = norm_sq < target
        lo = np.where(too_small, mid, lo)
        hi = np.where(too_small, hi, mid)
    lam = 0.5 * (lo + hi)
    lam_finite = np.where(reached, lam, 0.0)
    lam = np.where(reached, lam, np.inf)

    y_mag = np.where(reached[:, None], np.minimum(lam_finite[:, None] * absA, bound), np.where(nonzero, bound, 0.0))
    y_perp = np.where(reached, lam_finite * rho, 0.0)
    # degenerate all-zero input: any feasible point works and the value is 0
    degenerate = (~nonzero.any(axis=1)) & (rho == 0.0)
    y_mag = np.where(degenerate[:, None], 0.0, y_mag)
    y_perp = np.where(degenerate, 0.0, y_perp)
    value = np.einsum("ij,ij->i", y_mag, absA) + y_perp * rho
    return value, np.sign(A) * y_mag, y_perp, lam, reached


def inner_max_sphere_box(a, rho: float, c: float, bound: float) -> InnerMaxResult:
    """Maximize sum_i y_i a_i + y_perp*rho over the sphere slice of a box.

    Constraints: sum_i y_i^2 + y_perp^2 = c^2, |y_i| <= bound*c, y_perp >= 0.
    The maximizer is the clipped scaling y_i = sign(a_i)*min(lam*|a_i|,
    bound*c), y_perp = lam*rho with lam >= 0 bisected so the norm equals c.
    When rho = 0 and every coordinate clips before the norm reaches c the
    problem is boundary-infeasible on these coordinates alone; the fully
    clipped point is returned with ``reached=False`` and the value evaluated
    there (in the wall's ambient space the missing norm sits in directions
    orthogonal to everything, which leave the value unchanged).
    """
    a = as_vector(a)
    if not (np.isfinite(rho) and np.isfinite(c) and np.isfinite(bound)):
        raise ValueError("non-finite inner-max inputs")
    if rho < 0 or c <= 0 or bound <= 0:
        raise ValueError("need rho >= 0, c > 0, bound > 0")
    value, y, y_perp, lam, reached = _inner_max_batch(a[None, :], rho, bound * c, c)
    maximizer = np.concatenate([y[0], [y_perp[0]]])
    clipped = tuple(int(i) for i in np.nonzero(np.abs(np.abs(y[0]) - bound * c) <= 1e-12 * max(1.0, bound * c))[0] if a[i] != 0)
    return InnerMaxResult(
        maximizer=maximizer,
        value=float(value[0]),
        multiplier=float(lam[0]) if np.isfinite(lam[0]) else math.inf,
        clipped=clipped,
        reached=bool(reached[0]),
    )


# ---------------------------------------------------------------------------
# coordinate-space evaluators (batched; used directly by the estimators)
# ---------------------------------------------------------------------------


def p_values_from_coords(params: WallParams, A: np.ndarray) -> np.ndarray:
    """p_V = max_i { a_i - i*gamma } with i counted from 1."""
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    penalties = params.gamma * np.arange(1, A.shape[1] + 1)
    return np.max(A - penalties, axis=1)


def _plane_values(params: WallParams, c: np.ndarray, Q: np.ndarray) -> np.ndarray:
    # plane value at anchor radius c when the inner max at radius 1 is Q:
    # -2*alpha*c^(1+alpha) + 2*(1+alpha)*c^(alpha-1) * (c*Q)
    al = params.alpha
    return -2.0 * al * c ** (1.0 + al) + 2.0 * (1.0 + al) * c**al * Q


def _outer_max_c(params: WallParams, Q: np.ndarray, grid_points: int = 256, golden_iters: int = 60):
    """Maximize the radial profile -2a c^(1+a) + 2(1+a) c^a Q over [delta, 1].

    Log-spaced grid then golden-section refinement of the bracketing
    interval; the best evaluated point (grid endpoints included) is
    returned, so boundary maxima are exact.
    """
    Q = np.asarray(Q, dtype=np.float64)
    grid = np.geomspace(params.delta, 1.0, grid_points)
    grid[0], grid[-1] = params.delta, 1.0
    vals = _plane_values(params, grid[:, None], Q[None, :])  # (grid, B)
    best_idx = np.argmax(vals, axis=0)
    best_val = vals[best_idx, np.arange(Q.shape[0])]
    best_c = grid[best_idx]

    lo = grid[np.maximum(best_idx - 1, 0)]
    hi = grid[np.minimum(best_idx + 1, grid_points - 1)]
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1 = _plane_values(params, x1, Q)
    f2 = _plane_values(params, x2, Q)
    for _ in range(golden_iters):
        take1 = f1 >= f2
        hi = np.where(take1, x2, hi)
        lo = np.where(take1, lo, x1)
        x1 = hi - _GOLDEN * (hi - lo)
        x2 = lo + _GOLDEN * (hi - lo)
        f1 = _plane_values(params, x1, Q)
        f2 = _plane_values(params, x2, Q)
        better1 = f1 > best_val
        best_val = np.where(better1, f1, best_val)
        best_c = np.where(better1, x1, best_c)
        better2 = f2 > best_val
        best_val = np.where(better2, f2, best_val)
        best_c = np.where(better2, x2, best_c)
    return best_c, best_val


def wall_values_from_coords(params: WallParams, A: np.ndarray, rho) -> np.ndarray:
    """W_V from the overlap coordinates and the off-span residual norm."""
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    inner, _, _, _, _ = _inner_max_batch(A, rho, params.beta, 1.0)
    _, vals = _outer_max_c(params, inner)
    return vals


def wall_truncated_from_coords(params: WallParams, A_t: np.ndarray, znorm) -> np.ndarray:
    """Truncated wall value from the first t overlaps and ||z||.

    Maximizes, over the in-span fraction s of the plane anchor's norm, the
    concave profile m(s) + sqrt(1-s^2)*||z|| where m is the in-span inner
    maximization, then applies the same radial profile as the full wall; the
    anchor's in-span norm cannot exceed beta*sqrt(t), which caps s.
    """
    A_t = np.atleast_2d(np.asarray(A_t, dtype=np.float64))
    B, t = A_t.shape
    znorm = np.broadcast_to(np.asarray(znorm, dtype=np.float64), (B,))
    s_max = min(1.0, params.beta * math.sqrt(t))

    def psi_stack(S: np.ndarray) -> np.ndarray:
        # evaluate psi at several s values per lane with one inner solve;
        # S has shape (m, B) and the result matches it
        m_pts = S.shape[0]
        A_rep = np.tile(A_t, (m_pts, 1))
        vals, _, _, _, _ = _inner_max_batch(A_rep, 0.0, params.beta, S.reshape(-1))
        m_vals = vals.reshape(m_pts, B)
        return m_vals + np.sqrt(np.maximum(1.0 - S * S, 0.0)) * znorm[None, :]

    grid = np.linspace(0.0, s_max, 65)
    vals = psi_stack(np.broadcast_to(grid[:, None], (65, B)))
    best_idx = np.argmax(vals, axis=0)
    best_val = vals[best_idx, np.arange(B)]
    lo = grid[np.maximum(best_idx - 1, 0)]
    hi = grid[np.minimum(best_idx + 1, len(grid) - 1)]
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = psi_stack(np.stack([x1, x2]))
    for _ in range(48):
        take1 = f1 >= f2
        hi = np.where(take1, x2, hi)
        lo = np.where(take1, lo, x1)
        x1 = hi - _GOLDEN * (hi - lo)
        x2 = lo + _GOLDEN * (hi - lo)
        f1, f2 = psi_stack(np.stack([x1, x2]))
        best_val = np.maximum.reduce([best_val, f1, f2])
    _, out = _outer_max_c(params, best_val)
    return out


def fwall_values_from_coords(params: WallParams, A: np.ndarray, rho) -> np.ndarray:
    return np.maximum(p_values_from_coords(params, A), wall_values_from_coords(params, A, rho))


def fwall_truncated_from_coords(params: WallParams, A_t: np.ndarray, znorm) -> np.ndarray:
    return np.maximum(p_values_from_coords(params, A_t), wall_truncated_from_coords(params, A_t, znorm))


# ---------------------------------------------------------------------------
# vector-level operations
# ---------------------------------------------------------------------------


def _coords(inst: WallInstance, x) -> tuple[np.ndarray, float, np.ndarray | None]:
    v = as_vector(x, inst.n)
    a = inst.V @ v
    resid = v - inst.V.T @ a
    rho = float(np.linalg.norm(resid))
    resid_dir = resid / rho if rho > 0 else None
    return a, rho, resid_dir


def p_value(inst: WallInstance, x) -> float:
    a = inst.V @ as_vector(x, inst.n)
    return float(p_values_from_coords(inst.params, a[None, :])[0])


def p_truncated(inst: WallInstance, x, t: int) -> float:
    if not 1 <= t <= inst.k:
        raise ValueError(f"t must lie in [1, {inst.k}]")
    a = inst.V @ as_vector(x, inst.n)
    return float(p_values_from_coords(inst.params, a[None, :t])[0])


def in_cone(inst: WallInstance, x, i: int) -> bool:
    """Whether x correlates with direction i (0-based): |<v_i,x>| >= beta*||x||.

    The origin belongs to no cone by convention.
    """
    if not 0 <= i < inst.k:
        raise ValueError(f"direction index must lie in [0, {inst.k})")
    v = as_vector(x, inst.n)
    norm = np.linalg.norm(v)
    if norm == 0:
        return False
    return bool(abs(inst.V[i] @ v) >= inst.params.beta * norm)


def wall_value(inst: WallInstance, x) -> float:
    a, rho, _ = _coords(inst, x)
    return float(wall_values_from_coords(inst.params, a[None, :], rho)[0])


def wall_value_truncated(inst: WallInstance, x, t: int) -> float:
    """Wall value computed from v_1..v_t only (plus ||x||)."""
    if not 1 <= t <= inst.k:
        raise ValueError(f"t must lie in [1, {inst.k}]")
    v = as_vector(x, inst.n)
    a_t = inst.V[:t] @ v
    # residual vector, not sqrt(||x||^2 - ||a||^2): the latter cancels badly
    # for x close to the known span
    z = v - inst.V[:t].T @ a_t
    znorm = float(np.linalg.norm(z))
    return float(wall_truncated_from_coords(inst.params, a_t[None, :], znorm)[0])


def fwall_value(inst: WallInstance, x) -> float:
    return max(p_value(inst, x), wall_value(inst, x))


def fwall_truncated(inst: WallInstance, x, t: int) -> float:
    return max(p_truncated(inst, x, t), wall_value_truncated(inst, x, t))


@dataclass(frozen=True)
class WallDisclosure:
    branch: str  # "linear" when a p-plane answers, "wall" otherwise
    index: int | None  # 0-based argmax index for the linear branch


def _filler_direction(inst: WallInstance, resid_dir: np.ndarray | None) -> np.ndarray:
    # deterministic unit vector orthogonal to span(V) and the residual direction
    for j in range(inst.n):
        e = np.zeros(inst.n)
        e[j] = 1.0
        r = e - inst.V.T @ (inst.V @ e)
        if resid_dir is not None:
            r -= (resid_dir @ r) * resid_dir
        norm = np.linalg.norm(r)
        if norm > 1e-6:
            return r / norm
    raise RuntimeError("no direction orthogonal to the hidden span; n too small")


def wall_argmax(inst: WallInstance, x) -> InnerMaxResult:
    """The supporting-plane anchor y* in Omega achieving the wall value."""
    params = inst.params
    a, rho, resid_dir = _coords(inst, x)
    inner, y_unit, yp_unit, lam, reached = _inner_max_batch(a[None, :], rho, params.beta, 1.0)
    c_star, _ = _outer_max_c(params, inner)
    c = float(c_star[0])
    y = c * (inst.V.T @ y_unit[0])
    if resid_dir is not None:
        y = y + c * float(yp_unit[0]) * resid_dir
    norm_gap_sq = c * c - float(y @ y)
    if norm_gap_sq > 1e-12 * c * c:  # fully clipped branch: park the leftover norm off-span
        y = y + math.sqrt(norm_gap_sq) * _filler_direction(inst, resid_dir)
    clipped = tuple(int(i) for i in np.nonzero(np.abs(np.abs(y_unit[0]) - params.beta) <= 1e-12)[0])
    mult = float(c * lam[0]) if np.isfinite(lam[0]) else math.inf
    return InnerMaxResult(maximizer=y, value=float(c * inner[0]), multiplier=mult,
                          clipped=clipped, reached=bool(reached[0]))


def fwall_subgrads(inst: WallInstance, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Batched values and subgradients of f_V for the rows of X.

    Returns (values (B,), subgradients (B, n)).  Same tie-breaking as
    :func:`fwall_subgrad`: the linear branch wins ties.
    """
    params = inst.params
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    B = X.shape[0]
    A = X @ inst.V.T
    resid = X - A @ inst.V
    rho = np.linalg.norm(resid, axis=1)
    p_terms = A - params.gamma * np.arange(1, inst.k + 1)
    p_vals = np.max(p_terms, axis=1)
    i_star = np.argmax(p_terms, axis=1)

    inner, y_unit, yp_unit, _, _ = _inner_max_batch(A, rho, params.beta, 1.0)
    c_star, w_vals = _outer_max_c(params, inner)
    Y = c_star[:, None] * (y_unit @ inst.V)
    pos = rho > 0
    Y[pos] += (c_star[pos] * yp_unit[pos] / rho[pos])[:, None] * resid[pos]
    gap_sq = c_star**2 - np.einsum("ij,ij->i", Y, Y)
    for lane in np.nonzero(gap_sq > 1e-12 * c_star**2)[0]:
        rdir = resid[lane] / rho[lane] if pos[lane] else None
        Y[lane] += math.sqrt(gap_sq[lane]) * _filler_direction(inst, rdir)
    ny = np.linalg.norm(Y, axis=1)
    grads = 2.0 * (1.0 + params.alpha) * ny[:, None] ** (params.alpha - 1.0) * Y

    linear = p_vals >= w_vals
    out = np.where(linear[:, None], inst.V[i_star], grads)
    return np.maximum(p_vals, w_vals), out


def fwall_subgrad(inst: WallInstance, x) -> OracleAnswer:
    """One subgradient of f_V = max{p_V, W_V} with deterministic tie-breaking.

    When the linear part attains the max (ties included) the answer is v_i*
    for the smallest argmax index; otherwise it is grad h at the wall's
    supporting-plane anchor, 2*(1+alpha)*||y*||^(alpha-1) * y*.
    """
    params = inst.params
    v = as_vector(x, inst.n)
    a = inst.V @ v
    p_terms = a - params.gamma * np.arange(1, inst.k + 1)
    p_val = float(np.max(p_terms))
    w_val = wall_value(inst, x)
    if p_val >= w_val:
        i_star = int(np.argmax(p_terms))
        return OracleAnswer(value=p_val, subgradient=inst.V[i_star].copy(),
                            disclosure=WallDisclosure("linear", i_star))
    anchor = wall_argmax(inst, x)
    y = anchor.maximizer
    ny = float(np.linalg.norm(y))
    grad = 2.0 * (1.0 + params.alpha) * ny ** (params.alpha - 1.0) * y
    return OracleAnswer(value=w_val, subgradient=grad, disclosure=WallDisclosure("wall", None))
