"""Least-squares objectives, drifting-problem generators, and composites.

The workhorse instance is 0.5*||A x - b||^2. Its curvature constants come
straight from the singular values of A: the smoothness constant is
sigma_max(A)^2 and the PL constant is lambda_min(A A^T), which is positive
exactly when A has full row rank (the over-parameterised, interpolating
case). Time variation is modelled by shrinking singular values and a
random walk on b.
"""

from __future__ import annotations

import numpy as np

from .dual import Dual, ScalarFunction
from .sampling import DirectionSampler

_RANK_RTOL = 1e-12  # singular values below rtol * sigma_max count as zero


class HorizonExceededError(RuntimeError):
    """Drift consumed a singular value: the generator's horizon is over."""


class LsqFunction(ScalarFunction):
    """Dual-number evaluation of 0.5*||A x - b||^2.

    Uses the affine-map and squared-norm primitives at vector level: the
    residual values and tangents each propagate through A, which is exact
    dual algebra without per-component Python dispatch.
    """

    def __init__(self, A, b):
        super().__init__(self._eval, A.shape[1])
        self.A = A
        self.b = b

    def _eval(self, xs):
        # inline of affine_map + half_sqnorm, skipping the dual re-wrap of
        # the residual (this evaluation sits in every optimizer step)
        vals = self.A @ np.array([d.value for d in xs]) - self.b
        tans = self.A @ np.array([d.tangent for d in xs])
        return Dual(0.5 * float(vals @ vals), float(vals @ tans))

    def value(self, x):
        r = self.A @ np.asarray(x, dtype=float) - self.b
        return 0.5 * float(r @ r)

    def gradient(self, x):
        return self.A.T @ (self.A @ np.asarray(x, dtype=float) - self.b)


class LinearLsqInstance:
    """One least-squares problem: loss 0.5*||A x - b||^2, gradient A^T(Ax-b)."""

    def __init__(self, A, b, factors=None):
        self.A = np.asarray(A, dtype=float)
        self.b = np.asarray(b, dtype=float)
        if self.A.ndim != 2 or self.b.shape != (self.A.shape[0],):
            raise ValueError(f"incompatible shapes A{self.A.shape}, b{self.b.shape}")
        self._factors = factors  # optional thin SVD (U, s, Vt), s descending

    @property
    def n_rows(self):
        return self.A.shape[0]

    @property
    def dim(self):
        return self.A.shape[1]

    def residual(self, x):
        return self.A @ np.asarray(x, dtype=float) - self.b

    def loss(self, x):
        r = self.residual(x)
        return 0.5 * float(r @ r)

    def grad(self, x):
        return self.A.T @ self.residual(x)

    def scalar_function(self):
        return LsqFunction(self.A, self.b)

    def svd(self):
        """Thin SVD (U, s, Vt) with singular values in descending order."""
        if self._factors is None:
            U, s, Vt = np.linalg.svd(self.A, full_matrices=False)
            self._factors = (U, s, Vt)
        return self._factors

    def optimal_value(self):
        """min loss = 0.5*||(I - P_range(A)) b||^2; exact 0 when consistent."""
        U, s, _ = self.svd()
        keep = s > _RANK_RTOL * s[0] if s[0] > 0 else np.zeros_like(s, bool)
        perp = self.b - U[:, keep] @ (U[:, keep].T @ self.b)
        val = 0.5 * float(perp @ perp)
        bnorm = float(self.b @ self.b)
        if val <= 1e-20 * max(1.0, bnorm):
            return 0.0
        return val


def lsq_constants(inst):
    """(mu, beta) of a least-squares instance.

    mu is the smallest eigenvalue of A A^T (the tangent-kernel bound on
    the PL constant; for a linear map the kernel is constant) and beta is
    the largest squared singular value of A. A rank-deficient row space is
    flagged by mu = 0.0 rather than raised.
    """
    U, s, Vt = inst.svd()
    if s[0] == 0.0:
        raise ValueError("A is zero: constants undefined")
    beta = float(s[0]) ** 2
    n = inst.n_rows
    if len(s) < n:  # A A^T has n - min(n, m) structurally zero eigenvalues
        return 0.0, beta
    smin = float(s[n - 1])
    if smin <= _RANK_RTOL * float(s[0]):
        return 0.0, beta
    return smin ** 2, beta


def dist_to_solution_set(inst, x):
    """Euclidean distance from x to the affine solution set {y: A y = b}.

    Computed as ||pinv(A) (A x - b)||, with singular values below
    1e-12 * sigma_max treated as zero. Raises ValueError when the system
    is inconsistent (solution set empty).
    """
    U, s, Vt = inst.svd()
    r = inst.residual(x)
    keep = s > _RANK_RTOL * s[0] if s[0] > 0 else np.zeros_like(s, bool)
    coeff = U[:, keep].T @ r
    perp = r - U[:, keep] @ coeff
    if float(np.linalg.norm(perp)) > 1e-8 * max(1.0, float(np.linalg.norm(r))):
        raise ValueError("inconsistent system: solution set is empty")
    return float(np.linalg.norm(coeff / s[keep]))


class DriftingLsqGenerator:
    """Time-varying instances A_k = U diag(s_k) V^T with a random walk on b.

    Per step the singular values shrink by a fixed decrement and b gains
    N(0, b_noise_var * I_n) noise. State advances monotonically: asking
    for an index behind the stream is an error, and an index ahead replays
    the intermediate steps. Single-owner, like the sampler it wraps.
    """

    def __init__(self, U, V, sigma0, sigma_step, b0, b_noise_var, noise_sampler):
        self.U = np.asarray(U, dtype=float)
        self.V = np.asarray(V, dtype=float)
        self.sigma_step = float(sigma_step)
        self.b_noise_var = float(b_noise_var)
        self._s = np.asarray(sigma0, dtype=float).copy()
        self._b = np.asarray(b0, dtype=float).copy()
        self._noise = noise_sampler
        self._k = 0
        if np.any(self._s <= 0):
            raise ValueError("initial singular values must be positive")

    @property
    def n_rows(self):
        return self.U.shape[0]

    @property
    def dim(self):
        return self.V.shape[0]

    def _instance(self):
        s = self._s.copy()
        A = self.U @ (s[:, None] * self.V.T)
        # descending order for the cached factors (construction is ascending)
        order = np.argsort(s)[::-1]
        factors = (self.U[:, order], s[order], self.V.T[order, :])
        return LinearLsqInstance(A, self._b.copy(), factors=factors)

    def advance(self, k):
        """Instance (A_k, b_k); k may not precede the stream position."""
        if k < self._k:
            raise ValueError(f"stream already at index {self._k}, cannot rewind to {k}")
        while self._k < k:
            new_s = self._s - self.sigma_step
            if np.any(new_s <= 0):
                raise HorizonExceededError(
                    f"singular value underflow at step {self._k + 1}: "
                    f"min would be {new_s.min():.3e}")
            self._s = new_s
            self._b = self._b + np.sqrt(self.b_noise_var) * self._noise.standard_normal(self.n_rows)
            self._k += 1
        return self._instance()


def make_drifting_generator(m, n, r, seed, sigma_step=1e-6, b_noise_var=1e-2):
    """Seeded drifting generator with orthonormal U (n x r) and V (m x r).

    U and V come from thin QR of Gaussian matrices with the sign fixed so
    R has a positive diagonal; initial singular values are {i/r: i=1..r}
    (so {0.1, ..., 1.0} at r=10); b_0 ~ N(0, I_n).
    """
    if not (1 <= r <= min(m, n)):
        raise ValueError(f"need 1 <= r <= min(m, n); got r={r}, m={m}, n={n}")
    if sigma_step < 0 or b_noise_var < 0:
        raise ValueError("sigma_step and b_noise_var must be nonnegative")
    ss = seed if isinstance(seed, np.random.SeedSequence) \
        else np.random.SeedSequence(int(seed))
    init_ss, drift_ss = ss.spawn(2)
    init = DirectionSampler(1, seed=init_ss)

    def _ortho(rows, cols):
        G = init.standard_normal(rows * cols).reshape(rows, cols)
        Q, R = np.linalg.qr(G)
        return Q * np.sign(np.diag(R))

    U = _ortho(n, r)
    V = _ortho(m, r)
    sigma0 = np.arange(1, r + 1) / r
    b0 = init.standard_normal(n)
    return DriftingLsqGenerator(U, V, sigma0, sigma_step, b0, b_noise_var,
                                DirectionSampler(1, seed=drift_ss))


# ---------------------------------------------------------------------------
# Nonsmooth parts with closed-form prox oracles
# ---------------------------------------------------------------------------

class L1Norm:
    """h(x) = weight * ||x||_1; prox is componentwise soft-thresholding."""

    def __init__(self, weight):
        if weight < 0:
            raise ValueError(f"weight must be >= 0, got {weight}")
        self.weight = float(weight)

    def value(self, x):
        return self.weight * float(np.abs(np.asarray(x, dtype=float)).sum())

    def prox(self, v, tau):
        v = np.asarray(v, dtype=float)
        t = tau * self.weight
        return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)

    def subgradient_bound(self, dim):
        """sup ||s||, s in the subdifferential: each component in [-w, w]."""
        return self.weight * float(np.sqrt(dim))


class ZeroFunction:
    """h identically 0; prox is the identity map."""

    def value(self, x):
        return 0.0

    def prox(self, v, tau):
        return np.asarray(v, dtype=float).copy()

    def subgradient_bound(self, dim):
        return 0.0


class BoxProjection:
    """Indicator of the box [lo, hi]^dim; prox is componentwise clamping."""

    def __init__(self, lo, hi):
        if not lo <= hi:
            raise ValueError(f"need lo <= hi, got [{lo}, {hi}]")
        self.lo = float(lo)
        self.hi = float(hi)

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return 0.0 if np.all((x >= self.lo) & (x <= self.hi)) else np.inf

    def prox(self, v, tau):
        return np.clip(np.asarray(v, dtype=float), self.lo, self.hi)

    def subgradient_bound(self, dim):
        return np.inf  # normal cone of the box is unbounded


# ---------------------------------------------------------------------------
# Time-indexed objective families
# ---------------------------------------------------------------------------

class _LsqFamily:
    """Shared protocol: instance(k), loss, gradient, optima, distances."""

    def instance(self, k):
        raise NotImplementedError

    def smooth_fn(self, k):
        raise NotImplementedError

    def loss(self, k, x):
        return self.instance(k).loss(x)

    def grad_smooth(self, k, x):
        return self.instance(k).grad(x)

    def optimal_value(self, k):
        return self.instance(k).optimal_value()

    def dist(self, k, x):
        return dist_to_solution_set(self.instance(k), x)


class StaticLsqObjective(_LsqFamily):
    """Time-invariant family: every index sees the same instance."""

    def __init__(self, inst):
        self._inst = inst
        self._fn = inst.scalar_function()
        self.dim = inst.dim
        self.mu, self.beta = lsq_constants(inst)

    def instance(self, k):
        return self._inst

    def smooth_fn(self, k):
        return self._fn


class DriftingLsqObjective(_LsqFamily):
    """Family backed by a drifting generator; instances cached per index."""

    def __init__(self, generator):
        self._gen = generator
        self._instances = [generator.advance(0)]
        self._fns = {}
        self.dim = generator.dim
        self.mu, self.beta = lsq_constants(self._instances[0])

    def instance(self, k):
        while len(self._instances) <= k:
            self._instances.append(self._gen.advance(len(self._instances)))
        return self._instances[k]

    def smooth_fn(self, k):
        fn = self._fns.get(k)
        if fn is None:
            fn = self.instance(k).scalar_function()
            self._fns[k] = fn
        return fn


class CompositeObjective:
    """Time-indexed composite: smooth least-squares part plus a prox part.

    Optimal values are not closed form once h is nonzero; they are
    computed on demand by the exact-gradient proximal reference solver
    (warm-started along k) and cached together with the minimizer.
    """

    def __init__(self, smooth_family, h):
        self.smooth = smooth_family
        self.h = h
        self.dim = smooth_family.dim
        self.mu = smooth_family.mu
        self.beta = smooth_family.beta
        self._optima = {}

    def instance(self, k):
        return self.smooth.instance(k)

    def smooth_fn(self, k):
        return self.smooth.smooth_fn(k)

    def loss(self, k, x):
        return self.smooth.loss(k, x) + self.h.value(x)

    def grad_smooth(self, k, x):
        return self.smooth.grad_smooth(k, x)

    def subgradient_bound(self):
        return self.h.subgradient_bound(self.dim)

    def _solve(self, k):
        from .optim import prox_gradient_exact  # deferred: optim imports us
        if k - 1 in self._optima:
            x0 = self._optima[k - 1][0]
        else:
            x0 = np.zeros(self.dim)
        res = prox_gradient_exact(self.instance(k), self.h, x0,
                                  gamma=1.0 / self.beta)
        self._optima[k] = (res.x, res.loss)

    def optimal_value(self, k):
        if k not in self._optima:
            self._solve(k)
        return self._optima[k][1]

    def minimizer(self, k):
        """Reference minimizer from the exact solve (assumed unique)."""
        if k not in self._optima:
            self._solve(k)
        return self._optima[k][0]

    def dist(self, k, x):
        # distance to the reference minimizer: an upper bound on the true
        # distance to the solution set, exact when the minimizer is unique
        return float(np.linalg.norm(np.asarray(x, dtype=float) - self.minimizer(k)))


def l1_composite(inst, lam):
    """l1-regularized least squares: g = 0.5*||Ax-b||^2, h = lam*||x||_1."""
    if lam < 0:
        raise ValueError(f"lam must be >= 0, got {lam}")
    family = inst if isinstance(inst, _LsqFamily) else StaticLsqObjective(inst)
    return CompositeObjective(family, L1Norm(lam))


def measure_drift(objective, trajectory):
    """Empirical drift along a realized trajectory.

    eta0_hat is the largest positive jump loss(k+1, x) - loss(k, x) over
    trajectory points x (entry k holding the iterate present when problem
    k hands off to k+1); eta_star_hat is the largest positive jump of the
    optimal values over the same index range. Both are trajectory-restricted
    surrogates: a supremum over all of R^m is unbounded once A_k varies.
    """
    eta0 = 0.0
    eta_star = 0.0
    for k, x in enumerate(trajectory):
        eta0 = max(eta0, objective.loss(k + 1, x) - objective.loss(k, x))
        eta_star = max(eta_star, objective.optimal_value(k + 1) - objective.optimal_value(k))
    return eta0, eta_star
