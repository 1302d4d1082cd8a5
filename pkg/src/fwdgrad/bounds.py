"""Closed-form evaluators for the convergence and tracking guarantees.

Pure functions of the problem constants; used to overlay the theoretical
curves on experiment traces. Bounds are evaluated exactly as stated even
where they are visibly conservative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .problems import dist_to_solution_set


@dataclass(frozen=True)
class BoundInputs:
    """Constants feeding the tracking bounds.

    mu and beta are the PL and smoothness constants, dim the problem
    dimension, alpha the raw step size, ell the inner-update count, eta0 /
    eta_star the cost and optimal-value drifts, gap0 the initial loss gap.
    xi (quadratic-growth constant of the composite case) and c1 / c2
    (gradient and subgradient bounds) are only needed by the proximal
    bound and default to None.
    """

    mu: float
    beta: float
    dim: int
    alpha: float | None = None
    ell: int = 1
    eta0: float = 0.0
    eta_star: float = 0.0
    gap0: float = 0.0
    xi: float | None = None
    c1: float | None = None
    c2: float | None = None

    def __post_init__(self):
        if not 0 < self.mu <= self.beta:
            raise ValueError(f"need 0 < mu <= beta, got mu={self.mu}, beta={self.beta}")
        if self.ell < 1:
            raise ValueError(f"ell must be >= 1, got {self.ell}")
        if self.eta0 < 0 or self.eta_star < 0:
            raise ValueError("drift constants must be nonnegative")
        if self.gap0 < 0:
            raise ValueError(f"gap0 must be >= 0, got {self.gap0}")


def descent_coefficient(alpha, beta, dim):
    """Per-step expected decrease coefficient alpha*(1 - (beta/2)(m+4)*alpha).

    Positive exactly when 0 < alpha < 2/(beta*(m+4)); out-of-range alpha
    is an error.
    """
    limit = 2.0 / (beta * (dim + 4))
    if not 0 < alpha < limit:
        raise ValueError(f"alpha {alpha} outside (0, {limit:.6g})")
    return alpha * (1.0 - 0.5 * beta * (dim + 4) * alpha)


def static_gap_bound(k, mu, beta, dim, gap0):
    """Expected loss gap after k steps on a fixed objective at the
    reference step size 1/(beta*(m+4)): (1 - mu/((m+4)*beta))^k * gap0."""
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    return (1.0 - mu / ((dim + 4) * beta)) ** k * gap0


def _gamma_cap(inputs, gamma):
    caps = [1.0 / (2.0 * inputs.mu * inputs.ell)]
    if inputs.alpha is not None:
        caps.append(descent_coefficient(inputs.alpha, inputs.beta, inputs.dim))
    return min(caps)


def default_gamma(inputs):
    """min(descent coefficient of alpha, 0.99/(2 mu ell)): inside the
    admissible interval with margin when the caller picks nothing."""
    choices = [0.99 / (2.0 * inputs.mu * inputs.ell)]
    if inputs.alpha is not None:
        choices.append(descent_coefficient(inputs.alpha, inputs.beta, inputs.dim))
    return min(choices)


def _resolve_gamma(inputs, gamma):
    if gamma is None:
        gamma = default_gamma(inputs)
    cap = _gamma_cap(inputs, gamma)
    # the descent-coefficient endpoint itself is attainable (it is the
    # gamma the analysis constructs); only 1/(2 mu ell) must stay strict
    if not 0 < gamma <= cap * (1 + 1e-12) or \
            gamma * 2.0 * inputs.mu * inputs.ell >= 1.0:
        raise ValueError(
            f"gamma {gamma} outside the admissible interval (0, {cap:.6g}]")
    return gamma


def tracking_limsup(inputs, gamma=None):
    """Asymptotic tracking-error term (eta0 + eta_star)/(mu^2 gamma ell)."""
    gamma = _resolve_gamma(inputs, gamma)
    return (inputs.eta0 + inputs.eta_star) / (inputs.mu ** 2 * gamma * inputs.ell)


def tracking_bound(k, inputs, gamma=None):
    """Expected squared tracking error after round k of the online scheme.

    (eta0 + eta_star)/(mu^2 gamma ell) + (2/mu)(1 - 2 mu gamma ell)^k gap0,
    valid for gamma in (0, min(descent_coefficient(alpha), 1/(2 mu ell))).
    Nonincreasing in k; converges to `tracking_limsup`.
    """
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    gamma = _resolve_gamma(inputs, gamma)
    rate = 1.0 - 2.0 * inputs.mu * gamma * inputs.ell
    transient = (2.0 / inputs.mu) * rate ** k * inputs.gap0
    return tracking_limsup(inputs, gamma) + transient


def _g1(inputs):
    if inputs.c1 is None or inputs.c2 is None:
        raise ValueError("proximal bound needs the gradient bounds c1 and c2")
    return 2.0 * inputs.c1 * (inputs.c1 + inputs.c2) / inputs.beta


def prox_limsup_gap(inputs):
    """Asymptotic loss-gap term of the proximal scheme:
    (eta0 + eta_star + G1 sqrt(m+3)) / (1 - (1 - mu/beta)^ell)."""
    if inputs.xi is None or inputs.xi <= 0:
        raise ValueError(f"xi must be > 0, got {inputs.xi}")
    per_step = inputs.eta0 + inputs.eta_star + _g1(inputs) * math.sqrt(inputs.dim + 3)
    return per_step / (1.0 - (1.0 - inputs.mu / inputs.beta) ** inputs.ell)


def prox_tracking_bound(k, inputs):
    """Expected squared tracking error of the online proximal scheme at
    step size 1/beta: (2/xi) * [limsup gap + (1 - mu/beta)^(k ell) gap0]."""
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    limsup = prox_limsup_gap(inputs)  # validates xi and the c's
    rate = 1.0 - inputs.mu / inputs.beta
    return (2.0 / inputs.xi) * (limsup + rate ** (k * inputs.ell) * inputs.gap0)


def quadratic_growth_margins(inst, x, mu, beta, dist_oracle=None):
    """Slack of the two-sided growth inequality
    mu/2 * dist^2 <= loss(x) - loss* <= beta/2 * dist^2.

    Returns (lower_slack, upper_slack); both are >= -1e-9-scale on valid
    smooth PL instances.
    """
    dist = dist_oracle(x) if dist_oracle is not None else dist_to_solution_set(inst, x)
    gap = inst.loss(x) - inst.optimal_value()
    return gap - 0.5 * mu * dist ** 2, 0.5 * beta * dist ** 2 - gap


def grad_mapping_sq(g, h, x, alpha):
    """Generalized squared gradient norm of the composite objective g + h:

        -2 alpha * min_y { <grad g(x), y - x> + alpha/2 ||y - x||^2
                           + h(y) - h(x) }

    evaluated through the closed-form minimizer y = prox of h at
    x - grad g(x)/alpha. Equals ||grad g(x)||^2 when h is zero, and is
    always nonnegative.
    """
    if alpha <= 0:
        raise ValueError(f"alpha must be > 0, got {alpha}")
    x = np.asarray(x, dtype=float)
    grad = g.gradient(x)
    y = h.prox(x - grad / alpha, 1.0 / alpha)
    d = y - x
    inner = float(grad @ d) + 0.5 * alpha * float(d @ d) + h.value(y) - h.value(x)
    return max(-2.0 * alpha * inner, 0.0)


def prox_pl_ratio(g, h, x, beta, loss_gap):
    """Empirical proximal-PL ratio grad_mapping_sq(x, beta) / (2 loss gap).

    The minimum of this ratio over sampled points is a lower estimate of
    the proximal-PL constant of the composite objective.
    """
    if loss_gap <= 0:
        raise ValueError(f"loss_gap must be > 0, got {loss_gap}")
    return grad_mapping_sq(g, h, x, beta) / (2.0 * loss_gap)


def path_radius(mu, beta, gap0):
    """Bound on the total path length of exact proximal gradient descent:
    sqrt((2/beta) * gap0) / (1 - sqrt(1 - mu/beta))."""
    if not 0 < mu <= beta:
        raise ValueError(f"need 0 < mu <= beta, got mu={mu}, beta={beta}")
    if gap0 < 0:
        raise ValueError(f"gap0 must be >= 0, got {gap0}")
    return math.sqrt(2.0 * gap0 / beta) / (1.0 - math.sqrt(1.0 - mu / beta))
