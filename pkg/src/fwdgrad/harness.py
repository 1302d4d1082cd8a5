"""Experiment orchestration: seeded multi-trial runs, aggregation, CSV.

A run is fully determined by (seed, config). Substreams are derived by
hashing (seed, role, index): role 0 seeds the shared starting point,
role 1 the per-trial direction streams, role 2 the drifting objective
path, role 3 the probe points used to estimate composite constants. All
trials therefore share one starting point and one objective path, so two
runs of the same config produce byte-identical artifacts. Trials are
merged in trial-index order, which keeps the aggregate independent of
how they would be scheduled.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import bounds as bnd
from .estimator import moment_diagnostics
from .optim import run_online, run_prox_online, run_static
from .problems import (CompositeObjective, DriftingLsqObjective, L1Norm,
                       dist_to_solution_set, lsq_constants,
                       make_drifting_generator)
from .sampling import DirectionSampler, substream

ROLE_X0, ROLE_TRIAL, ROLE_OBJECTIVE, ROLE_PROBE = 0, 1, 2, 3

TRACE_MODES = ("static", "track", "prox-track")
ALL_MODES = TRACE_MODES + ("diag", "bounds")

CSV_HEADER = "k,mean_gap,std_gap,mean_dist_sq,bound"


class ConfigError(ValueError):
    """Invalid experiment configuration (reported with the field name)."""


@dataclass
class ExperimentConfig:
    mode: str = "track"
    m: int = 60
    n: int = 10
    r: int = 10
    seed: int = 0
    trials: int = 50
    steps: int = 2000
    inner: int = 1
    alpha: float | str = "auto"  # 1/(beta*(m+4)) for GD modes, 1/beta for prox
    lam: float = 0.1
    sigma_step: float = 1e-6
    b_noise_var: float = 1e-2
    samples: int = 200000  # diag mode sample count
    out: str | None = None
    svg: str | None = None
    log_y: bool = False

    def validate(self):
        if self.mode not in ALL_MODES:
            raise ConfigError(f"mode: expected one of {ALL_MODES}, got {self.mode!r}")
        for name in ("m", "n", "r", "trials", "steps", "inner", "samples"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                raise ConfigError(f"{name}: expected a positive integer, got {v!r}")
        if self.r > min(self.m, self.n):
            raise ConfigError(f"r: must satisfy r <= min(m, n), got r={self.r}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError(f"seed: expected a nonnegative integer, got {self.seed!r}")
        if self.alpha != "auto" and not (isinstance(self.alpha, float) and self.alpha > 0):
            raise ConfigError(f"alpha: expected 'auto' or a positive number, got {self.alpha!r}")
        if self.lam < 0:
            raise ConfigError(f"lambda: must be >= 0, got {self.lam}")
        if self.sigma_step < 0:
            raise ConfigError(f"sigma_step: must be >= 0, got {self.sigma_step}")
        if self.b_noise_var < 0:
            raise ConfigError(f"b_noise_var: must be >= 0, got {self.b_noise_var}")
        return self


@dataclass
class AggregateTrace:
    """Trial-averaged trace plus the theoretical bound column.

    Row i describes time index k[i]; mean/std are over exactly `trials`
    runs merged in trial-index order. `info` carries the measured and
    derived constants the bound column was evaluated with.
    """

    k: np.ndarray
    mean_gap: np.ndarray
    std_gap: np.ndarray
    mean_dist_sq: np.ndarray
    bound: np.ndarray
    info: dict = field(default_factory=dict)


def _shared_x0(config):
    return DirectionSampler(config.m, substream(config.seed, ROLE_X0)).direction()


def _trial_sampler(config, t):
    return DirectionSampler(config.m, substream(config.seed, ROLE_TRIAL, t))


def _drifting_family(config):
    gen = make_drifting_generator(
        config.m, config.n, config.r, substream(config.seed, ROLE_OBJECTIVE),
        sigma_step=config.sigma_step, b_noise_var=config.b_noise_var)
    return DriftingLsqObjective(gen)


def _aggregate(traces):
    gaps = np.vstack([t.gap for t in traces])
    dists = np.vstack([t.dist_sq for t in traces])
    return gaps.mean(axis=0), gaps.std(axis=0), dists.mean(axis=0)


def _measured_eta(family, traces, steps):
    eta0 = max(0.0, max(float(t.drift_inc.max()) for t in traces))
    eta_star = 0.0
    for k in range(steps):
        eta_star = max(eta_star, family.optimal_value(k + 1) - family.optimal_value(k))
    return eta0, eta_star


def run_experiment(config):
    """Run a trace-producing mode and aggregate over trials."""
    config.validate()
    if config.mode == "static":
        return _run_static_mode(config)
    if config.mode == "track":
        return _run_track_mode(config)
    if config.mode == "prox-track":
        return _run_prox_mode(config)
    raise ConfigError(f"mode: {config.mode!r} does not produce a trace")


def _run_static_mode(config):
    family = _drifting_family(config)
    inst = family.instance(0)
    f = family.smooth_fn(0)
    mu, beta = lsq_constants(inst)
    alpha = 1.0 / (beta * (config.m + 4)) if config.alpha == "auto" else config.alpha
    lstar = inst.optimal_value()
    x0 = _shared_x0(config)
    traces = [run_static(f, x0, alpha, config.steps, _trial_sampler(config, t),
                         lstar=lstar, dist_fn=lambda x: dist_to_solution_set(inst, x))
              for t in range(config.trials)]
    mean_gap, std_gap, mean_dist = _aggregate(traces)
    gap0 = float(traces[0].gap[0])
    ks = np.arange(config.steps)
    bound = np.array([bnd.static_gap_bound(k, mu, beta, config.m, gap0) for k in ks])
    info = {"mode": "static", "mu": mu, "beta": beta, "alpha": alpha, "gap0": gap0}
    return AggregateTrace(ks, mean_gap, std_gap, mean_dist, bound, info)


def _run_track_mode(config):
    family = _drifting_family(config)
    mu, beta = family.mu, family.beta
    alpha = 1.0 / (beta * (config.m + 4)) if config.alpha == "auto" else config.alpha
    x0 = _shared_x0(config)
    traces = [run_online(family, x0, alpha, config.inner, config.steps,
                         _trial_sampler(config, t))
              for t in range(config.trials)]
    mean_gap, std_gap, mean_dist = _aggregate(traces)
    eta0_hat, eta_star_hat = _measured_eta(family, traces, config.steps)
    gap0 = family.loss(0, x0) - family.optimal_value(0)
    inputs = bnd.BoundInputs(mu=mu, beta=beta, dim=config.m, alpha=alpha,
                             ell=config.inner, eta0=eta0_hat,
                             eta_star=eta_star_hat, gap0=gap0)
    gamma = bnd.default_gamma(inputs)
    ks = np.arange(config.steps)
    bound = np.array([bnd.tracking_bound(k, inputs, gamma) for k in ks])
    info = {"mode": "track", "mu": mu, "beta": beta, "alpha": alpha,
            "gamma": gamma, "ell": config.inner, "eta0_hat": eta0_hat,
            "eta_star_hat": eta_star_hat, "gap0": gap0,
            "limsup": bnd.tracking_limsup(inputs, gamma)}
    return AggregateTrace(ks, mean_gap, std_gap, mean_dist, bound, info)


def _probe_composite_constants(comp, config, n_samples=500):
    """Empirical proximal-PL and quadratic-growth constants at index 0.

    Samples points around the reference minimizer at three radii; mu_hat
    is the smallest proximal-PL ratio and xi_hat the smallest
    2 * gap / dist^2. Both are estimates: the true constants exist but are
    not constructive.
    """
    xstar = comp.minimizer(0)
    lstar = comp.optimal_value(0)
    g0 = comp.smooth_fn(0)
    probe = DirectionSampler(comp.dim, substream(config.seed, ROLE_PROBE))
    base = max(1.0, float(np.linalg.norm(xstar)))
    scales = (0.1, 0.5, 2.0)
    mu_hat = np.inf
    xi_hat = np.inf
    for i in range(n_samples):
        x = xstar + scales[i % len(scales)] * base * probe.direction()
        gap = comp.loss(0, x) - lstar
        if gap <= 1e-12:
            continue
        mu_hat = min(mu_hat, bnd.prox_pl_ratio(g0, comp.h, x, comp.beta, gap))
        d2 = float(np.sum((x - xstar) ** 2))
        if d2 > 0:
            xi_hat = min(xi_hat, 2.0 * gap / d2)
    mu_hat = min(mu_hat, comp.beta)  # the ratio cannot exceed beta exactly
    return float(mu_hat), float(xi_hat)


def _run_prox_mode(config):
    comp = CompositeObjective(_drifting_family(config), L1Norm(config.lam))
    beta = comp.beta
    gamma = 1.0 / beta if config.alpha == "auto" else config.alpha
    x0 = _shared_x0(config)
    traces = [run_prox_online(comp, x0, gamma, config.inner, config.steps,
                              _trial_sampler(config, t))
              for t in range(config.trials)]
    mean_gap, std_gap, mean_dist = _aggregate(traces)
    eta0_hat, eta_star_hat = _measured_eta(comp, traces, config.steps)
    mu_hat, xi_hat = _probe_composite_constants(comp, config)
    c1_hat = max(float(t.grad_norm.max()) for t in traces)
    c2 = comp.subgradient_bound()
    gap0 = comp.loss(0, x0) - comp.optimal_value(0)
    inputs = bnd.BoundInputs(mu=mu_hat, beta=beta, dim=config.m,
                             ell=config.inner, eta0=eta0_hat,
                             eta_star=eta_star_hat, gap0=gap0,
                             xi=xi_hat, c1=c1_hat, c2=c2)
    ks = np.arange(config.steps)
    bound = np.array([bnd.prox_tracking_bound(k, inputs) for k in ks])
    info = {"mode": "prox-track", "mu_hat": mu_hat, "xi_hat": xi_hat,
            "beta": beta, "gamma": gamma, "ell": config.inner,
            "eta0_hat": eta0_hat, "eta_star_hat": eta_star_hat,
            "c1_hat": c1_hat, "c2": c2, "gap0": gap0, "lam": config.lam,
            "limsup_gap": bnd.prox_limsup_gap(inputs)}
    return AggregateTrace(ks, mean_gap, std_gap, mean_dist, bound, info)


def run_diagnostics(config):
    """Estimator moment check on the index-0 drifting instance."""
    config.validate()
    inst = _drifting_family(config).instance(0)
    x = _shared_x0(config)
    sampler = _trial_sampler(config, 0)
    mean_est, second = moment_diagnostics(inst.scalar_function(), x,
                                          config.samples, sampler)
    grad = inst.grad(x)
    gnorm2 = float(grad @ grad)
    ratio = second / gnorm2
    return {
        "dim": config.m,
        "samples": config.samples,
        "rel_err": float(np.linalg.norm(mean_est - grad)) / float(np.sqrt(gnorm2)),
        "second_moment_ratio": ratio,
        "gaussian_exact": config.m + 2,
        "bound": config.m + 4,
        "passed": bool(ratio <= config.m + 4),
    }


# ---------------------------------------------------------------------------
# CSV artifact
# ---------------------------------------------------------------------------

def _fmt(v):
    return format(float(v), ".17g")


def write_csv(trace, path):
    """UTF-8, LF endings, header row, 17 significant digits per value."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        for i in range(len(trace.k)):
            fh.write(f"{int(trace.k[i])},{_fmt(trace.mean_gap[i])},"
                     f"{_fmt(trace.std_gap[i])},{_fmt(trace.mean_dist_sq[i])},"
                     f"{_fmt(trace.bound[i])}\n")


def read_csv(path):
    """Inverse of `write_csv` (info dict is not serialized)."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header: {header!r}")
        rows = [line.rstrip("\n").split(",") for line in fh if line.strip()]
    cols = list(zip(*rows)) if rows else [[]] * 5
    return AggregateTrace(
        k=np.array([int(v) for v in cols[0]], dtype=int),
        mean_gap=np.array([float(v) for v in cols[1]]),
        std_gap=np.array([float(v) for v in cols[2]]),
        mean_dist_sq=np.array([float(v) for v in cols[3]]),
        bound=np.array([float(v) for v in cols[4]]))


# ---------------------------------------------------------------------------
# Flat key/value config files
# ---------------------------------------------------------------------------

_INT_KEYS = {"m", "n", "r", "seed", "trials", "steps", "inner", "samples"}
_FLOAT_KEYS = {"lambda", "sigma_step", "b_noise_var"}
_STR_KEYS = {"mode", "out", "svg"}
_KEY_TO_FIELD = {"lambda": "lam"}


def parse_config_file(path):
    """Parse `key = value` lines ('#' starts a comment) into config fields."""
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.rstrip()!r}")
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip()
            field_name = _KEY_TO_FIELD.get(key, key)
            try:
                if key in _INT_KEYS:
                    values[field_name] = int(val)
                elif key in _FLOAT_KEYS:
                    values[field_name] = float(val)
                elif key == "alpha":
                    values[field_name] = "auto" if val == "auto" else float(val)
                elif key == "log_y":
                    values[field_name] = val.lower() in ("1", "true", "yes")
                elif key in _STR_KEYS:
                    values[field_name] = val
                else:
                    raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {val!r}") from exc
    return values


def config_from_sources(file_values=None, overrides=None):
    """Defaults, overlaid with config-file values, overlaid with CLI flags."""
    config = ExperimentConfig()
    for source in (file_values or {}), (overrides or {}):
        fields = {f for f in vars(config)}
        for key, val in source.items():
            if key not in fields:
                raise ConfigError(f"unknown config field {key!r}")
        config = replace(config, **source)
    return config
