"""Command-line front end.

Exit codes: 0 on success, 1 on configuration/usage errors, 2 when a run
aborts on divergence. Values given on the command line override values
from --config files, which override built-in defaults.
"""

from __future__ import annotations

import argparse
import sys

from . import bounds as bnd
from .harness import (ConfigError, config_from_sources, parse_config_file,
                      run_diagnostics, run_experiment, write_csv)
from .optim import DivergenceError
from .svgplot import render_svg

_EXPERIMENT_FIELDS = ("m", "n", "r", "seed", "trials", "steps", "inner",
                      "alpha", "lam", "sigma_step", "b_noise_var", "samples",
                      "out", "svg", "log_y")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _alpha_arg(text):
    return "auto" if text == "auto" else float(text)


def _add_experiment_flags(p):
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("-m", type=int, dest="m", help="problem dimension")
    p.add_argument("-n", type=int, dest="n", help="number of equations")
    p.add_argument("-r", type=int, dest="r", help="rank of the drifting matrix")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--steps", type=int)
    p.add_argument("--inner", type=int, help="inner updates per time index")
    p.add_argument("--alpha", type=_alpha_arg, help="step size or 'auto'")
    p.add_argument("--lambda", type=float, dest="lam", help="l1 weight (prox-track)")
    p.add_argument("--sigma-step", type=float, dest="sigma_step")
    p.add_argument("--b-noise-var", type=float, dest="b_noise_var")
    p.add_argument("--samples", type=int, help="diagnostic sample count")
    p.add_argument("--out", help="CSV output path")
    p.add_argument("--svg", help="SVG output path")
    p.add_argument("--log-y", action="store_true", default=None, dest="log_y")


def _build_parser():
    parser = _Parser(prog="fwdgrad",
                     description="Forward-gradient optimization experiments")
    sub = parser.add_subparsers(dest="command")
    for mode in ("static", "track", "prox-track", "diag"):
        p = sub.add_parser(mode)
        p.__class__ = _Parser
        _add_experiment_flags(p)
    p = sub.add_parser("bounds")
    p.__class__ = _Parser
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("-m", type=int, dest="m", required=True)
    p.add_argument("--inner", type=int, default=1)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--alpha", type=_alpha_arg, default="auto")
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--eta0", type=float, default=0.0)
    p.add_argument("--eta-star", type=float, dest="eta_star", default=0.0)
    p.add_argument("--gap0", type=float, default=1.0)
    return parser


def _experiment_config(args, mode):
    file_values = parse_config_file(args.config) if args.config else {}
    overrides = {"mode": mode}
    for name in _EXPERIMENT_FIELDS:
        val = getattr(args, name, None)
        if val is not None:
            overrides[name] = val
    return config_from_sources(file_values, overrides)


def _run_trace_command(args, mode):
    config = _experiment_config(args, mode)
    trace = run_experiment(config)
    for key, val in sorted(trace.info.items()):
        print(f"{key} = {val}")
    print(f"rows = {len(trace.k)}, final mean gap = {trace.mean_gap[-1]:.6g}")
    if config.out:
        write_csv(trace, config.out)
        print(f"wrote {config.out}")
    if config.svg:
        render_svg(trace, config.svg, log_y=config.log_y)
        print(f"wrote {config.svg}")
    return 0


def _run_diag_command(args):
    result = run_diagnostics(_experiment_config(args, "diag"))
    m = result["dim"]
    print(f"dim = {m}, samples = {result['samples']}")
    print(f"unbiasedness rel L2 error = {result['rel_err']:.4g}")
    print(f"second-moment ratio = {result['second_moment_ratio']:.6g} "
          f"(Gaussian exact value m+2 = {result['gaussian_exact']})")
    verdict = "PASS" if result["passed"] else "FAIL"
    print(f"bound check: {result['second_moment_ratio']:.6g} <= m+4 = "
          f"{result['bound']} -> {verdict}")
    return 0


def _run_bounds_command(args):
    alpha = 1.0 / (args.beta * (args.m + 4)) if args.alpha == "auto" else args.alpha
    try:
        inputs = bnd.BoundInputs(mu=args.mu, beta=args.beta, dim=args.m,
                                 alpha=alpha, ell=args.inner, eta0=args.eta0,
                                 eta_star=args.eta_star, gap0=args.gap0)
        gamma = args.gamma if args.gamma is not None else bnd.default_gamma(inputs)
        limsup = bnd.tracking_limsup(inputs, gamma)
        rows = [(k, bnd.tracking_bound(k, inputs, gamma)) for k in range(args.steps)]
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    print(f"mu = {args.mu}, beta = {args.beta}, m = {args.m}, ell = {args.inner}, "
          f"alpha = {alpha:.10g}, gamma = {gamma:.10g}")
    print(f"limsup term = {limsup:.10g}")
    print("k,bound")
    for k, val in rows:
        print(f"{k},{val:.10g}")
    return 0


def cli_main(argv):
    parser = _build_parser()
    if not argv:
        parser.print_usage(sys.stderr)
        return 1
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            return 1
        if args.command == "bounds":
            return _run_bounds_command(args)
        if args.command == "diag":
            return _run_diag_command(args)
        return _run_trace_command(args, args.command)
    except SystemExit as exc:  # argparse --help
        return int(exc.code or 0)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DivergenceError as exc:
        print(f"divergence: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
