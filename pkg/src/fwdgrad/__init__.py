"""Forward-gradient optimization for static and time-varying objectives.

Directional derivatives come from a single dual-number forward pass; the
estimator <grad f(x), u> u with Gaussian u drives plain, online, and
proximal descent schemes, with closed-form evaluators for their
convergence and tracking guarantees and a seeded experiment harness.
"""

from .bounds import (BoundInputs, default_gamma, descent_coefficient,
                     grad_mapping_sq, path_radius, prox_limsup_gap,
                     prox_pl_ratio, prox_tracking_bound,
                     quadratic_growth_margins, static_gap_bound,
                     tracking_bound, tracking_limsup)
from .dual import (Dual, ScalarFunction, affine_map, directional_derivative,
                   gradient_exact, half_sqnorm)
from .estimator import ForwardGradientSample, forward_gradient, moment_diagnostics
from .harness import (AggregateTrace, ConfigError, ExperimentConfig,
                      parse_config_file, read_csv, run_diagnostics,
                      run_experiment, write_csv)
from .optim import (DivergenceError, ProxSolveResult, TrackingTrace, fgd_step,
                    prox_apply, prox_fgd_step, prox_gradient_exact, run_online,
                    run_prox_online, run_static)
from .problems import (BoxProjection, CompositeObjective, DriftingLsqGenerator,
                       DriftingLsqObjective, HorizonExceededError, L1Norm,
                       LinearLsqInstance, StaticLsqObjective, ZeroFunction,
                       dist_to_solution_set, l1_composite, lsq_constants,
                       make_drifting_generator, measure_drift)
from .sampling import DirectionSampler, substream
from .svgplot import render_svg

__version__ = "0.1.0"
