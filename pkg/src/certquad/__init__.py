"""Quadrature rules with a priori error certificates."""

from .adaptive import AdaptiveConfig, AdaptiveResult, integrate_adaptive
from .errors import *  # noqa: F401,F403
from .expr import Expression, derivatives, differentiate, evaluate, parse
from .kernel import Interval, bound_factor, kernel_value, moment_integral, optimal_point
from .probability import Distribution, expectation, expectation_interval, verify_prob_inequality
from .quadrature import (
    LEFT,
    MIDPOINT,
    OPTIMAL,
    Partition,
    QuadratureResult,
    XiChoice,
    baseline_midpoint,
    bound_single,
    integrate_composite,
    integrate_uniform,
    perturbed_trapezoid,
    rule_single,
)
from .verify import (
    VerificationReport,
    estimate_sup_norm,
    reference_integral,
    sharpness_scan,
    verify_inequality,
)

__version__ = "0.1.0"
