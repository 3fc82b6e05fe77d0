"""Adaptive p-th order regularization (AR(p)) in arbitrary precision.

A small research library for minimizing univariate polynomials with the
adaptive regularization loop: build the degree-p Taylor model, add a
sigma-weighted (p+1)-st power regularizer, step to a model minimizer chosen
by a pluggable policy, and adapt sigma from the achieved-vs-predicted
decrease ratio.  All arithmetic runs at a configurable binary precision,
and every difference that could cancel catastrophically is evaluated in an
expansion-point-centered form.
"""

from .errors import (ArpoptError, AnalysisError, BracketError, ConfigError,
                     ContractViolation, DegenerateModelError, DescentStallError,
                     DomainError, OracleError, PrecisionMixError,
                     SubsolverError, ThetaConditionError)
from .precision import (BACKEND, DEFAULT_BITS, PrecisionConfig, Real,
                        active_config, log10_abs, set_precision, signed_power,
                        ulp)
from .objective import (ConvexityMeta, ObjectiveSpec, Polynomial1D,
                        audit_uniform_convexity, builtin_example_A,
                        builtin_example_B, finite_difference_check)
from .model import (RegularizedModel, TaylorModel, audit_taylor_bounds,
                    build_taylor, eval_model, grad_model, model_decrease)
from .subsolver import (CandidateMinimizer, ClosedFormExampleB, GlobalMin,
                        LocalComponent, NearestToRef, critical_points_1d,
                        descend_component, select, verify_theta_condition)
from .driver import (SUCCESSFUL, UNSUCCESSFUL, VERY_SUCCESSFUL, ArpConfig,
                     IterationRecord, StopRule, Trace, arp_step, compute_rho,
                     policy_from_name, run, sigma_max_bound)
from .baseline import NewtonConfig, newton_run
from .analysis import (CycleReport, OrderEstimate, TraceAudit, audit_trace,
                       detect_cycle, estimate_order, estimate_sigma_star,
                       trace_errors)

__version__ = "0.1.0"
