"""AR(p) outer loop: build model, select step, classify by rho, adapt sigma.

Success classification follows the adaptive scheme: with predicted decrease
t(x_k) - t(y_k) and actual decrease f(x_k) - f(y_k),

    rho >= eta2           very successful: accept step, sigma *= gamma1
    eta1 <= rho < eta2    successful:      accept step, sigma unchanged
    rho < eta1            unsuccessful:    reject step, sigma *= gamma2

Both numerator and denominator of rho are assembled from expansion-point-
centered differences, never by subtracting two nearly equal totals; this is
what lets runs push iterates to distances ~1e-100 from a minimizer with a
nonzero optimal value at a few hundred bits of working precision.
"""

from .errors import ContractViolation, DomainError
from .model import RegularizedModel, build_taylor, model_decrease
from .precision import Real, _as_real
from .subsolver import (ClosedFormExampleB, GlobalMin, LocalComponent,
                        NearestToRef, select)

__all__ = [
    "StopRule",
    "ArpConfig",
    "IterationRecord",
    "Trace",
    "compute_rho",
    "arp_step",
    "run",
    "sigma_max_bound",
    "VERY_SUCCESSFUL",
    "SUCCESSFUL",
    "UNSUCCESSFUL",
]

VERY_SUCCESSFUL = "very_successful"
SUCCESSFUL = "successful"
UNSUCCESSFUL = "unsuccessful"

STATUS_LETTER = {VERY_SUCCESSFUL: "V", SUCCESSFUL: "S", UNSUCCESSFUL: "U"}
LETTER_STATUS = {v: k for k, v in STATUS_LETTER.items()}


class StopRule:
    """Termination criteria; an exact zero gradient always terminates."""

    def __init__(self, grad_tol=None, dist_tol=None):
        self.grad_tol = _as_real(grad_tol) if grad_tol is not None else None
        self.dist_tol = _as_real(dist_tol) if dist_tol is not None else None

    def check(self, f, x, grad):
        if grad.is_zero():
            return "zero_gradient"
        if self.grad_tol is not None and abs(grad) < self.grad_tol:
            return "grad_tol"
        if self.dist_tol is not None:
            if f.metadata is None:
                raise DomainError("dist_tol stop rule requires metadata x*")
            if abs(x - f.metadata.x_star) < self.dist_tol:
                return "dist_tol"
        return None


class ArpConfig:
    """Parameters of the adaptive regularization loop."""

    def __init__(self, p, sigma0, policy, eta1="0.5", eta2=None,
                 gamma1="0.5", gamma2=2, theta=0, max_iterations=200,
                 stop=None, sigma_min=None):
        self.p = int(p)
        self.eta1 = _as_real(eta1)
        self.eta2 = _as_real(eta2) if eta2 is not None else self.eta1
        self.gamma1 = _as_real(gamma1)
        self.gamma2 = _as_real(gamma2)
        self.theta = _as_real(theta)
        self.sigma0 = _as_real(sigma0)
        self.policy = policy
        self.max_iterations = int(max_iterations)
        self.stop = stop if stop is not None else StopRule()
        self.sigma_min = _as_real(sigma_min) if sigma_min is not None else None
        self._validate()

    def _validate(self):
        if self.p < 2:
            raise DomainError("p must be >= 2")
        if not (Real(0) < self.eta1 and self.eta1 <= self.eta2
                and self.eta2 < 1):
            raise DomainError("need 0 < eta1 <= eta2 < 1")
        if not (Real(0) < self.gamma1 and self.gamma1 <= 1):
            raise DomainError("need 0 < gamma1 <= 1")
        if not (self.gamma2 > 1):
            raise DomainError("need gamma2 > 1")
        if self.theta < 0:
            raise DomainError("need theta >= 0")
        if not (self.sigma0 > 0):
            raise DomainError("need sigma0 > 0")
        if self.max_iterations < 1:
            raise DomainError("need max_iterations >= 1")


class IterationRecord:
    """One outer iteration: the state it saw and the step it proposed."""

    __slots__ = ("k", "x", "f_value", "grad_norm", "sigma", "y", "rho",
                 "status", "step_norm", "taylor_decrease")

    def __init__(self, k, x, f_value, grad_norm, sigma, y, rho, status,
                 step_norm, taylor_decrease):
        self.k = k
        self.x = x
        self.f_value = f_value
        self.grad_norm = grad_norm
        self.sigma = sigma
        self.y = y
        self.rho = rho
        self.status = status
        self.step_norm = step_norm
        self.taylor_decrease = taylor_decrease

    @property
    def accepted(self):
        return self.status != UNSUCCESSFUL

    def __repr__(self):
        return "IterationRecord(k=%d, status=%s, sigma=%r)" % (
            self.k, STATUS_LETTER[self.status], self.sigma)


class Trace:
    """Complete run history plus final state."""

    def __init__(self, config, objective_name, records, termination,
                 final_x, final_sigma, solver="arp"):
        self.config = config
        self.objective_name = objective_name
        self.records = records
        self.termination = termination
        self.final_x = final_x
        self.final_sigma = final_sigma
        self.solver = solver

    def iterates(self):
        """x_0, x_1, ..., x_N (one per iteration, plus the final point)."""
        return [r.x for r in self.records] + [self.final_x]

    def __len__(self):
        return len(self.records)

    def __repr__(self):
        return "Trace(%s, %d records, termination=%s)" % (
            self.objective_name, len(self.records), self.termination)


def compute_rho(f, m, y):
    """rho = (f(x_k) - f(y)) / (t(x_k) - t(y)) with both differences in
    cancellation-safe form; a nonpositive denominator is a subsolver
    contract violation."""
    x = m.expansion_point
    t_dec, _m_dec = model_decrease(m, y)
    if not (t_dec > 0):
        raise ContractViolation(
            "nonpositive predicted decrease %s" % t_dec)
    return f.value_gap(x, y) / t_dec


def arp_step(state, cfg, f):
    """One full iteration of the outer loop; returns (new_state, record)."""
    x, sigma, k = state
    taylor = build_taylor(f, x, cfg.p)
    m = RegularizedModel(taylor, sigma)
    cand = select(cfg.policy, m, cfg.theta, objective=f)
    y = cand.point
    t_dec = taylor.decrease_from_center(y)
    if not (t_dec > 0):
        raise ContractViolation("nonpositive predicted decrease %s" % t_dec)
    rho = f.value_gap(x, y) / t_dec

    if rho >= cfg.eta2:
        status = VERY_SUCCESSFUL
        new_x, new_sigma = y, sigma * cfg.gamma1
    elif rho >= cfg.eta1:
        status = SUCCESSFUL
        new_x, new_sigma = y, sigma
    else:
        status = UNSUCCESSFUL
        new_x, new_sigma = x, sigma * cfg.gamma2
    if cfg.sigma_min is not None and new_sigma < cfg.sigma_min:
        new_sigma = cfg.sigma_min

    record = IterationRecord(
        k=k, x=x, f_value=f.value(x), grad_norm=abs(f.gradient(x)),
        sigma=sigma, y=y, rho=rho, status=status,
        step_norm=abs(cand.step), taylor_decrease=t_dec)
    return (new_x, new_sigma, k + 1), record


def run(cfg, f, x0):
    """Iterate arp_step until the stop rule fires or the budget runs out."""
    x = _as_real(x0)
    sigma = cfg.sigma0
    records = []
    termination = "max_iterations"
    k = 0
    while True:
        reason = cfg.stop.check(f, x, f.gradient(x))
        if reason is not None:
            termination = reason
            break
        if k >= cfg.max_iterations:
            break
        (x, sigma, k), record = arp_step((x, sigma, k), cfg, f)
        records.append(record)
    return Trace(cfg, f.name, records, termination, x, sigma)


def sigma_max_bound(cfg, L_p):
    """Ceiling max(sigma0, gamma2 * L_p / ((1 - eta1) (p+1)!)) that every
    trace must respect."""
    L_p = _as_real(L_p)
    if not (L_p > 0):
        raise DomainError("L_p must be positive")
    fact = 1
    for i in range(2, cfg.p + 2):
        fact *= i
    bound = cfg.gamma2 * L_p / ((1 - cfg.eta1) * fact)
    return bound if bound > cfg.sigma0 else cfg.sigma0


def policy_from_name(name, f=None, ref=None, inner_tol=None):
    """Build a SelectionPolicy from its config-file name."""
    if name == "global":
        return GlobalMin()
    if name == "component":
        return LocalComponent(inner_tol=inner_tol)
    if name == "nearest_ref":
        if ref is None:
            if f is None or f.metadata is None:
                raise DomainError("nearest_ref policy needs a reference point")
            ref = f.metadata.x_star
        return NearestToRef(ref)
    if name == "closed_form_b":
        return ClosedFormExampleB()
    raise DomainError("unknown policy %r" % (name,))
