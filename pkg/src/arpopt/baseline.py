"""Pure Newton iteration used as the comparison baseline.

No globalization: x_{k+1} = x_k - f'(x_k)/f''(x_k).  The runs of interest
start close to a minimizer where this is well behaved; a singular second
derivative at an iterate is an error.  Traces share the AR(p) format so the
same analysis and serialization code applies (sigma is recorded as 0 and
every step as successful with rho = 1).
"""

from .errors import ContractViolation
from .driver import IterationRecord, StopRule, Trace, SUCCESSFUL
from .precision import Real, _as_real

__all__ = ["NewtonConfig", "newton_run"]


class NewtonConfig:
    def __init__(self, max_iterations=200, stop=None):
        self.max_iterations = int(max_iterations)
        self.stop = stop if stop is not None else StopRule()


def newton_run(f, x0, cfg):
    """Run pure Newton from x0, producing a Trace."""
    x = _as_real(x0)
    records = []
    termination = "max_iterations"
    zero = Real(0)
    one = Real(1)
    k = 0
    while True:
        grad = f.gradient(x)
        reason = cfg.stop.check(f, x, grad)
        if reason is not None:
            termination = reason
            break
        if k >= cfg.max_iterations:
            break
        hess = f.derivative(2, x)
        if hess.is_zero():
            raise ContractViolation(
                "singular second derivative at iteration %d" % k)
        y = x - grad / hess
        records.append(IterationRecord(
            k=k, x=x, f_value=f.value(x), grad_norm=abs(grad),
            sigma=zero, y=y, rho=one, status=SUCCESSFUL,
            step_norm=abs(y - x), taylor_decrease=f.value_gap(x, y)))
        x = y
        k += 1
    return Trace(None, f.name, records, termination, x, zero, solver="newton")
