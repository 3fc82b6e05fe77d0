"""Objective functions with exact derivative oracles.

Ships the two built-in 1-D example objectives used throughout the test
problems (a nondegenerate quartic and a degenerate power-sum family),
supports user polynomials via Polynomial1D, and carries optional ground-truth
metadata (minimizer, convexity order, Lipschitz constant) consumed by the
analysis audits.

For polynomial objectives the function-value difference f(x) - f(y) is also
available in an exact translated form (value_gap) that avoids the
catastrophic cancellation of subtracting two nearly equal function values;
the outer loop relies on this when iterates are within ~1e-80 of a minimizer
with f* != 0.
"""

import math
from fractions import Fraction

from .errors import DomainError, OracleError
from .precision import Real, _as_real

__all__ = [
    "Polynomial1D",
    "ConvexityMeta",
    "ObjectiveSpec",
    "builtin_example_A",
    "builtin_example_B",
    "finite_difference_check",
    "audit_uniform_convexity",
    "ConvexityAudit",
]


class Polynomial1D:
    """Dense univariate polynomial, coefficients in ascending degree."""

    def __init__(self, coefficients):
        coeffs = [_as_real(c) for c in coefficients]
        while len(coeffs) > 1 and coeffs[-1].is_zero():
            coeffs.pop()
        if not coeffs:
            coeffs = [Real(0)]
        self.coefficients = coeffs

    @property
    def degree(self):
        if len(self.coefficients) == 1 and self.coefficients[0].is_zero():
            return 0
        return len(self.coefficients) - 1

    def __call__(self, x):
        x = _as_real(x)
        acc = Real(0)
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def derivative(self):
        cs = self.coefficients
        if len(cs) == 1:
            return Polynomial1D([Real(0)])
        return Polynomial1D([cs[j] * j for j in range(1, len(cs))])

    def taylor_coefficients(self, x):
        """Coefficients c_j = f^(j)(x)/j! of the shifted polynomial, all j."""
        x = _as_real(x)
        out = []
        poly = self
        fact = 1
        for j in range(len(self.coefficients)):
            out.append(poly(x) / fact)
            poly = poly.derivative()
            fact *= j + 1
        return out

    def __repr__(self):
        return "Polynomial1D(degree=%d)" % self.degree


class ConvexityMeta:
    """Ground-truth constants around a known local minimizer.

    q is the uniform-convexity order, mu_q/r_q its modulus and radius, L_p
    the Lipschitz constant of the p-th derivative on the region of interest,
    nu a local bound on the second derivative.
    """

    def __init__(self, x_star, f_star, q, mu_q, r_q, L_p, nu):
        self.x_star = _as_real(x_star)
        self.f_star = _as_real(f_star)
        self.q = int(q)
        self.mu_q = _as_real(mu_q)
        self.r_q = _as_real(r_q)
        self.L_p = _as_real(L_p)
        self.nu = _as_real(nu)
        if self.q < 2:
            raise DomainError("convexity order q must be >= 2")
        for name in ("mu_q", "r_q", "L_p", "nu"):
            if not (getattr(self, name) > 0):
                raise DomainError("%s must be strictly positive" % name)


class ObjectiveSpec:
    """An objective with an exact derivative oracle.

    derivative_oracle(j, x) returns the j-th derivative at x (the value for
    j = 0).  p_max is the highest exactly available order (None = every
    order, e.g. polynomials).  The optional `polynomial` field enables exact
    translated evaluation of value differences.
    """

    def __init__(self, name, derivative_oracle, p_max=None, dimension=1,
                 metadata=None, polynomial=None):
        self.name = name
        self._oracle = derivative_oracle
        self.p_max = p_max
        self.dimension = dimension
        self.metadata = metadata
        self.polynomial = polynomial

    @classmethod
    def from_polynomial(cls, name, poly, metadata=None):
        if not isinstance(poly, Polynomial1D):
            poly = Polynomial1D(poly)
        derivs = [poly]

        def oracle(j, x):
            if j < 0:
                raise OracleError("derivative order must be >= 0")
            if j > poly.degree:
                return Real(0)
            while len(derivs) <= j:
                derivs.append(derivs[-1].derivative())
            return derivs[j](x)

        return cls(name, oracle, p_max=None, dimension=1, metadata=metadata,
                   polynomial=poly)

    def derivative(self, order, x):
        if self.p_max is not None and order > self.p_max:
            raise OracleError(
                "objective %r provides derivatives up to order %d, not %d"
                % (self.name, self.p_max, order))
        return self._oracle(order, _as_real(x))

    def value(self, x):
        return self.derivative(0, x)

    def gradient(self, x):
        return self.derivative(1, x)

    def value_gap(self, x, y):
        """f(x) - f(y), cancellation-safe for polynomial objectives.

        For a polynomial the identity f(y) = sum_j c_j(x) (y-x)^j is exact,
        so f(x) - f(y) = -sum_{j>=1} c_j(x) (y-x)^j; every term is evaluated
        at its own scale and no large-against-large subtraction occurs.
        """
        x = _as_real(x)
        y = _as_real(y)
        if self.polynomial is None:
            return self.value(x) - self.value(y)
        cs = self.polynomial.taylor_coefficients(x)
        s = y - x
        acc = Real(0)
        for c in reversed(cs[1:]):
            acc = acc * s + c
        return -(acc * s)


def builtin_example_A():
    """Nondegenerate quartic 3x^4 - 4x^3 with minimizer x* = 1, f* = -1.

    The third derivative has (global) Lipschitz constant 72; around x* the
    function is strongly convex (q = 2) with modulus 4 on a radius-0.1 ball.
    """
    poly = Polynomial1D([0, 0, 0, -4, 3])
    meta = ConvexityMeta(x_star=1, f_star=-1, q=2, mu_q=4, r_q=Real("0.1"),
                         L_p=72, nu=30)
    return ObjectiveSpec.from_polynomial("exampleA", poly, meta)


def builtin_example_B(p, q):
    """Degenerate family x^q/q + x^(p+1)/(p+1) with minimizer x* = 0.

    Requires q even (so x* is a minimizer) and p > q - 1.  The p-th
    derivative is Lipschitz with constant p!; the function is uniformly
    convex of order q near 0.  The modulus mu_q = 3/16 on radius 1/2 is
    chosen so that *all* audited convexity inequalities hold with margin;
    the pair-form inequality is the binding one, with infimum of
    <grad difference, x - y> / |x - y|^q about 0.1905 over the ball for
    p = q = 4 (attained with x at the boundary -1/2).
    """
    p = int(p)
    q = int(q)
    if q < 2 or q % 2 != 0:
        raise DomainError("q must be even and >= 2, got %r" % q)
    if p <= q - 1:
        raise DomainError("p must exceed q - 1, got p=%r q=%r" % (p, q))
    coeffs = [Real(0)] * (p + 2)
    coeffs[q] = Real(1) / q
    coeffs[p + 1] = Real(1) / (p + 1)
    poly = Polynomial1D(coeffs)
    meta = ConvexityMeta(x_star=0, f_star=0, q=q, mu_q=Fraction(3, 16),
                         r_q=Fraction(1, 2), L_p=math.factorial(p), nu=2)
    spec = ObjectiveSpec.from_polynomial("exampleB(p=%d,q=%d)" % (p, q),
                                         poly, meta)
    spec.example_b_orders = (p, q)
    return spec


def finite_difference_check(f, order, x, h):
    """|oracle(order, x) - central difference of oracle(order-1)| at step h."""
    if order < 1:
        raise DomainError("order must be >= 1")
    x = _as_real(x)
    h = _as_real(h)
    if not (h > 0):
        raise DomainError("h must be positive")
    approx = (f.derivative(order - 1, x + h) - f.derivative(order - 1, x - h)) \
        / (2 * h)
    return abs(f.derivative(order, x) - approx)


class ConvexityAudit:
    """Worst margins of the uniform-convexity inequalities over a sample.

    Each margin is RHS-vs-LHS slack of one inequality; a negative value
    flags metadata inconsistent with the sampled behaviour.
    """

    def __init__(self, margins, samples):
        self.margins = margins
        self.samples = samples

    @property
    def ok(self):
        return all(m >= 0 for m in self.margins.values())

    def worst(self):
        name = min(self.margins, key=lambda k: float(self.margins[k]))
        return name, self.margins[name]

    def __repr__(self):
        inner = ", ".join("%s=%.3e" % (k, float(v))
                          for k, v in self.margins.items())
        return "ConvexityAudit(ok=%s, %s)" % (self.ok, inner)


def audit_uniform_convexity(f, samples=41):
    """Sample B(x*, r_q) and report worst margins of the convexity bounds.

    Checked inequalities (1-D forms), for all sampled x (and pairs x, y):
      pair_gradient   (f'(x)-f'(y))(x-y) >= mu |x-y|^q
      growth          f(x)-f*           >= (mu/q) |x-x*|^q
      gradient_lower  |f'(x)|           >= mu |x-x*|^(q-1)
      gap_by_gradient f(x)-f*           <= (q-1)/q (1/mu)^(1/(q-1)) |f'(x)|^(q/(q-1))
      gap_upper       f(x)-f*           <= (nu/2) |x-x*|^2
      gradient_upper  |f'(x)|           <= nu |x-x*|
    """
    meta = f.metadata
    if meta is None:
        raise OracleError("audit_uniform_convexity requires metadata")
    if samples < 3:
        raise DomainError("need at least 3 samples")
    q = meta.q
    mu = meta.mu_q
    xs = []
    for i in range(samples):
        t = Real(2 * i) / (samples - 1) - 1     # [-1, 1]
        xs.append(meta.x_star + meta.r_q * t)

    vals = [f.value_gap(x, meta.x_star) for x in xs]   # f(x) - f*
    grads = [f.gradient(x) for x in xs]
    dists = [abs(x - meta.x_star) for x in xs]

    inf = None

    def keep(cur, new):
        return new if cur is None or new < cur else cur

    m_pair = None
    for i in range(len(xs)):
        for j in range(i + 1, len(xs)):
            step = abs(xs[i] - xs[j])
            lhs = (grads[i] - grads[j]) * (xs[i] - xs[j])
            m_pair = keep(m_pair, lhs - mu * step ** q)

    m_growth = m_grad_lo = m_gap_grad = m_gap_up = m_grad_up = inf
    exp_gap = Fraction(q, q - 1)
    coef_gap = (Real(q - 1) / q) * (1 / mu) ** Fraction(1, q - 1)
    for gap, g, d in zip(vals, grads, dists):
        m_growth = keep(m_growth, gap - (mu / q) * d ** q)
        m_grad_lo = keep(m_grad_lo, abs(g) - mu * d ** (q - 1))
        m_gap_grad = keep(m_gap_grad, coef_gap * abs(g) ** exp_gap - gap)
        m_gap_up = keep(m_gap_up, (meta.nu / 2) * d ** 2 - gap)
        m_grad_up = keep(m_grad_up, meta.nu * d - abs(g))

    margins = {
        "pair_gradient": m_pair,
        "growth": m_growth,
        "gradient_lower": m_grad_lo,
        "gap_by_gradient": m_gap_grad,
        "gap_upper": m_gap_up,
        "gradient_upper": m_grad_up,
    }
    return ConvexityAudit(margins, samples)
