"""Taylor and regularized models.

TaylorModel is the degree-p expansion of the objective at the current
iterate; RegularizedModel adds the sigma * |y - x|^(p+1) term.  In 1-D the
regularizer is piecewise polynomial, so each model exposes its polynomial
branches (restrictions to y >= x and y <= x) -- the subsolver isolates the
real roots of the branch derivatives to enumerate every critical point.

Value *differences* of models are computed from the expansion point outward
(sum of c_j s^j terms, each at its own scale) rather than by subtracting two
nearly equal model values; this keeps predicted decreases meaningful when
steps shrink far below the unit-magnitude function values.
"""

from .errors import DomainError, OracleError
from .precision import Real, _as_real, signed_power

__all__ = [
    "TaylorModel",
    "RegularizedModel",
    "build_taylor",
    "eval_model",
    "grad_model",
    "model_decrease",
    "audit_taylor_bounds",
]


def _factorial(n):
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


class TaylorModel:
    """Degree-p Taylor expansion t(y) = sum_j c_j (y - x)^j, c_j = f^(j)(x)/j!."""

    def __init__(self, expansion_point, order, terms):
        self.expansion_point = _as_real(expansion_point)
        self.order = int(order)
        self.terms = [_as_real(t) for t in terms]
        if len(self.terms) != self.order + 1:
            raise OracleError("expected %d Taylor terms, got %d"
                              % (self.order + 1, len(self.terms)))

    def value(self, y):
        s = _as_real(y) - self.expansion_point
        acc = Real(0)
        for c in reversed(self.terms):
            acc = acc * s + c
        return acc

    def gradient(self, y):
        s = _as_real(y) - self.expansion_point
        acc = Real(0)
        for j in range(self.order, 0, -1):
            acc = acc * s + self.terms[j] * j
        return acc

    def second(self, y):
        s = _as_real(y) - self.expansion_point
        acc = Real(0)
        for j in range(self.order, 1, -1):
            acc = acc * s + self.terms[j] * (j * (j - 1))
        return acc

    def decrease_from_center(self, y):
        """t(x) - t(y) as -sum_{j>=1} c_j s^j (no cancellation against c_0)."""
        s = _as_real(y) - self.expansion_point
        acc = Real(0)
        for c in reversed(self.terms[1:]):
            acc = acc * s + c
        return -(acc * s)


class RegularizedModel:
    """m(y) = t(y) + sigma * |y - x|^(p+1)."""

    def __init__(self, taylor, sigma):
        self.taylor = taylor
        self.sigma = _as_real(sigma)
        if not (self.sigma > 0):
            raise DomainError("sigma must be positive")
        self.power = taylor.order + 1

    @property
    def expansion_point(self):
        return self.taylor.expansion_point

    def value(self, y):
        s = _as_real(y) - self.expansion_point
        return self.taylor.value(y) + self.sigma * abs(s) ** self.power

    def gradient(self, y):
        s = _as_real(y) - self.expansion_point
        reg = self.sigma * self.power * signed_power(s, self.power - 1)
        return self.taylor.gradient(y) + reg

    def second(self, y):
        s = _as_real(y) - self.expansion_point
        reg = self.sigma * self.power * (self.power - 1) \
            * abs(s) ** (self.power - 2)
        return self.taylor.second(y) + reg

    def decrease_from_center(self, y):
        """m(x) - m(y), assembled term-by-term from the expansion point."""
        s = _as_real(y) - self.expansion_point
        return self.taylor.decrease_from_center(y) \
            - self.sigma * abs(s) ** self.power

    def value_gap(self, y1, y2):
        """m(y1) - m(y2) via the two from-center decreases; safe even when
        both values agree to hundreds of digits."""
        return self.decrease_from_center(y2) - self.decrease_from_center(y1)

    def branch_coefficients(self, branch):
        """Coefficients (in s = y - x, ascending) of m on one branch.

        branch = +1 restricts to s >= 0, branch = -1 to s <= 0; there
        |s|^(p+1) equals s^(p+1) or -s^(p+1) depending on the parity of
        p + 1.  When p + 1 is even both branches coincide.
        """
        if branch not in (1, -1):
            raise ValueError("branch must be +1 or -1")
        coeffs = list(self.taylor.terms) + [Real(0)] * max(
            0, self.power + 1 - len(self.taylor.terms))
        sign = 1 if (branch == 1 or self.power % 2 == 0) else -1
        coeffs[self.power] = coeffs[self.power] + sign * self.sigma
        return coeffs

    def branches_coincide(self):
        return self.power % 2 == 0


def build_taylor(f, x, p):
    """Taylor model of f at x with order p, terms from the derivative oracle."""
    p = int(p)
    if p < 1:
        raise DomainError("Taylor order must be >= 1")
    if f.p_max is not None and p > f.p_max:
        raise OracleError("objective provides derivatives only up to order %d"
                          % f.p_max)
    x = _as_real(x)
    terms = [f.derivative(j, x) / _factorial(j) for j in range(p + 1)]
    return TaylorModel(x, p, terms)


def eval_model(m, y):
    return m.value(y)


def grad_model(m, y):
    return m.gradient(y)


def model_decrease(m, y):
    """(taylor_decrease, model_decrease) at y.

    taylor_decrease is t(x) - t(y); model_decrease is m(x) - m(y) =
    taylor_decrease - sigma |y - x|^(p+1).  Both come from the safe
    from-center form, equivalent to (m(x) - m(y)) + sigma|y-x|^(p+1)
    but immune to the cancellation of the direct subtraction.
    """
    t_dec = m.taylor.decrease_from_center(y)
    s = _as_real(y) - m.expansion_point
    return t_dec, t_dec - m.sigma * abs(s) ** m.power


def audit_taylor_bounds(f, x, y, p):
    """Margins of the Taylor remainder bounds at (x, y).

    Returns (value_margin, gradient_margin, second_margin) for
      |f(y) - t(y)|    <= L_p/(p+1)! |y-x|^(p+1)
      |f'(y) - t'(y)|  <= L_p/p!     |y-x|^p
      |f''(y) - t''(y)|<= L_p/(p-1)! |y-x|^(p-1)
    all of which must be nonnegative when metadata L_p is valid.
    """
    if f.metadata is None:
        raise OracleError("audit_taylor_bounds requires metadata with L_p")
    L = f.metadata.L_p
    x = _as_real(x)
    y = _as_real(y)
    t = build_taylor(f, x, p)
    step = abs(y - x)
    # f(y) - t(y) = (f(y) - f(x)) + (t(x) - t(y)) since t(x) = f(x) exactly;
    # both parts are cancellation-safe from-center differences.
    v = abs(f.value_gap(y, x) + t.decrease_from_center(y)) if f.polynomial \
        else abs(f.value(y) - t.value(y))
    g = abs(f.gradient(y) - t.gradient(y))
    h = abs(f.derivative(2, y) - t.second(y))
    m_v = (L / _factorial(p + 1)) * step ** (p + 1) - v
    m_g = (L / _factorial(p)) * step ** p - g
    m_h = (L / _factorial(p - 1)) * step ** (p - 1) - h
    return m_v, m_g, m_h
