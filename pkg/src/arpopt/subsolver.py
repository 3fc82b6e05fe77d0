"""Inner solver: enumerate/choose minimizers of the regularized model.

In 1-D the model is piecewise polynomial, so all critical points can be
found by isolating the real roots of the branch derivative polynomials
(sign-change bracketing on a grid over a coefficient-based root enclosure,
refined by bisection).  On top of the enumeration sit the selection
policies: the global minimizer, the minimizer reached by monotone descent
from the expansion point (the connected-component choice), the candidate
nearest a reference point, and the closed-form opposite-sign step available
for the degenerate built-in family.

Every selected point is checked against the approximate-minimizer
condition: model decrease plus gradient norm below theta * step^p (with an
ulp-scale slack standing in for "exactly critical" when theta = 0).
"""

from fractions import Fraction

from .errors import (DegenerateModelError, SubsolverError, ThetaConditionError,
                     DescentStallError)
from .precision import Real, _as_real, active_config, signed_power, ulp

__all__ = [
    "CandidateMinimizer",
    "GlobalMin",
    "LocalComponent",
    "NearestToRef",
    "ClosedFormExampleB",
    "critical_points_1d",
    "descend_component",
    "select",
    "verify_theta_condition",
    "default_theta_slack",
]

KIND_MIN = "strict_local_min"
KIND_SADDLE = "saddle_or_max"
KIND_BOUNDARY = "boundary_artifact"


class CandidateMinimizer:
    """A critical point of the model with its classification."""

    def __init__(self, point, model_value, model_grad_norm, kind, step=None,
                 decrease=None, path=None):
        self.point = point
        self.model_value = model_value
        self.model_grad_norm = model_grad_norm
        self.kind = kind
        self.step = step            # point - expansion_point
        self.decrease = decrease    # m(x_k) - m(point), from-center form
        self.path = path            # descent path, when produced by descent

    def __repr__(self):
        return "CandidateMinimizer(%r, kind=%s)" % (self.point, self.kind)


class GlobalMin:
    """Pick the candidate with the lowest model value."""
    name = "global"


class LocalComponent:
    """Monotone descent from x_k: the minimizer of x_k's sublevel component."""
    name = "component"

    def __init__(self, inner_tol=None):
        self.inner_tol = inner_tol


class NearestToRef:
    """Pick the enumerated local minimizer closest to a reference point."""
    name = "nearest_ref"

    def __init__(self, ref):
        self.ref = _as_real(ref)


class ClosedFormExampleB:
    """The explicit opposite-sign step y = -|x|^(p/(q-1)) sign(x).

    Only valid for the degenerate built-in family (builtin_example_B).
    """
    name = "closed_form_b"


def _poly_eval(coeffs, s):
    acc = Real(0)
    for c in reversed(coeffs):
        acc = acc * s + c
    return acc


def _strip(coeffs):
    out = list(coeffs)
    while out and out[-1].is_zero():
        out.pop()
    return out


def _root_bound(coeffs):
    """Cauchy-type enclosure: all real roots lie in [-B, B]."""
    lead = abs(coeffs[-1])
    worst = Real(0)
    for c in coeffs[:-1]:
        r = abs(c) / lead
        if r > worst:
            worst = r
    return worst + 1


def _bisect(coeffs, a, b, fa_sign, bits):
    """Refine a sign-change bracket [a, b] of the polynomial to high
    relative width; the bracket must not straddle zero (0 is a grid node)."""
    for _ in range(bits + 64):
        width = b - a
        scale = max(abs(a), abs(b))
        if width <= scale * Real(2) ** (-(bits - 8)):
            break
        mid = (a + b) / 2
        if mid <= a or mid >= b:
            break
        v = _poly_eval(coeffs, mid)
        sv = v.sign()
        if sv == 0:
            return mid
        if sv == fa_sign:
            a = mid
        else:
            b = mid
    return (a + b) / 2


def _scan_branch(coeffs, lo, hi, bits):
    """All roots of the polynomial (ascending coeffs) on [lo, hi].

    Returns a list of (root, left_sign, right_sign) where the signs are
    those of the polynomial just left/right of the root inside [lo, hi]
    (0 when the root sits at an endpoint of the domain).
    """
    coeffs = _strip(coeffs)
    if not coeffs:
        raise DegenerateModelError("model derivative vanishes identically")
    deg = len(coeffs) - 1
    if deg == 0:
        return []
    n = 64 * deg
    if n % 2:
        n += 1
    nodes = []
    width = hi - lo
    for i in range(n + 1):
        nodes.append(lo + width * i / n)
    # make sure 0 is hit exactly when it is interior (it separates branches
    # and is a legitimate exact critical point when f'(x_k) = 0)
    if lo < 0 < hi:
        nodes = [t for t in nodes if not t.is_zero()]
        nodes.append(Real(0))
        nodes.sort(key=float)
    vals = [_poly_eval(coeffs, t) for t in nodes]
    signs = [v.sign() for v in vals]

    def probe(t, toward):
        """Sign of the polynomial just off a node with exact value 0, on
        the side of `toward`; needed so a root sitting exactly on a node
        does not mask a second root in the adjacent cell."""
        eps = (toward - t) / 1024
        for _ in range(4):
            sg = _poly_eval(coeffs, t + eps).sign()
            if sg != 0:
                return sg
            eps = eps / 1024
        return 0

    # effective signs just right/left of each node (same as the node sign
    # unless the node is an exact zero)
    right_of = list(signs)
    left_of = list(signs)
    for i, sg in enumerate(signs):
        if sg == 0:
            if i + 1 < len(nodes):
                right_of[i] = probe(nodes[i], nodes[i + 1])
            if i > 0:
                left_of[i] = probe(nodes[i], nodes[i - 1])

    roots = []
    for i, (t, sg) in enumerate(zip(nodes, signs)):
        if sg == 0:
            left = left_of[i] if i > 0 else 0
            right = right_of[i] if i + 1 < len(signs) else 0
            roots.append((t, left, right))
    for i in range(len(nodes) - 1):
        sa, sb = right_of[i], left_of[i + 1]
        if sa != 0 and sb != 0 and sa != sb:
            r = _bisect(coeffs, nodes[i], nodes[i + 1], sa, bits)
            roots.append((r, sa, sb))
    roots.sort(key=lambda item: float(item[0]))
    return roots


def critical_points_1d(m):
    """Enumerate all real critical points of the 1-D model.

    Roots of the derivative are isolated per branch (y >= x_k and
    y <= x_k); candidates are classified by the derivative's sign change
    (- to + : strict local minimum) and returned sorted by model value,
    ties broken by distance to the expansion point.
    """
    cfg = active_config()
    bits = cfg.mantissa_bits
    x = m.expansion_point

    def deriv(coeffs):
        return [coeffs[j] * j for j in range(1, len(coeffs))]

    found = {}  # exact decimal of s -> (s, left_sign, right_sign)

    def add(s, left, right):
        key = s.to_decimal()
        if key in found:
            pl, pr = found[key][1], found[key][2]
            found[key] = (s, pl if pl != 0 else left, pr if pr != 0 else right)
        else:
            found[key] = (s, left, right)

    if m.branches_coincide():
        d = _strip(deriv(m.branch_coefficients(1)))
        if not d:
            raise DegenerateModelError("model derivative vanishes identically")
        bound = _root_bound(d)
        for s, left, right in _scan_branch(d, -bound, bound, bits):
            add(s, left, right)
    else:
        d_pos = _strip(deriv(m.branch_coefficients(1)))
        d_neg = _strip(deriv(m.branch_coefficients(-1)))
        if not d_pos and not d_neg:
            raise DegenerateModelError("model derivative vanishes identically")
        if d_pos:
            for s, left, right in _scan_branch(d_pos, Real(0), _root_bound(d_pos), bits):
                add(s, left, right)
        if d_neg:
            for s, left, right in _scan_branch(d_neg, -_root_bound(d_neg), Real(0), bits):
                add(s, left, right)

    out = []
    for s, left, right in found.values():
        y = x + s
        if left < 0 and right > 0:
            kind = KIND_MIN
        elif left == 0 or right == 0:
            # endpoint of the scanned enclosure or unresolved neighbour sign
            kind = KIND_MIN if (left < 0 or right > 0) else KIND_BOUNDARY
        else:
            kind = KIND_SADDLE
        out.append(CandidateMinimizer(
            point=y,
            model_value=m.value(y),
            model_grad_norm=abs(m.gradient(y)),
            kind=kind,
            step=s,
            decrease=m.decrease_from_center(y),
        ))
    out.sort(key=lambda c: (float(c.model_value), abs(float(c.step))))
    return out


def default_theta_slack(m, y):
    """Slack standing in for 'critical to working precision' when theta = 0:
    2^(-mantissa_bits/2) * max(1, |y - x_k|^p)."""
    bits = active_config().mantissa_bits
    s = abs(_as_real(y) - m.expansion_point)
    base = Real(2) ** (-(bits // 2))
    if s.is_zero():
        return base
    sp = s ** m.taylor.order
    return base * (sp if sp > 1 else Real(1))


def verify_theta_condition(m, y, theta, slack=None):
    """Approximate-minimizer test: m(y) < m(x_k) and
    |m'(y)| <= theta * |x_k - y|^p + slack."""
    y = _as_real(y)
    if slack is None:
        slack = default_theta_slack(m, y)
    dec = m.decrease_from_center(y)
    if not (dec > 0):
        return False
    s = abs(y - m.expansion_point)
    theta = _as_real(theta)
    return abs(m.gradient(y)) <= theta * s ** m.taylor.order + slack


def descend_component(m, start=None, inner_tol=None, theta=0):
    """Strictly monotone damped-Newton descent on m from the expansion point.

    Backtracks (halving) until each step strictly decreases the model, so
    the iterates can never leave the connected component of the sublevel
    set containing x_k.  Terminates once |m'(y)| <= max(theta |y-x_k|^p,
    inner_tol); a step underflow before that is reported as a stall.
    """
    x = m.expansion_point
    y = _as_real(start) if start is not None else x
    g_start = m.gradient(y)
    if g_start.is_zero():
        raise SubsolverError("descend_component requires a noncritical start")
    theta = _as_real(theta)
    path = [y]

    for _ in range(64 * active_config().mantissa_bits):
        g = m.gradient(y)
        s = abs(y - x)
        tol = inner_tol if inner_tol is not None else default_theta_slack(m, y)
        thresh = theta * s ** m.taylor.order + tol
        if not s.is_zero() and abs(g) <= thresh \
                and m.decrease_from_center(y) > 0:
            return CandidateMinimizer(
                point=y,
                model_value=m.value(y),
                model_grad_norm=abs(g),
                kind=KIND_MIN,
                step=y - x,
                decrease=m.decrease_from_center(y),
                path=path,
            )
        if g.is_zero():
            # critical but without decrease (can only be the start): stalled
            raise DescentStallError("descent reached a critical point "
                                    "without model decrease")
        h = m.second(y)
        if h > 0:
            step = -g / h
        else:
            scale = s if not s.is_zero() else Real(1)
            step = -g * scale / (abs(g) + 1)
        floor = max(abs(y), Real(1)) * ulp(Real(1))
        while True:
            y_new = y + step
            if m.value_gap(y, y_new) > 0:
                break
            step = step / 2
            if abs(step) < floor:
                raise DescentStallError("descent stalled: step underflow")
        y = y_new
        path.append(y)
    raise DescentStallError("descent failed to converge in iteration budget")


def _pick_global(cands, m):
    mins = [c for c in cands if c.kind == KIND_MIN and c.decrease > 0]
    if not mins:
        raise ThetaConditionError("no descending local minimizer candidate")
    best = mins[0]
    for c in mins[1:]:
        if c.decrease > best.decrease:
            best = c
    # ties (within 4 ulps of the best decrease): prefer closest to x_k
    tol = 4 * ulp(best.decrease)
    tied = [c for c in mins if abs(c.decrease - best.decrease) <= tol]
    if len(tied) > 1:
        best = min(tied, key=lambda c: abs(float(c.step)))
    return best


def select(policy, m, theta, objective=None, slack=None):
    """Choose y_k according to the policy and enforce the approximate-
    minimizer condition; raises ThetaConditionError when unattainable."""
    theta = _as_real(theta)
    if isinstance(policy, GlobalMin):
        cand = _pick_global(critical_points_1d(m), m)
    elif isinstance(policy, LocalComponent):
        cand = descend_component(m, inner_tol=policy.inner_tol, theta=theta)
    elif isinstance(policy, NearestToRef):
        cands = [c for c in critical_points_1d(m)
                 if c.kind == KIND_MIN and c.decrease > 0]
        if not cands:
            raise ThetaConditionError("no descending local minimizer candidate")
        cand = min(cands, key=lambda c: abs(float(c.point - policy.ref)))
    elif isinstance(policy, ClosedFormExampleB):
        if objective is None or not hasattr(objective, "example_b_orders"):
            raise SubsolverError("closed_form_b policy requires the "
                                 "degenerate built-in family objective")
        _p_obj, q = objective.example_b_orders
        p = m.taylor.order
        x = m.expansion_point
        if x.is_zero():
            raise SubsolverError("closed-form step undefined at x = 0")
        y = -signed_power(x, Fraction(p, q - 1))
        cand = CandidateMinimizer(
            point=y, model_value=m.value(y),
            model_grad_norm=abs(m.gradient(y)), kind=KIND_MIN,
            step=y - x, decrease=m.decrease_from_center(y))
    else:
        raise SubsolverError("unknown selection policy %r" % (policy,))

    if not verify_theta_condition(m, cand.point, theta, slack=slack):
        raise ThetaConditionError(
            "selected point violates the approximate-minimizer condition "
            "(theta=%s)" % theta)
    return cand
