"""Trace analysis: convergence orders, sigma cycles, thresholds, audits.

Everything here is a pure function of a finished Trace (or an error
sequence): Q/R convergence-order estimation, detection of the eventually
periodic (sigma, status) pattern, numerical estimation of the critical
regularization threshold sigma*, and an audit that re-checks the
theoretical guarantees (sigma ceiling, guaranteed success above the
threshold, per-step gradient bound, successful-count lower bound, local
uniform-convexity growth bounds) against a concrete run.
"""

import math
from fractions import Fraction
from statistics import median

from .errors import AnalysisError, BracketError, OracleError
from .model import RegularizedModel, build_taylor
from .precision import Real, _as_real, active_config
from .subsolver import critical_points_1d
from .driver import UNSUCCESSFUL, VERY_SUCCESSFUL, sigma_max_bound

__all__ = [
    "OrderEstimate",
    "CycleReport",
    "estimate_order",
    "trace_errors",
    "detect_cycle",
    "estimate_sigma_star",
    "AuditEntry",
    "TraceAudit",
    "audit_trace",
]


class OrderEstimate:
    """Q-ratios log e_{k+1} / log e_k plus summary statistics.

    tail_q_order: median of the last min(5, available) ratios.
    r_order: exp of the least-squares slope of log log(1/e_k) against k
    (leading plateau of repeated initial errors dropped as warm-up).
    """

    def __init__(self, q_ratios, tail_q_order, r_order, samples_used, mode):
        self.q_ratios = q_ratios
        self.tail_q_order = tail_q_order
        self.r_order = r_order
        self.samples_used = samples_used
        self.mode = mode

    def __repr__(self):
        return ("OrderEstimate(tail_q=%.4f, r=%s, samples=%d, mode=%s)"
                % (self.tail_q_order,
                   "%.4f" % self.r_order if self.r_order else None,
                   self.samples_used, self.mode))


def _log_error(e):
    if isinstance(e, Real):
        return float(e.ln())
    return math.log(e)


def estimate_order(errors, mode="all_iterations", statuses=None):
    """Estimate convergence orders from an error sequence.

    errors: per-iterate distances (Real or float), naturally one per
    iteration plus the final point.  Entries that are exactly zero (the
    iterate collapsed onto the minimizer at working precision) are dropped.
    mode "successful_only" keeps only iterates produced by accepted steps
    (using `statuses`, one per iteration, when given; otherwise consecutive
    duplicates are collapsed).  Q-ratios always come from the collapsed
    strictly-decreasing subsequence; the R-order is fitted on the full
    mode-filtered sequence against its original iteration indices.
    """
    if mode not in ("all_iterations", "successful_only"):
        raise AnalysisError("unknown mode %r" % (mode,))
    seq = [(k, e) for k, e in enumerate(errors)
           if not (isinstance(e, Real) and e.is_zero()) and not e == 0]
    if len(seq) < 5:
        raise AnalysisError("need at least 5 nonzero errors, got %d"
                            % len(seq))
    if any(not (e < 1) for _, e in seq):
        raise AnalysisError("errors must be below 1")

    if mode == "successful_only" and statuses is not None:
        kept = [seq[0]]
        for k, e in seq[1:]:
            if k - 1 < len(statuses) and statuses[k - 1] != UNSUCCESSFUL:
                kept.append((k, e))
        seq = kept

    logs = [(k, _log_error(e)) for k, e in seq]
    for (_, a), (_, b) in zip(logs, logs[1:]):
        if b > a:
            raise AnalysisError("non-monotone error sequence")

    # collapsed strictly-decreasing subsequence for Q-ratios
    collapsed = [logs[0]]
    for k, L in logs[1:]:
        if L < collapsed[-1][1]:
            collapsed.append((k, L))
    if len(collapsed) < 3:
        raise AnalysisError("fewer than 3 distinct errors")
    q_ratios = [b / a for (_, a), (_, b) in zip(collapsed, collapsed[1:])]
    tail = q_ratios[-min(5, len(q_ratios)):]
    tail_q = median(tail)

    # R-order: drop the leading warm-up plateau (errors equal to e_0),
    # keeping its final entry, then fit log log(1/e) vs k.
    fit = logs
    first_log = logs[0][1]
    drop = 0
    while drop + 1 < len(fit) and fit[drop + 1][1] == first_log:
        drop += 1
    fit = fit[drop:]
    r_order = None
    if len(fit) >= 3:
        xs = [k for k, _ in fit]
        ys = [math.log(-L) for _, L in fit]
        n = len(xs)
        mx = sum(xs) / n
        my = sum(ys) / n
        sxx = sum((x - mx) ** 2 for x in xs)
        sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
        if sxx > 0:
            r_order = math.exp(sxy / sxx)
    return OrderEstimate(q_ratios, tail_q, r_order, len(seq), mode)


def trace_errors(trace, f, metric="dist"):
    """Per-iterate error sequence of a trace: one entry per iteration plus
    the final point.  Metrics: dist |x - x*|, grad |f'(x)|, or fgap."""
    xs = trace.iterates()
    if metric == "grad":
        return [abs(f.gradient(x)) for x in xs]
    meta = f.metadata
    if meta is None:
        raise OracleError("metric %r requires metadata" % metric)
    if metric == "dist":
        return [abs(x - meta.x_star) for x in xs]
    if metric == "fgap":
        return [f.value_gap(x, meta.x_star) for x in xs]
    raise AnalysisError("unknown metric %r" % (metric,))


def _rational_alpha(cfg, max_den=16):
    """(a, b) with gamma1 = gamma2^(-a/b) when that holds to working
    precision for a small rational a/b; None otherwise."""
    if cfg is None:
        return None
    if cfg.gamma1 == 1:
        return (0, 1)
    ratio = -float(cfg.gamma1.ln()) / float(cfg.gamma2.ln())
    frac = Fraction(ratio).limit_denominator(max_den)
    if frac <= 0:
        return None
    a, b = frac.numerator, frac.denominator
    bits = active_config().mantissa_bits
    resid = abs(cfg.gamma1 ** b * cfg.gamma2 ** a - 1)
    if resid <= Real(2) ** (-(bits // 2)):
        return (a, b)
    return None


class CycleReport:
    def __init__(self, detected, preperiod, period, sigma_cycle,
                 unsuccessful_count, successful_count, note=""):
        self.detected = detected
        self.preperiod = preperiod
        self.period = period
        self.sigma_cycle = sigma_cycle
        self.unsuccessful_count = unsuccessful_count
        self.successful_count = successful_count
        self.note = note

    @property
    def ratio(self):
        """Unsuccessful-to-successful ratio within one period."""
        if not self.detected or self.successful_count == 0:
            return None
        return Fraction(self.unsuccessful_count, self.successful_count)

    def __repr__(self):
        return ("CycleReport(detected=%s, preperiod=%s, period=%s, "
                "U:S=%s:%s)" % (self.detected, self.preperiod, self.period,
                                self.unsuccessful_count,
                                self.successful_count))


def detect_cycle(trace):
    """Find the eventually periodic (sigma, status) pattern of a trace.

    Sigma values are compared through their integer exponent on the
    gamma2^(1/b) grid (reconstructed from the status sequence), never by
    floating-point equality, so ulp drift in the stored sigmas cannot
    break the periodicity.  Requires gamma1 = gamma2^(-a/b) for a small
    rational a/b; at least two full periods must fit in the window.
    """
    if len(trace.records) < 4:
        raise AnalysisError("cycle detection needs at least 4 iterations")
    ab = _rational_alpha(trace.config)
    if ab is None:
        return CycleReport(False, None, None, [], 0, 0,
                           note="gamma1/gamma2 not on a common rational grid")
    a, b = ab
    tokens = []
    c = 0
    for rec in trace.records:
        tokens.append((c, rec.status))
        if rec.status == UNSUCCESSFUL:
            c += b
        elif rec.status == VERY_SUCCESSFUL:
            c -= a
    n = len(tokens)
    for period in range(1, n // 2 + 1):
        # smallest preperiod for this period
        pre = 0
        for k in range(n - period - 1, -1, -1):
            if tokens[k] != tokens[k + period]:
                pre = k + 1
                break
        if pre + 2 * period <= n:
            window = trace.records[pre:pre + period]
            u = sum(1 for r in window if r.status == UNSUCCESSFUL)
            s = period - u
            return CycleReport(True, pre, period,
                               [r.sigma for r in window], u, s)
    return CycleReport(False, None, None, [], 0, 0,
                       note="no periodicity in observed window")


def estimate_sigma_star(f, p, bracket, tol):
    """Bisect for the threshold sigma* below which the model built at the
    minimizer dips under f*.

    For each sigma the global model minimum is found by full critical-point
    enumeration; 'dips under' means the best from-center decrease exceeds a
    margin of tol^2 (safely between the O(sigma* - sigma) dip depth and
    rounding noise).
    """
    meta = f.metadata
    if meta is None:
        raise OracleError("estimate_sigma_star requires metadata")
    lo = _as_real(bracket[0])
    hi = _as_real(bracket[1])
    tol = _as_real(tol)
    if not (Real(0) < lo and lo < hi and tol > 0):
        raise BracketError("invalid bracket or tolerance")
    taylor = build_taylor(f, meta.x_star, p)
    margin = tol * tol

    def dips_below(sigma):
        m = RegularizedModel(taylor, sigma)
        cands = critical_points_1d(m)
        best = None
        for cand in cands:
            if best is None or cand.decrease > best:
                best = cand.decrease
        return best is not None and best > margin

    if not dips_below(lo):
        raise BracketError("lower bracket end does not dip below f*")
    if dips_below(hi):
        raise BracketError("upper bracket end still dips below f*")
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if dips_below(mid):
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


class AuditEntry:
    def __init__(self, name, ok, margin=None, checked=0, note=""):
        self.name = name
        self.ok = ok
        self.margin = margin          # worst slack, float (None if unchecked)
        self.checked = checked
        self.note = note

    def __repr__(self):
        return "AuditEntry(%s, ok=%s, margin=%s, checked=%d)" % (
            self.name, self.ok, self.margin, self.checked)


class TraceAudit:
    def __init__(self, entries):
        self.entries = {e.name: e for e in entries}

    @property
    def ok(self):
        return all(e.ok for e in self.entries.values())

    def __iter__(self):
        return iter(self.entries.values())

    def __getitem__(self, name):
        return self.entries[name]

    def __repr__(self):
        return "TraceAudit(ok=%s, %d checks)" % (self.ok, len(self.entries))


def _min_keep(cur, new):
    return new if cur is None or new < cur else cur


def audit_trace(trace, f):
    """Re-check the theoretical guarantees against a finished trace.

    Entries (violations are reported, never raised):
      sigma_ceiling            sigma_k <= max(sigma0, gamma2 L_p/((1-eta1)(p+1)!))
      success_above_threshold  sigma_k >= L_p/((1-eta1)(p+1)!) implies accepted
      gradient_step_bound      |f'(x_{k+1})| <= (L_p/p! + theta + (p+1)sigma_k)
                               * |x_{k+1}-x_k|^p on accepted iterations
      successful_count_bound   s_k >= k/(alpha+1) - log(smax/s0)/((alpha+1)log g2)
      monotone_objective       f non-increasing along accepted iterates
      convexity_growth         f(x)-f* >= (mu/q) d^q inside B(x*, r_q)
      convexity_gradient_lower |f'(x)| >= mu d^(q-1) inside the ball
      convexity_gap_by_gradient f(x)-f* <= (q-1)/q (1/mu)^(1/(q-1)) |f'|^(q/(q-1))
    """
    meta = f.metadata
    if meta is None:
        raise OracleError("audit_trace requires metadata")
    entries = []
    cfg = trace.config
    recs = trace.records

    if cfg is not None:
        ceiling = sigma_max_bound(cfg, meta.L_p)
        worst = None
        for r in recs:
            worst = _min_keep(worst, float(ceiling - r.sigma))
        entries.append(AuditEntry("sigma_ceiling", worst is None or worst >= 0,
                                  worst, len(recs)))

        fact = math.factorial(cfg.p + 1)
        threshold = meta.L_p / ((1 - cfg.eta1) * fact)
        bad = 0
        checked = 0
        for r in recs:
            if r.sigma >= threshold:
                checked += 1
                if r.status == UNSUCCESSFUL:
                    bad += 1
        entries.append(AuditEntry("success_above_threshold", bad == 0,
                                  None, checked,
                                  note="%d violations" % bad if bad else ""))

        worst = None
        checked = 0
        pfact = math.factorial(cfg.p)
        for r in recs:
            if r.status == UNSUCCESSFUL or r.y is None:
                continue
            checked += 1
            coef = meta.L_p / pfact + cfg.theta + (cfg.p + 1) * r.sigma
            rhs = coef * r.step_norm ** cfg.p
            lhs = abs(f.gradient(r.y))
            worst = _min_keep(worst, float(rhs - lhs))
        entries.append(AuditEntry("gradient_step_bound",
                                  worst is None or worst >= 0, worst, checked))

        ab = _rational_alpha(cfg)
        if ab is not None and recs:
            a, b = ab
            alpha = a / b
            smax = sigma_max_bound(cfg, meta.L_p)
            offset = float((smax / cfg.sigma0).ln() / cfg.gamma2.ln())
            worst = None
            s_count = 0
            for i, r in enumerate(recs):
                if r.status != UNSUCCESSFUL:
                    s_count += 1
                k = i + 1
                bound = k / (alpha + 1) - offset / (alpha + 1)
                worst = _min_keep(worst, s_count - bound)
            entries.append(AuditEntry("successful_count_bound",
                                      worst is None or worst >= 0, worst,
                                      len(recs)))
        else:
            entries.append(AuditEntry("successful_count_bound", True, None, 0,
                                      note="no rational alpha"))

    accepted = [r.x for r in recs if r.status != UNSUCCESSFUL]
    path = ([recs[0].x] if recs else []) + accepted + [trace.final_x]
    worst = None
    for x1, x2 in zip(path, path[1:]):
        worst = _min_keep(worst, float(f.value_gap(x1, x2)))
    entries.append(AuditEntry("monotone_objective",
                              worst is None or worst >= 0, worst,
                              max(0, len(path) - 1)))

    q = meta.q
    mu = meta.mu_q
    coef_gap = (Real(q - 1) / q) * (1 / mu) ** Fraction(1, q - 1)
    exp_gap = Fraction(q, q - 1)
    w_growth = w_glower = w_gapgrad = None
    checked = 0
    for x in trace.iterates():
        d = abs(x - meta.x_star)
        if d > meta.r_q:
            continue
        checked += 1
        gap = f.value_gap(x, meta.x_star)
        g = abs(f.gradient(x))
        w_growth = _min_keep(w_growth, float(gap - (mu / q) * d ** q))
        w_glower = _min_keep(w_glower, float(g - mu * d ** (q - 1)))
        w_gapgrad = _min_keep(w_gapgrad, float(coef_gap * g ** exp_gap - gap))
    entries.append(AuditEntry("convexity_growth",
                              w_growth is None or w_growth >= 0,
                              w_growth, checked))
    entries.append(AuditEntry("convexity_gradient_lower",
                              w_glower is None or w_glower >= 0,
                              w_glower, checked))
    entries.append(AuditEntry("convexity_gap_by_gradient",
                              w_gapgrad is None or w_gapgrad >= 0,
                              w_gapgrad, checked))
    return TraceAudit(entries)
