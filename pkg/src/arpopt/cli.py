"""Config-driven experiment runner.

Configs are flat ``key = value`` text files with decimal-string numerics
(fractions like ``1/3`` are also accepted, since some canonical parameter
values have no finite decimal expansion).  Outputs are plain CSV and small
``key: value`` reports so any external plotter can consume them.

Exit codes: 0 normal termination (including iteration-budget exhaustion),
2 configuration errors, 3 numerical contract violations.
"""

import argparse
import csv
import os
import sys
from fractions import Fraction

from .errors import ArpoptError, ConfigError
from .precision import Real, log10_abs, set_precision
from .objective import ObjectiveSpec, Polynomial1D, builtin_example_A, \
    builtin_example_B
from .driver import (ArpConfig, IterationRecord, StopRule, Trace,
                     LETTER_STATUS, STATUS_LETTER, run, policy_from_name)
from .baseline import NewtonConfig, newton_run
from .analysis import (audit_trace, detect_cycle, estimate_order,
                       estimate_sigma_star, trace_errors)

__all__ = [
    "ExperimentConfig",
    "parse_config",
    "cmd_run",
    "cmd_reproduce",
    "write_trace_csv",
    "read_trace_csv",
    "write_plotdata",
    "main",
]

_KNOWN_KEYS = {
    "precision_bits", "objective", "p", "q", "coeffs", "solver", "policy",
    "eta", "eta1", "eta2", "gamma1", "gamma2", "theta", "sigma0", "x0",
    "max_iterations", "dist_tol", "grad_tol", "sigma_min", "ref",
    "inner_tol", "order_mode", "order_metric", "trace_csv", "order_report",
    "cycle_report", "audit_report", "plotdata",
}

_OUTPUT_KEYS = ("trace_csv", "order_report", "cycle_report", "audit_report",
                "plotdata")


class ExperimentConfig:
    """Raw parsed key/value pairs; numerics stay strings until the
    precision is fixed."""

    def __init__(self, values, path="<config>"):
        self.values = values
        self.path = path

    def get(self, key, default=None):
        return self.values.get(key, default)


def parse_config(path):
    values = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError("cannot read config %s: %s" % (path, exc))
    for lineno, line in enumerate(lines, 1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise ConfigError("%s:%d: expected 'key = value'" % (path, lineno))
        key, _, value = text.partition("=")
        key = key.strip()
        value = value.strip().strip('"').strip("'")
        if key not in _KNOWN_KEYS:
            raise ConfigError("%s:%d: unknown key %r" % (path, lineno, key))
        if key in values:
            raise ConfigError("%s:%d: duplicate key %r" % (path, lineno, key))
        if not value:
            raise ConfigError("%s:%d: empty value for %r" % (path, lineno, key))
        values[key] = value
    return ExperimentConfig(values, path)


def _real_from_string(text, what):
    text = text.strip().strip('"').strip("'")
    try:
        if "/" in text:
            return Real(Fraction(text))
        return Real(text)
    except (ArpoptError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError("bad decimal value for %s: %r (%s)"
                          % (what, text, exc))


def _int_from_string(text, what):
    try:
        return int(text)
    except ValueError:
        raise ConfigError("bad integer value for %s: %r" % (what, text))


def _build_objective(cfg):
    name = cfg.get("objective")
    if name is None:
        raise ConfigError("missing 'objective'")
    if name == "exampleA":
        return builtin_example_A()
    if name == "exampleB":
        if cfg.get("p") is None or cfg.get("q") is None:
            raise ConfigError("objective exampleB needs p and q")
        try:
            return builtin_example_B(_int_from_string(cfg.get("p"), "p"),
                                     _int_from_string(cfg.get("q"), "q"))
        except ArpoptError as exc:
            raise ConfigError(str(exc))
    if name == "poly1d":
        raw = cfg.get("coeffs")
        if raw is None:
            raise ConfigError("objective poly1d needs coeffs")
        raw = raw.strip()
        if raw.startswith("[") and raw.endswith("]"):
            raw = raw[1:-1]
        coeffs = [_real_from_string(c, "coeffs") for c in raw.split(",")]
        return ObjectiveSpec.from_polynomial("poly1d", Polynomial1D(coeffs))
    raise ConfigError("unknown objective %r" % (name,))


def _build_stop(cfg):
    dist = cfg.get("dist_tol")
    grad = cfg.get("grad_tol")
    return StopRule(
        grad_tol=_real_from_string(grad, "grad_tol") if grad else None,
        dist_tol=_real_from_string(dist, "dist_tol") if dist else None)


def _execute(cfg):
    """Run the experiment described by an ExperimentConfig; returns
    (trace, objective)."""
    bits = _int_from_string(cfg.get("precision_bits", "512"),
                            "precision_bits")
    try:
        set_precision(bits)
    except ArpoptError as exc:
        raise ConfigError(str(exc))
    f = _build_objective(cfg)
    x0_raw = cfg.get("x0")
    if x0_raw is None:
        raise ConfigError("missing 'x0'")
    x0 = _real_from_string(x0_raw, "x0")
    solver = cfg.get("solver", "arp")
    stop = _build_stop(cfg)
    max_iter = _int_from_string(cfg.get("max_iterations", "200"),
                                "max_iterations")
    if solver == "newton":
        trace = newton_run(f, x0, NewtonConfig(max_iter, stop))
        return trace, f
    if solver != "arp":
        raise ConfigError("unknown solver %r" % (solver,))
    if cfg.get("p") is None:
        raise ConfigError("solver arp needs p")
    policy_name = cfg.get("policy", "component")
    ref = cfg.get("ref")
    inner = cfg.get("inner_tol")
    try:
        policy = policy_from_name(
            policy_name, f=f,
            ref=_real_from_string(ref, "ref") if ref else None,
            inner_tol=_real_from_string(inner, "inner_tol") if inner else None)
    except ArpoptError as exc:
        raise ConfigError(str(exc))
    eta = cfg.get("eta")
    eta1 = cfg.get("eta1", eta or "0.5")
    eta2 = cfg.get("eta2", eta)
    if cfg.get("sigma0") is None:
        raise ConfigError("solver arp needs sigma0")
    try:
        arp_cfg = ArpConfig(
            p=_int_from_string(cfg.get("p"), "p"),
            sigma0=_real_from_string(cfg.get("sigma0"), "sigma0"),
            policy=policy,
            eta1=_real_from_string(eta1, "eta1"),
            eta2=_real_from_string(eta2, "eta2") if eta2 else None,
            gamma1=_real_from_string(cfg.get("gamma1", "0.5"), "gamma1"),
            gamma2=_real_from_string(cfg.get("gamma2", "2"), "gamma2"),
            theta=_real_from_string(cfg.get("theta", "0"), "theta"),
            max_iterations=max_iter,
            stop=stop,
            sigma_min=_real_from_string(cfg.get("sigma_min"), "sigma_min")
            if cfg.get("sigma_min") else None)
    except ArpoptError as exc:
        raise ConfigError(str(exc))
    return run(arp_cfg, f, x0), f


def _atomic_write(path, text):
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def write_trace_csv(trace, f, path):
    """Columns: k, status (V/S/U), sigma, x, f_gap, grad_norm, step_norm,
    rho -- all numerics as exact decimal strings.  f_gap is f(x) - f* when
    the minimizer is known, the raw value otherwise."""
    meta = f.metadata
    rows = ["k,status,sigma,x,f_gap,grad_norm,step_norm,rho"]
    for r in trace.records:
        gap = f.value_gap(r.x, meta.x_star) if meta is not None else r.f_value
        rows.append(",".join([
            str(r.k), STATUS_LETTER[r.status], r.sigma.to_decimal(),
            r.x.to_decimal(), gap.to_decimal(), r.grad_norm.to_decimal(),
            r.step_norm.to_decimal(), r.rho.to_decimal()]))
    _atomic_write(path, "\n".join(rows) + "\n")


def read_trace_csv(path, config=None, solver="arp"):
    """Re-parse an emitted trace CSV into a Trace.

    The proposed point y of each iteration is reconstructed from the next
    row's x for accepted iterations; it is unknown (None) for the last row,
    and the final iterate is approximated by the last recorded x.
    """
    records = []
    with open(path) as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            records.append(IterationRecord(
                k=int(row["k"]), x=Real(row["x"]),
                f_value=Real(row["f_gap"]), grad_norm=Real(row["grad_norm"]),
                sigma=Real(row["sigma"]), y=None, rho=Real(row["rho"]),
                status=LETTER_STATUS[row["status"]],
                step_norm=Real(row["step_norm"]), taylor_decrease=None))
    for cur, nxt in zip(records, records[1:]):
        if cur.accepted:
            cur.y = nxt.x
    final_x = records[-1].x if records else None
    return Trace(config, "parsed", records, "parsed", final_x, None,
                 solver=solver)


def write_plotdata(trace, f, path):
    """Columns: k, log10_inv_dist (decimal digits of accuracy per iterate);
    iterates that coincide with the minimizer at working precision are
    skipped."""
    meta = f.metadata
    rows = ["k,log10_inv_dist"]
    for k, x in enumerate(trace.iterates()):
        d = abs(x - meta.x_star)
        if d.is_zero():
            continue
        rows.append("%d,%.12g" % (k, -float(log10_abs(d))))
    _atomic_write(path, "\n".join(rows) + "\n")


def _write_order_report(est, path):
    lines = [
        "mode: %s" % est.mode,
        "tail_q_order: %.12g" % est.tail_q_order,
        "r_order: %s" % ("%.12g" % est.r_order
                         if est.r_order is not None else "n/a"),
        "samples_used: %d" % est.samples_used,
        "q_ratios: %s" % ",".join("%.9g" % r for r in est.q_ratios),
    ]
    _atomic_write(path, "\n".join(lines) + "\n")


def _write_cycle_report(rep, path):
    lines = [
        "detected: %s" % rep.detected,
        "preperiod: %s" % rep.preperiod,
        "period: %s" % rep.period,
        "sigma_cycle: %s" % ",".join(s.to_decimal() for s in rep.sigma_cycle),
        "unsuccessful_count: %d" % rep.unsuccessful_count,
        "successful_count: %d" % rep.successful_count,
        "ratio: %s" % (rep.ratio if rep.ratio is not None else "n/a"),
    ]
    if rep.note:
        lines.append("note: %s" % rep.note)
    _atomic_write(path, "\n".join(lines) + "\n")


def _write_audit_report(audit, path):
    lines = ["overall: %s" % ("PASS" if audit.ok else "FAIL")]
    for e in audit:
        margin = "%.6g" % e.margin if e.margin is not None else "n/a"
        lines.append("%s: %s margin=%s checked=%d%s" % (
            e.name, "PASS" if e.ok else "FAIL", margin, e.checked,
            " note=%s" % e.note if e.note else ""))
    _atomic_write(path, "\n".join(lines) + "\n")


def cmd_run(config_path):
    """Execute one configured experiment and write its requested outputs."""
    try:
        cfg = parse_config(config_path)
        trace, f = _execute(cfg)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2
    except ArpoptError as exc:
        print("numerical contract violation: %s" % exc, file=sys.stderr)
        return 3

    try:
        if cfg.get("trace_csv"):
            write_trace_csv(trace, f, cfg.get("trace_csv"))
        if cfg.get("plotdata"):
            write_plotdata(trace, f, cfg.get("plotdata"))
        if cfg.get("order_report"):
            mode = cfg.get("order_mode", "all_iterations")
            metric = cfg.get("order_metric", "dist")
            errors = trace_errors(trace, f, metric)
            est = estimate_order(errors, mode=mode,
                                 statuses=[r.status for r in trace.records])
            _write_order_report(est, cfg.get("order_report"))
        if cfg.get("cycle_report"):
            _write_cycle_report(detect_cycle(trace), cfg.get("cycle_report"))
        if cfg.get("audit_report"):
            _write_audit_report(audit_trace(trace, f), cfg.get("audit_report"))
    except ArpoptError as exc:
        print("numerical contract violation: %s" % exc, file=sys.stderr)
        return 3
    print("terminated: %s after %d iterations" % (trace.termination,
                                                  len(trace.records)))
    return 0


# ---------------------------------------------------------------------------
# canned reproductions

def _run_arp(f, policy, p, sigma0, x0, theta="0", gamma1="1/2", gamma2="2",
             eta="1/2", dist_tol="1e-100", max_iterations=200):
    cfg = ArpConfig(
        p=p, sigma0=Real(Fraction(sigma0)), policy=policy,
        eta1=Real(Fraction(eta)), gamma1=Real(Fraction(gamma1)),
        gamma2=Real(Fraction(gamma2)), theta=Real(Fraction(theta)),
        max_iterations=max_iterations,
        stop=StopRule(dist_tol=Real(dist_tol) if dist_tol else None))
    return cfg, run(cfg, f, Real(x0))


def _reproduce_fig_top(outdir):
    set_precision(512)
    f = builtin_example_A()
    summary = ["method,tail_q_order,r_order"]

    newton = newton_run(f, Real("1.1"), NewtonConfig(
        200, StopRule(dist_tol=Real("1e-100"))))
    write_plotdata(newton, f, os.path.join(outdir, "fig-top-newton.csv"))
    est_n = estimate_order(trace_errors(newton, f))
    summary.append("newton,%.6g,%.6g" % (est_n.tail_q_order, est_n.r_order))

    _, comp = _run_arp(f, policy_from_name("component"), 3, "1/2", "1.1")
    write_plotdata(comp, f, os.path.join(outdir, "fig-top-ar3-component.csv"))
    est_c = estimate_order(trace_errors(comp, f), mode="successful_only",
                           statuses=[r.status for r in comp.records])
    summary.append("ar3-component,%.6g,%.6g"
                   % (est_c.tail_q_order, est_c.r_order))

    _, glob = _run_arp(f, policy_from_name("global"), 3, "1/2", "1.1")
    write_plotdata(glob, f, os.path.join(outdir, "fig-top-ar3-global.csv"))
    est_gq = estimate_order(trace_errors(glob, f), mode="successful_only",
                            statuses=[r.status for r in glob.records])
    est_gr = estimate_order(trace_errors(glob, f))
    summary.append("ar3-global,%.6g,%.6g"
                   % (est_gq.tail_q_order, est_gr.r_order))

    _atomic_write(os.path.join(outdir, "fig-top-orders.csv"),
                  "\n".join(summary) + "\n")


def _reproduce_fig_bottom(outdir):
    set_precision(512)
    f = builtin_example_B(4, 4)
    summary = ["method,tail_q_order,r_order"]

    newton = newton_run(f, Real("0.1"), NewtonConfig(
        200, StopRule(dist_tol=Real("1e-100"))))
    write_plotdata(newton, f, os.path.join(outdir, "fig-bottom-newton.csv"))
    est_n = estimate_order(trace_errors(newton, f))
    summary.append("newton,%.6g,%.6g" % (est_n.tail_q_order, est_n.r_order))

    _, ar4 = _run_arp(f, policy_from_name("closed_form_b"), 4, "1/8", "0.1",
                      theta="3")
    write_plotdata(ar4, f, os.path.join(outdir, "fig-bottom-ar4.csv"))
    est_a = estimate_order(trace_errors(ar4, f))
    summary.append("ar4-closed-form,%.6g,%.6g"
                   % (est_a.tail_q_order, est_a.r_order))

    _atomic_write(os.path.join(outdir, "fig-bottom-orders.csv"),
                  "\n".join(summary) + "\n")


def _reproduce_example_2_1(outdir):
    set_precision(512)
    f = builtin_example_A()
    _, trace = _run_arp(f, policy_from_name("global"), 3, "6", "1.05",
                        gamma1="1/3", gamma2="3")
    write_trace_csv(trace, f, os.path.join(outdir, "example-2-1-trace.csv"))
    _write_cycle_report(detect_cycle(trace),
                        os.path.join(outdir, "example-2-1-cycle.txt"))
    _write_audit_report(audit_trace(trace, f),
                        os.path.join(outdir, "example-2-1-audit.txt"))


def _reproduce_sigma_star(outdir):
    set_precision(512)
    f = builtin_example_A()
    star = estimate_sigma_star(f, 3, (Real(2), Real(6)), Real("1e-8"))
    lines = [
        "sigma_star: %s" % star.to_decimal(),
        "sigma_star_float: %.12g" % float(star),
        "bracket: 2,6",
        "tol: 1e-8",
    ]
    _atomic_write(os.path.join(outdir, "sigma-star.txt"),
                  "\n".join(lines) + "\n")


_FIGURES = {
    "fig-top": _reproduce_fig_top,
    "fig-bottom": _reproduce_fig_bottom,
    "example-2-1": _reproduce_example_2_1,
    "sigma-star": _reproduce_sigma_star,
}


def cmd_reproduce(figure, outdir="."):
    """Run the canned experiments behind one figure/table and write
    machine-readable plot data."""
    if figure not in _FIGURES:
        print("unknown figure %r (choose from %s)"
              % (figure, ", ".join(sorted(_FIGURES))), file=sys.stderr)
        return 2
    os.makedirs(outdir, exist_ok=True)
    try:
        _FIGURES[figure](outdir)
    except ArpoptError as exc:
        print("numerical contract violation: %s" % exc, file=sys.stderr)
        return 3
    print("wrote %s outputs to %s" % (figure, outdir))
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="arpopt",
        description="Adaptive p-th order regularization experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run a config-file experiment")
    p_run.add_argument("config")
    p_rep = sub.add_parser("reproduce", help="reproduce a canned figure")
    p_rep.add_argument("figure", choices=sorted(_FIGURES))
    p_rep.add_argument("--outdir", default=".")
    args = parser.parse_args(argv)
    if args.command == "run":
        return cmd_run(args.config)
    return cmd_reproduce(args.figure, args.outdir)


if __name__ == "__main__":
    sys.exit(main())
