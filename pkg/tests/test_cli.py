import os

import pytest

from arpopt import (ArpConfig, ConfigError, GlobalMin, Real, StopRule,
                    audit_trace, builtin_example_A, run)
from arpopt.cli import (cmd_run, cmd_reproduce, main, parse_config,
                        read_trace_csv, write_trace_csv)


BASE_CONFIG = """\
# quartic, global-minimizer policy
precision_bits = 512
objective = exampleA
solver = arp
p = 3
policy = global
sigma0 = 1/2
eta = 1/2
gamma1 = 1/2
gamma2 = 2
theta = 0
x0 = 1.1
max_iterations = 200
dist_tol = 1e-100
"""


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_parse_config_basic(tmp_path):
    cfg = parse_config(_write(tmp_path, "a.cfg", BASE_CONFIG))
    assert cfg.get("objective") == "exampleA"
    assert cfg.get("sigma0") == "1/2"
    assert cfg.get("missing") is None


def test_parse_config_rejects_unknown_key(tmp_path):
    path = _write(tmp_path, "a.cfg", BASE_CONFIG + "wibble = 3\n")
    with pytest.raises(ConfigError):
        parse_config(path)


def test_parse_config_rejects_duplicates_and_garbage(tmp_path):
    with pytest.raises(ConfigError):
        parse_config(_write(tmp_path, "d.cfg", "p = 3\np = 4\n"))
    with pytest.raises(ConfigError):
        parse_config(_write(tmp_path, "g.cfg", "just words\n"))
    with pytest.raises(ConfigError):
        parse_config(_write(tmp_path, "e.cfg", "p =\n"))


def test_cmd_run_writes_outputs(tmp_path):
    out = str(tmp_path / "trace.csv")
    plot = str(tmp_path / "plot.csv")
    cfgtext = BASE_CONFIG + "trace_csv = %s\nplotdata = %s\n" % (out, plot)
    assert cmd_run(_write(tmp_path, "a.cfg", cfgtext)) == 0
    lines = open(out).read().splitlines()
    assert lines[0] == "k,status,sigma,x,f_gap,grad_norm,step_norm,rho"
    assert len(lines) == 11  # 10 iterations
    statuses = [ln.split(",")[1] for ln in lines[1:]]
    assert statuses == list("UUUVUVUVUV")
    plot_lines = open(plot).read().splitlines()
    assert plot_lines[0] == "k,log10_inv_dist"
    digits = [float(ln.split(",")[1]) for ln in plot_lines[1:]]
    assert digits == sorted(digits)
    assert digits[-1] > 100


def test_cmd_run_exit_codes(tmp_path):
    assert cmd_run(str(tmp_path / "missing.cfg")) == 2
    bad = _write(tmp_path, "bad.cfg", "objective = nonsense\nx0 = 1\n")
    assert cmd_run(bad) == 2
    # singular hessian at x0 = 2/3 -> numerical contract violation
    sing = _write(tmp_path, "sing.cfg",
                  "objective = exampleA\nsolver = newton\nx0 = 2/3\n")
    assert cmd_run(sing) == 3


def test_main_argparse(tmp_path):
    out = str(tmp_path / "t.csv")
    cfg = _write(tmp_path, "a.cfg", BASE_CONFIG + "trace_csv = %s\n" % out)
    assert main(["run", cfg]) == 0
    assert os.path.exists(out)


def test_trace_csv_reparse_audits_clean(tmp_path):
    f = builtin_example_A()
    cfg = ArpConfig(p=3, sigma0="0.5", policy=GlobalMin(), max_iterations=200,
                    stop=StopRule(dist_tol=Real("1e-100")))
    tr = run(cfg, f, Real("1.1"))
    path = str(tmp_path / "trace.csv")
    write_trace_csv(tr, f, path)
    parsed = read_trace_csv(path, config=cfg)
    assert len(parsed.records) == len(tr.records)
    for a, b in zip(parsed.records, tr.records):
        assert a.x == b.x  # decimal serialization round-trips exactly
        assert a.sigma == b.sigma
        assert a.status == b.status
    audit = audit_trace(parsed, f)
    assert audit.ok, [(e.name, e.margin) for e in audit if not e.ok]


def test_reproduce_sigma_star(tmp_path):
    assert cmd_reproduce("sigma-star", str(tmp_path)) == 0
    text = open(tmp_path / "sigma-star.txt").read()
    assert text.startswith("sigma_star: 2.66666666")


def test_reproduce_example_2_1(tmp_path):
    assert cmd_reproduce("example-2-1", str(tmp_path)) == 0
    cycle = open(tmp_path / "example-2-1-cycle.txt").read()
    assert "detected: True" in cycle
    assert "ratio: 1" in cycle
    audit = open(tmp_path / "example-2-1-audit.txt").read()
    assert audit.startswith("overall: PASS")


def test_reproduce_unknown_figure(tmp_path):
    assert cmd_reproduce("fig-nope", str(tmp_path)) == 2
