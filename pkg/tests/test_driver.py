from fractions import Fraction

import pytest

from arpopt import (ArpConfig, DomainError, GlobalMin, LocalComponent, Real,
                    StopRule, builtin_example_A, policy_from_name, run,
                    sigma_max_bound)
from arpopt.driver import STATUS_LETTER


def _statuses(trace):
    return "".join(STATUS_LETTER[r.status] for r in trace.records)


def _stop():
    return StopRule(dist_tol=Real("1e-100"))


def test_config_validation():
    pol = GlobalMin()
    with pytest.raises(DomainError):
        ArpConfig(p=1, sigma0=1, policy=pol)
    with pytest.raises(DomainError):
        ArpConfig(p=3, sigma0=0, policy=pol)
    with pytest.raises(DomainError):
        ArpConfig(p=3, sigma0=1, policy=pol, eta1="0.6", eta2="0.5")
    with pytest.raises(DomainError):
        ArpConfig(p=3, sigma0=1, policy=pol, gamma1="1.5")
    with pytest.raises(DomainError):
        ArpConfig(p=3, sigma0=1, policy=pol, gamma2=1)
    with pytest.raises(DomainError):
        ArpConfig(p=3, sigma0=1, policy=pol, theta=-1)


def test_stop_rule_zero_gradient_first():
    f = builtin_example_A()
    rule = StopRule(grad_tol=Real("1e-5"), dist_tol=Real("1e-5"))
    assert rule.check(f, Real(1), f.gradient(Real(1))) == "zero_gradient"
    x = Real("1.000001")
    assert rule.check(f, x, f.gradient(x)) == "dist_tol"
    assert rule.check(f, Real(2), f.gradient(Real(2))) is None


def test_component_run_all_very_successful():
    f = builtin_example_A()
    cfg = ArpConfig(p=3, sigma0="0.5", policy=LocalComponent(),
                    max_iterations=200, stop=_stop())
    tr = run(cfg, f, Real("1.1"))
    assert _statuses(tr) == "VVVVV"
    assert tr.termination == "zero_gradient"
    assert [float(r.sigma) for r in tr.records] == \
        [0.5, 0.25, 0.125, 0.0625, 0.03125]
    # final iterate rounds exactly onto the minimizer
    assert tr.final_x == Real(1)


def test_global_run_escapes_then_cycles():
    f = builtin_example_A()
    cfg = ArpConfig(p=3, sigma0="0.5", policy=GlobalMin(),
                    max_iterations=200, stop=_stop())
    tr = run(cfg, f, Real("1.1"))
    assert _statuses(tr) == "UUUVUVUVUV"
    assert [float(r.sigma) for r in tr.records] == \
        [0.5, 1.0, 2.0, 4.0, 2.0, 4.0, 2.0, 4.0, 2.0, 4.0]
    assert tr.termination == "dist_tol"
    assert abs(tr.final_x - 1) < Real("1e-100")


def test_rejected_steps_keep_iterate():
    f = builtin_example_A()
    cfg = ArpConfig(p=3, sigma0="0.5", policy=GlobalMin(),
                    max_iterations=3, stop=_stop())
    tr = run(cfg, f, Real("1.1"))
    for r in tr.records:
        assert not r.accepted
        assert r.x == Real("1.1")
    assert tr.final_x == Real("1.1")


def test_rho_matches_direct_ratio():
    f = builtin_example_A()
    cfg = ArpConfig(p=3, sigma0="0.5", policy=LocalComponent(),
                    max_iterations=1, stop=_stop())
    tr = run(cfg, f, Real("1.1"))
    r = tr.records[0]
    direct = f.value_gap(r.x, r.y) / r.taylor_decrease
    assert abs(r.rho - direct) < Real("1e-150")
    assert abs(r.step_norm - abs(r.y - r.x)) < Real("1e-150")


def test_sigma_min_floor():
    f = builtin_example_A()
    cfg = ArpConfig(p=3, sigma0="0.5", policy=LocalComponent(),
                    max_iterations=200, stop=_stop(), sigma_min="0.2")
    tr = run(cfg, f, Real("1.1"))
    assert float(tr.final_sigma) >= 0.2


def test_sigma_max_bound_value():
    cfg = ArpConfig(p=3, sigma0="0.5", policy=GlobalMin())
    # gamma2 L_p / ((1 - eta1)(p+1)!) = 2*72/(0.5*24) = 12
    assert sigma_max_bound(cfg, 72) == Real(12)
    cfg_big = ArpConfig(p=3, sigma0=20, policy=GlobalMin())
    assert sigma_max_bound(cfg_big, 72) == Real(20)


def test_policy_from_name():
    f = builtin_example_A()
    assert policy_from_name("global").name == "global"
    assert policy_from_name("component").name == "component"
    assert policy_from_name("nearest_ref", f=f).name == "nearest_ref"
    assert policy_from_name("closed_form_b").name == "closed_form_b"
    with pytest.raises(DomainError):
        policy_from_name("bogus")


def test_max_iterations_budget():
    f = builtin_example_A()
    cfg = ArpConfig(p=3, sigma0="0.5", policy=GlobalMin(), max_iterations=4)
    tr = run(cfg, f, Real("1.1"))
    assert tr.termination == "max_iterations"
    assert len(tr.records) == 4
