import random
from fractions import Fraction

import pytest

from arpopt import (DomainError, Polynomial1D, ObjectiveSpec, Real,
                    RegularizedModel, audit_taylor_bounds, build_taylor,
                    builtin_example_A, eval_model, grad_model, model_decrease,
                    signed_power)

from oracles import frac_polyval, frac_shift


def _spec(coeffs):
    return ObjectiveSpec.from_polynomial(
        "t", Polynomial1D([Real(c) for c in coeffs]))


def test_build_taylor_terms_match_shift():
    rng = random.Random(9)
    for _ in range(15):
        coeffs = [Fraction(rng.randint(-30, 30), 4) for _ in range(6)]
        f = _spec(coeffs)
        a = Fraction(rng.randint(-6, 6), 4)
        t = build_taylor(f, Real(a), 5)
        want = frac_shift(coeffs, a)
        for g, w in zip(t.terms, want):
            assert abs(g - Real(w)) < Real("1e-140")


def test_truncated_taylor():
    f = builtin_example_A()
    t = build_taylor(f, Real("1.1"), 3)
    assert t.order == 3
    assert len(t.terms) == 4
    # frozen [exact dyadic-free values]: f(1.1), f'(1.1), f''(1.1)/2, f'''(1.1)/6
    for got, want in zip(t.terms, [Fraction("-0.9317"), Fraction("1.452"),
                                   Fraction("8.58"), Fraction("9.2")]):
        assert abs(got - Real(want)) < Real("1e-150")


def test_taylor_value_and_gradient():
    f = builtin_example_A()
    t = build_taylor(f, Real("1.1"), 3)
    y = Real("1.5")
    s = Fraction(4, 10)
    want = frac_polyval([Fraction("-0.9317"), Fraction("1.452"),
                         Fraction("8.58"), Fraction("9.2")], s)
    assert abs(t.value(y) - Real(want)) < Real("1e-150")
    wantd = frac_polyval([Fraction("1.452"), Fraction("17.16"),
                          Fraction("27.6")], s)
    assert abs(t.gradient(y) - Real(wantd)) < Real("1e-150")


def test_decrease_from_center_exact_form():
    # t(x) - t(y) for y extremely close to x keeps full relative accuracy
    f = builtin_example_A()
    x = Real(1) + Real("1e-60")
    t = build_taylor(f, x, 3)
    y = x + Real("1e-70")
    dec = t.decrease_from_center(y)
    # dominated by -c1*s - c2*s^2 with c1 ~ 12e-60: gap ~ -1.2e-129
    assert dec < 0
    assert Real("-1.3e-129") < dec < Real("-1.1e-129")


def test_regularized_model_values():
    f = builtin_example_A()
    t = build_taylor(f, Real("1.1"), 3)
    m = RegularizedModel(t, Real("0.5"))
    y = Real("0.6")
    s = y - Real("1.1")
    want = t.value(y) + Real("0.5") * abs(s) ** 4
    assert abs(eval_model(m, y) - want) < Real("1e-150")
    wantg = t.gradient(y) + Real(2) * signed_power(s, 3)
    assert abs(grad_model(m, y) - wantg) < Real("1e-150")


def test_model_decrease_components():
    f = builtin_example_A()
    t = build_taylor(f, Real("1.1"), 3)
    m = RegularizedModel(t, Real("0.5"))
    y = Real("0.99")
    t_dec, m_dec = model_decrease(m, y)
    assert abs((t_dec - m_dec) - Real("0.5") * abs(y - Real("1.1")) ** 4) \
        < Real("1e-150")


def test_model_value_gap():
    f = builtin_example_A()
    t = build_taylor(f, Real("1.1"), 3)
    m = RegularizedModel(t, Real("0.5"))
    y1, y2 = Real("0.99"), Real("1.01")
    gap = m.value_gap(y1, y2)
    assert abs(gap - (m.value(y1) - m.value(y2))) < Real("1e-150")


def test_branch_coefficients():
    f = builtin_example_A()
    t = build_taylor(f, Real("1.1"), 3)
    m = RegularizedModel(t, Real("0.5"))
    assert m.branches_coincide()  # p + 1 = 4 even
    plus = m.branch_coefficients(+1)
    assert abs(plus[-1] - Real("0.5")) < Real("1e-150")
    t2 = build_taylor(f, Real("1.1"), 2)
    m2 = RegularizedModel(t2, Real("0.5"))
    assert not m2.branches_coincide()  # |s|^3 splits by sign
    assert abs(m2.branch_coefficients(-1)[-1] + Real("0.5")) < Real("1e-150")


def test_build_taylor_validates():
    f = builtin_example_A()
    with pytest.raises(DomainError):
        build_taylor(f, Real(1), 0)
    with pytest.raises(DomainError):
        RegularizedModel(build_taylor(f, Real(1), 3), Real(0))


def test_audit_taylor_bounds():
    f = builtin_example_A()
    # the quartic with p = 3 attains the remainder bounds with equality
    # (f'''' is constant), so margins are zero up to rounding
    margins = audit_taylor_bounds(f, Real("1.1"), Real("0.9"), 3)
    assert all(m > Real("-1e-150") for m in margins), margins
    # at order p = 2 the bounds are strict
    margins2 = audit_taylor_bounds(f, Real("1.1"), Real("0.9"), 2)
    assert all(m > 0 for m in margins2), margins2
