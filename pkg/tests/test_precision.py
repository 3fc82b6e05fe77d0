import math
import random
from fractions import Fraction

import pytest

from arpopt import (BACKEND, DomainError, PrecisionMixError, Real,
                    active_config, log10_abs, set_precision, signed_power, ulp)


def test_backend_selected():
    assert BACKEND in ("gmpy2", "mpmath")


def test_active_config_defaults():
    cfg = active_config()
    assert cfg.mantissa_bits == 512
    assert cfg.decimal_digits == 155


def test_set_precision_validates():
    with pytest.raises(DomainError):
        set_precision(52)
    set_precision(128)
    assert active_config().mantissa_bits == 128


def test_constructors():
    assert float(Real(3)) == 3.0
    assert float(Real("0.5")) == 0.5
    assert float(Real(0.25)) == 0.25
    assert float(Real(Fraction(1, 4))) == 0.25
    assert float(Real(Real(7))) == 7.0
    assert Real().is_zero()


def test_bad_string_raises():
    with pytest.raises(DomainError):
        Real("not a number")


def test_exact_arithmetic_matches_fractions():
    rng = random.Random(7)
    for _ in range(50):
        a = Fraction(rng.randint(-999, 999), rng.choice([1, 2, 4, 8, 16]))
        b = Fraction(rng.randint(1, 999), rng.choice([1, 2, 4, 8, 16]))
        ra, rb = Real(a), Real(b)
        # dyadic rationals: +, -, * are exact at 512 bits
        assert float(ra + rb) == float(a + b)
        assert float(ra - rb) == float(a - b)
        assert float(ra * rb) == float(a * b)


def test_division_and_comparison():
    third = Real(1) / 3
    assert Real(0) < third < Real(1)
    assert abs(third * 3 - 1) <= ulp(Real(1)) * 2
    assert Real(2) >= Real(2) and Real(2) <= Real(2)
    assert Real(2) != Real(3)


def test_pow_int_and_fraction():
    assert float(Real(2) ** 10) == 1024.0
    r = Real(8) ** Fraction(1, 3)
    assert abs(r - 2) <= ulp(Real(2))
    r = Real(2) ** -2
    assert float(r) == 0.25


def test_rootn_ln_exp():
    x = Real(27).rootn(3)
    assert abs(x - 3) <= ulp(Real(4))
    assert abs(Real(1).exp() - Real(math.e)) < Real("1e-15")
    assert abs(Real(math.e).ln() - 1) < Real("1e-15")
    assert abs(log10_abs(Real("-1000")) - 3) < Real("1e-100")


def test_ulp():
    assert float(ulp(Real(1))) == 2.0 ** -511
    assert float(ulp(Real(2))) == 2.0 ** -510
    with pytest.raises(DomainError):
        ulp(Real(0))


def test_signed_power_odd_extension():
    x = Real("-0.5")
    assert float(signed_power(x, 2)) == -0.25
    assert float(signed_power(-x, 2)) == 0.25
    y = signed_power(Real(-8), Fraction(1, 3))
    assert abs(y + 2) <= ulp(Real(2))
    assert signed_power(Real(0), 3).is_zero()


def test_cross_precision_mix_rejected():
    a = Real(1)
    set_precision(256)
    b = Real(2)
    with pytest.raises(PrecisionMixError):
        a + b


def test_to_decimal_round_trip():
    rng = random.Random(11)
    for _ in range(40):
        x = (Real(rng.randint(1, 10 ** 9)) / rng.randint(1, 10 ** 9)) ** 3
        if rng.random() < 0.5:
            x = -x
        s = x.to_decimal()
        assert Real(s) == x


def test_to_decimal_format():
    s = Real("0.5").to_decimal()
    mantissa, _, exp = s.partition("e")
    assert mantissa.startswith("5.")
    assert int(exp) == -1
    assert len(mantissa.replace("-", "").replace(".", "")) == 155


def test_repr_and_hash():
    assert "Real" in repr(Real("1.5"))
    with pytest.raises(TypeError):
        hash(Real(1))
