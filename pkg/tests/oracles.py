"""Independent oracles used to cross-check the library.

Everything here deliberately avoids the arpopt implementation paths being
tested: exact rational arithmetic uses Fraction, and irrational reference
values come from mpmath used directly at elevated precision.
"""

from fractions import Fraction
from math import comb

import mpmath


def frac_polyval(coeffs, x):
    """Exact Horner evaluation of ascending rational coefficients."""
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + Fraction(c)
    return acc


def frac_derivative(coeffs):
    return [Fraction(c) * j for j, c in enumerate(coeffs)][1:] or [Fraction(0)]


def frac_shift(coeffs, a):
    """Exact coefficients of P(a + s) in s, via binomial expansion."""
    a = Fraction(a)
    n = len(coeffs)
    out = [Fraction(0)] * n
    for j, c in enumerate(coeffs):
        c = Fraction(c)
        for i in range(j + 1):
            out[i] += c * comb(j, i) * a ** (j - i)
    return out


# f(x) = 3x^4 - 4x^3 and the degenerate family x^q/q + x^(p+1)/(p+1)
EXAMPLE_A_COEFFS = [Fraction(0), Fraction(0), Fraction(0), Fraction(-4),
                    Fraction(3)]


def example_b_coeffs(p, q):
    coeffs = [Fraction(0)] * (p + 2)
    coeffs[q] = Fraction(1, q)
    coeffs[p + 1] = Fraction(1, p + 1)
    return coeffs


def newton_iterates_A(x0, n):
    """Exact rational Newton iterates for f(x) = 3x^4 - 4x^3."""
    x = Fraction(x0)
    out = [x]
    d1 = frac_derivative(EXAMPLE_A_COEFFS)
    d2 = frac_derivative(d1)
    for _ in range(n):
        x = x - frac_polyval(d1, x) / frac_polyval(d2, x)
        out.append(x)
    return out


def newton_iterates_B(x0, n, p=4, q=4):
    """Exact rational Newton iterates for the degenerate example."""
    coeffs = example_b_coeffs(p, q)
    d1 = frac_derivative(coeffs)
    d2 = frac_derivative(d1)
    x = Fraction(x0)
    out = [x]
    for _ in range(n):
        x = x - frac_polyval(d1, x) / frac_polyval(d2, x)
        out.append(x)
    return out


def hp_real(fn, prec=800):
    """Evaluate fn() under an elevated mpmath working precision."""
    with mpmath.workprec(prec):
        return fn()


def hp_model_minimum(terms, sigma, power, prec=800, span=None):
    """Grid + derivative-bisection global minimization oracle.

    terms are ascending Taylor coefficients in s (exact rationals or
    floats); the regularizer is sigma * |s|^power.  Returns (s_min, value)
    as mpmath floats at the elevated precision.
    """
    with mpmath.workprec(prec):
        terms = [mpmath.mpf(t.numerator) / t.denominator
                 if isinstance(t, Fraction) else mpmath.mpf(t)
                 for t in terms]
        sigma = (mpmath.mpf(sigma.numerator) / sigma.denominator
                 if isinstance(sigma, Fraction) else mpmath.mpf(sigma))

        def val(s):
            acc = mpmath.mpf(0)
            for c in reversed(terms):
                acc = acc * s + c
            return acc + sigma * abs(s) ** power

        def dval(s):
            acc = mpmath.mpf(0)
            for j in range(len(terms) - 1, 0, -1):
                acc = acc * s + terms[j] * j
            return acc + sigma * power * abs(s) ** (power - 1) * mpmath.sign(s)

        if span is None:
            top = max(abs(t) for t in terms[:-1]) if len(terms) > 1 else 1
            span = 2 * (1 + top / sigma + 1)
        n = 4096
        best_s, best_v = mpmath.mpf(0), val(mpmath.mpf(0))
        xs = [-span + 2 * span * i / n for i in range(n + 1)]
        for a, b in zip(xs, xs[1:]):
            da, db = dval(a), dval(b)
            if da <= 0 <= db:
                lo, hi = mpmath.mpf(a), mpmath.mpf(b)
                for _ in range(prec + 16):
                    mid = (lo + hi) / 2
                    if dval(mid) <= 0:
                        lo = mid
                    else:
                        hi = mid
                s = (lo + hi) / 2
                v = val(s)
                if v < best_v:
                    best_s, best_v = s, v
        return best_s, best_v
