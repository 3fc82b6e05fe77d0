"""Configurable-precision real arithmetic.

Every numeric quantity in arpopt lives in the Real type defined here: a
radix-2 floating-point value with a mantissa width fixed per run by a
PrecisionConfig.  Two backends are supported and chosen at import time:

* ``gmpy2`` (MPFR): compiled, correctly rounded, fast -- the default when
  installed;
* ``mpmath``: pure Python fallback.

Set the environment variable ``ARPOPT_BACKEND`` to ``gmpy2`` or ``mpmath`` to
force a backend.  The precision is an ambient per-run configuration: call
set_precision() once before any arithmetic.  Mixing Reals from different
configurations raises PrecisionMixError -- runs are deterministic and
bit-reproducible for a fixed configuration and backend.
"""

import math
import os
from fractions import Fraction

from .errors import DomainError, PrecisionMixError

__all__ = [
    "BACKEND",
    "PrecisionConfig",
    "Real",
    "set_precision",
    "active_config",
    "signed_power",
    "log10_abs",
    "ulp",
]

_LOG10_2 = 0.30102999566398119521373889472449


def _select_backend():
    name = os.environ.get("ARPOPT_BACKEND", "").strip().lower()
    if name not in ("", "gmpy2", "mpmath"):
        raise ImportError("ARPOPT_BACKEND must be 'gmpy2' or 'mpmath', got %r" % name)
    if name in ("", "gmpy2"):
        try:
            import gmpy2  # noqa: F401
            return "gmpy2"
        except ImportError:
            if name == "gmpy2":
                raise
    return "mpmath"


BACKEND = _select_backend()

if BACKEND == "gmpy2":
    import gmpy2 as _g

    def _set_bits(bits):
        _g.get_context().precision = bits

    def _from_str(s):
        return _g.mpfr(s)

    def _from_int(i):
        return _g.mpfr(i)

    def _from_float(x):
        return _g.mpfr(x)

    def _ln(x):
        return _g.log(x)

    def _log10(x):
        return _g.log10(x)

    def _exp(x):
        return _g.exp(x)

    def _rootn(x, n):
        return _g.rootn(x, n)

    def _exponent(x):
        # |x| in [2**(e-1), 2**e)
        e, _m = _g.frexp(x)
        return e

    def _is_nan(x):
        return _g.is_nan(x)

    def _to_sci(x, digits):
        if x == 0:
            return "0." + "0" * (digits - 1) + "e+0"
        dstr, dexp, _prec = x.digits(10, digits)
        sign = ""
        if dstr.startswith("-"):
            sign, dstr = "-", dstr[1:]
        return "%s%s.%se%+d" % (sign, dstr[0], dstr[1:], dexp - 1)

else:
    import mpmath as _mp
    from mpmath import libmp as _libmp

    def _set_bits(bits):
        _mp.mp.prec = bits

    def _from_str(s):
        return _mp.mpf(s)

    def _from_int(i):
        return _mp.mpf(i)

    def _from_float(x):
        return _mp.mpf(x)

    def _ln(x):
        return _mp.ln(x)

    def _log10(x):
        return _mp.log(x, 10)

    def _exp(x):
        return _mp.exp(x)

    def _rootn(x, n):
        return _mp.root(x, n)

    def _exponent(x):
        sign, man, exp, bc = x._mpf_
        return exp + bc

    def _is_nan(x):
        return _mp.isnan(x)

    def _to_sci(x, digits):
        if x == 0:
            return "0." + "0" * (digits - 1) + "e+0"
        return _libmp.to_str(x._mpf_, digits, strip_zeros=False,
                             min_fixed=1, max_fixed=0)


class PrecisionConfig:
    """Ambient precision for one run.

    mantissa_bits: binary mantissa width (>= 53).
    decimal_digits: derived as ceil(mantissa_bits * log10(2)); the width of
    the decimal serialization.
    """

    __slots__ = ("mantissa_bits", "decimal_digits")

    def __init__(self, mantissa_bits):
        if not isinstance(mantissa_bits, int) or mantissa_bits < 53:
            raise DomainError("mantissa_bits must be an integer >= 53, got %r"
                              % (mantissa_bits,))
        object.__setattr__(self, "mantissa_bits", mantissa_bits)
        object.__setattr__(self, "decimal_digits",
                           math.ceil(mantissa_bits * _LOG10_2))

    def __setattr__(self, *a):
        raise AttributeError("PrecisionConfig is immutable")

    def __repr__(self):
        return "PrecisionConfig(mantissa_bits=%d, decimal_digits=%d)" % (
            self.mantissa_bits, self.decimal_digits)


DEFAULT_BITS = 512

_active = None


def set_precision(mantissa_bits=DEFAULT_BITS):
    """Fix the ambient precision; returns the new PrecisionConfig.

    May be called between runs (e.g. between tests); values created under the
    old configuration cannot be combined with new ones.  Calling it again
    with the current bit count is a no-op that keeps the active
    configuration (so existing values stay usable).
    """
    global _active
    if _active is not None and _active.mantissa_bits == int(mantissa_bits):
        _set_bits(_active.mantissa_bits)
        return _active
    cfg = PrecisionConfig(mantissa_bits)
    _set_bits(cfg.mantissa_bits)
    _active = cfg
    return cfg


def active_config():
    """The ambient PrecisionConfig, creating the default lazily."""
    global _active
    if _active is None:
        set_precision(DEFAULT_BITS)
    return _active


class Real:
    """Immutable radix-2 floating-point number at the ambient precision.

    Construct from int, str (decimal, possibly scientific notation), float,
    Fraction, or another Real.  All arithmetic rounds to the ambient mantissa
    width; operands from a different PrecisionConfig are rejected.
    """

    __slots__ = ("_raw", "_cfg")

    def __init__(self, value=0):
        cfg = active_config()
        if isinstance(value, Real):
            if value._cfg.mantissa_bits != cfg.mantissa_bits:
                raise PrecisionMixError("Real from inactive configuration")
            raw = value._raw
        elif isinstance(value, int):
            raw = _from_int(value)
        elif isinstance(value, str):
            try:
                raw = _from_str(value.strip())
            except ValueError as exc:
                raise DomainError("cannot parse %r as a Real" % (value,)) from exc
            if _is_nan(raw):
                raise DomainError("cannot parse %r as a Real" % (value,))
        elif isinstance(value, Fraction):
            raw = _from_int(value.numerator) / _from_int(value.denominator)
        elif isinstance(value, float):
            raw = _from_float(value)
        else:
            raise TypeError("cannot build Real from %r" % type(value).__name__)
        object.__setattr__(self, "_raw", raw)
        object.__setattr__(self, "_cfg", cfg)

    def __setattr__(self, *a):
        raise AttributeError("Real is immutable")

    @classmethod
    def _wrap(cls, raw, cfg):
        obj = object.__new__(cls)
        object.__setattr__(obj, "_raw", raw)
        object.__setattr__(obj, "_cfg", cfg)
        return obj

    def _coerce(self, other):
        if isinstance(other, Real):
            if other._cfg.mantissa_bits != self._cfg.mantissa_bits:
                raise PrecisionMixError(
                    "cannot mix Reals from different precision configurations")
            return other._raw
        if isinstance(other, int):
            return _from_int(other)
        if isinstance(other, Fraction):
            return _from_int(other.numerator) / _from_int(other.denominator)
        if isinstance(other, float):
            return _from_float(other)
        return None

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        r = self._coerce(other)
        if r is None:
            return NotImplemented
        return Real._wrap(self._raw + r, self._cfg)

    __radd__ = __add__

    def __sub__(self, other):
        r = self._coerce(other)
        if r is None:
            return NotImplemented
        return Real._wrap(self._raw - r, self._cfg)

    def __rsub__(self, other):
        r = self._coerce(other)
        if r is None:
            return NotImplemented
        return Real._wrap(r - self._raw, self._cfg)

    def __mul__(self, other):
        r = self._coerce(other)
        if r is None:
            return NotImplemented
        return Real._wrap(self._raw * r, self._cfg)

    __rmul__ = __mul__

    def __truediv__(self, other):
        r = self._coerce(other)
        if r is None:
            return NotImplemented
        return Real._wrap(self._raw / r, self._cfg)

    def __rtruediv__(self, other):
        r = self._coerce(other)
        if r is None:
            return NotImplemented
        return Real._wrap(r / self._raw, self._cfg)

    def __pow__(self, other):
        if isinstance(other, int):
            return Real._wrap(self._raw ** other, self._cfg)
        if isinstance(other, Fraction):
            if other.denominator == 1:
                return Real._wrap(self._raw ** other.numerator, self._cfg)
            if self._raw < 0:
                raise DomainError("negative base with fractional exponent")
            return Real._wrap(
                _rootn(self._raw ** other.numerator, other.denominator),
                self._cfg)
        r = self._coerce(other)
        if r is None:
            return NotImplemented
        if self._raw < 0:
            raise DomainError("negative base with Real exponent")
        return Real._wrap(self._raw ** r, self._cfg)

    def __neg__(self):
        return Real._wrap(-self._raw, self._cfg)

    def __pos__(self):
        return self

    def __abs__(self):
        return Real._wrap(abs(self._raw), self._cfg)

    # -- comparisons --------------------------------------------------------

    def _cmp_raw(self, other):
        r = self._coerce(other)
        if r is None:
            return None
        return r

    def __eq__(self, other):
        r = self._cmp_raw(other)
        return NotImplemented if r is None else self._raw == r

    def __ne__(self, other):
        r = self._cmp_raw(other)
        return NotImplemented if r is None else self._raw != r

    def __lt__(self, other):
        r = self._cmp_raw(other)
        return NotImplemented if r is None else self._raw < r

    def __le__(self, other):
        r = self._cmp_raw(other)
        return NotImplemented if r is None else self._raw <= r

    def __gt__(self, other):
        r = self._cmp_raw(other)
        return NotImplemented if r is None else self._raw > r

    def __ge__(self, other):
        r = self._cmp_raw(other)
        return NotImplemented if r is None else self._raw >= r

    __hash__ = None

    # -- transcendental helpers --------------------------------------------

    def ln(self):
        if self._raw <= 0:
            raise DomainError("ln of nonpositive Real")
        return Real._wrap(_ln(self._raw), self._cfg)

    def log10(self):
        if self._raw <= 0:
            raise DomainError("log10 of nonpositive Real")
        return Real._wrap(_log10(self._raw), self._cfg)

    def exp(self):
        return Real._wrap(_exp(self._raw), self._cfg)

    def rootn(self, n):
        if self._raw < 0:
            raise DomainError("even-spirited root of a negative Real")
        return Real._wrap(_rootn(self._raw, n), self._cfg)

    # -- inspection / conversion -------------------------------------------

    def is_zero(self):
        return self._raw == 0

    def sign(self):
        if self._raw > 0:
            return 1
        if self._raw < 0:
            return -1
        return 0

    def exponent(self):
        """e such that |x| is in [2**(e-1), 2**e); requires x != 0."""
        if self._raw == 0:
            raise DomainError("exponent of zero")
        return _exponent(self._raw)

    def __float__(self):
        return float(self._raw)

    def __int__(self):
        return int(self._raw)

    def to_decimal(self):
        """Scientific-notation string with exactly decimal_digits digits."""
        return _to_sci(self._raw, self._cfg.decimal_digits)

    def __repr__(self):
        return "Real(%s)" % _to_sci(self._raw, min(20, self._cfg.decimal_digits))

    def __str__(self):
        return self.to_decimal()


def _as_real(v):
    return v if isinstance(v, Real) else Real(v)


def ulp(t):
    """Unit in the last place of t at the ambient precision (t != 0)."""
    t = _as_real(t)
    if t.is_zero():
        raise DomainError("ulp of zero")
    return Real(2) ** (t.exponent() - t._cfg.mantissa_bits)


def signed_power(t, r):
    """Odd extension |t|**(r-1) * t of the power map; r > 0.

    The exponent may be an int, Fraction, or Real.  Fraction exponents are
    evaluated as rootn(|t|**num, den), which keeps rational powers such as
    4/3 accurate to about one ulp instead of inheriting the rounding of the
    exponent itself.
    """
    t = _as_real(t)
    if isinstance(r, (int, Fraction)):
        if r <= 0:
            raise DomainError("signed_power requires r > 0")
        mag = abs(t) ** r
    else:
        r = _as_real(r)
        if not (r > 0):
            raise DomainError("signed_power requires r > 0")
        if t.is_zero():
            return Real(0)
        mag = abs(t) ** r
    return -mag if t.sign() < 0 else mag


def log10_abs(t):
    """log10(|t|); domain error on t = 0."""
    t = _as_real(t)
    if t.is_zero():
        raise DomainError("log10_abs of zero")
    return abs(t).log10()
