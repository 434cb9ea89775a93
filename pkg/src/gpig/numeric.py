"""Numeric backends.

Two modes are supported and selected at run time:

* ``rational`` -- arbitrary-precision rationals.  Every operation downstream
  is exact; gmpy2's mpq is used when importable (much faster on deep
  recursions), with ``fractions.Fraction`` as a drop-in fallback.
* ``float`` -- IEEE doubles, the performance path.
"""

from fractions import Fraction

try:
    from gmpy2 import mpq as _mpq

    HAVE_GMPY2 = True
except ImportError:  # pragma: no cover - environment dependent
    _mpq = None
    HAVE_GMPY2 = False

RATIONAL = "rational"
FLOAT = "float"
MODES = (RATIONAL, FLOAT)

#: absolute tolerance used for float-mode mass checks and coalescing
FLOAT_TOL = 1e-12


def check_mode(mode):
    if mode not in MODES:
        raise ValueError(f"unknown numeric mode {mode!r}; expected one of {MODES}")


def rational(value):
    """Exact rational from an int, Fraction, float or string ('1/6', '0.25').

    Strings are read exactly: '1/6' is the true sixth, '0.25' the true
    quarter.  Floats convert via their exact binary expansion.
    """
    if isinstance(value, str):
        value = Fraction(value)
    elif isinstance(value, float):
        value = Fraction(value)
    if HAVE_GMPY2:
        return _mpq(value)
    return Fraction(value)


def coerce(value, mode):
    """Interpret ``value`` in the given mode."""
    check_mode(mode)
    if mode == RATIONAL:
        return rational(value)
    if isinstance(value, str):
        return float(Fraction(value))
    return float(value)


def is_exact(value):
    """True when the value participates in exact arithmetic."""
    return not isinstance(value, float)


def format_value(value, mode, float_digits=8):
    """Render a value: 'num/den' in rational mode, fixed decimals in float."""
    if mode == RATIONAL:
        return format_exact(value)
    return f"{float(value):.{float_digits}f}"


def format_exact(q):
    num, den = q.numerator, q.denominator
    if den == 1:
        return str(num)
    return f"{num}/{den}"


def format_curve(value, mode):
    """Curve-CSV rendering: exact fraction, or 17 significant digits."""
    if mode == RATIONAL:
        return format_exact(value)
    return f"{float(value):.17g}"


def ceil_div(num, den):
    """Ceiling of num/den for positive integer den."""
    return -((-num) // den)
