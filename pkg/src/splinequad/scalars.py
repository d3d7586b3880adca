"""Scalar backends: exact rationals or binary64 floats.

Every algorithm in this package is generic over the scalar type carried
by the input geometry. Exact verification uses rationals (gmpy2.mpq when
importable, fractions.Fraction otherwise); float inputs flow through the
same code paths with ordinary IEEE arithmetic.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

try:
    from gmpy2 import mpq as _mpq
except ImportError:  # pragma: no cover - gmpy2 is an optional speedup
    _mpq = None

#: Scalars accepted throughout the library; gmpy2.mpq works wherever a
#: Fraction does.
Scalar = Union[int, float, Fraction]

if _mpq is None:
    _RATIONAL_TYPES = (int, Fraction)
else:
    _RATIONAL_TYPES = (int, Fraction, type(_mpq()))

HALF = Fraction(1, 2)
THIRD = Fraction(1, 3)


def rational(value) -> Scalar:
    """Convert ``value`` to the canonical exact rational type.

    Accepts ints, Fractions, gmpy2.mpq values, and strings such as
    ``"25/48"``, ``"0.25"``, or ``"1e-3"`` (all parsed exactly). Floats
    are rejected so binary round-off never silently enters an exact
    computation.
    """
    if isinstance(value, float):
        raise TypeError(f"refusing to treat float {value!r} as an exact rational")
    if isinstance(value, str):
        value = Fraction(value.strip())
    elif not isinstance(value, _RATIONAL_TYPES):
        raise TypeError(f"cannot interpret {value!r} as an exact rational")
    if _mpq is not None:
        return _mpq(value)
    return Fraction(value)


def is_exact(value) -> bool:
    """True when ``value`` carries exact rational arithmetic."""
    return isinstance(value, _RATIONAL_TYPES)


def exact_str(value) -> str:
    """Render an exact scalar as ``"p"`` or ``"p/q"``."""
    f = Fraction(value)
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


def scalar_str(value) -> str:
    """Exact scalars as fraction strings, floats via repr."""
    return exact_str(value) if is_exact(value) else repr(value)


def check_finite(value) -> None:
    if isinstance(value, float) and not math.isfinite(value):
        raise ValueError(f"non-finite coordinate {value!r}")
