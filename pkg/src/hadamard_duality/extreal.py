"""Extended-real arithmetic on IEEE floats.

Values of the extended line are plain ``float`` objects; ``math.inf`` and
``-math.inf`` play the role of the two infinities.  The helpers below add
the one rule IEEE arithmetic gets wrong for our purposes: ``inf + (-inf)``
is an error instead of ``nan``.
"""
import math

INF = math.inf


class UndefinedSumError(ArithmeticError):
    """Raised for ``(+inf) + (-inf)``."""


def ext_add(a, b):
    a = float(a)
    b = float(b)
    if math.isinf(a) and math.isinf(b) and a != b:
        raise UndefinedSumError("(+inf) + (-inf) is undefined")
    return a + b


def ext_sub(a, b):
    return ext_add(a, -float(b))


def ext_neg(a):
    return -float(a)


def is_finite(a):
    return math.isfinite(a)


def to_json(a):
    """Encode an extended real for JSON (``"+inf"`` / ``"-inf"`` strings)."""
    a = float(a)
    if a == INF:
        return "+inf"
    if a == -INF:
        return "-inf"
    if math.isnan(a):
        raise ValueError("nan is not an extended real")
    return a


def from_json(v):
    if isinstance(v, str):
        s = v.strip().lower()
        if s in ("+inf", "inf", "infinity", "+infinity"):
            return INF
        if s in ("-inf", "-infinity"):
            return -INF
        return float(s)
    return float(v)
