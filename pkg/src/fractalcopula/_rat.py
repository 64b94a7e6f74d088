"""Exact rational scalar backend.

Everything in this package computes with exact rationals; no floats enter any
result. Two interchangeable scalar types are supported:

* ``gmpy2.mpq`` (GMP-backed, several times faster on deep meshes), used when
  gmpy2 is importable;
* ``fractions.Fraction`` from the stdlib as the fallback.

Both print identically (``"1/3"``, ``"2"``), so serialized output does not
depend on the backend. Set ``FRACTALCOPULA_BACKEND=fraction`` or ``=gmpy2`` to
force one; the default ``auto`` prefers gmpy2. ``benchmarks/backend_bench.py``
compares the two.
"""

from __future__ import annotations

import os
import re

_choice = os.environ.get("FRACTALCOPULA_BACKEND", "auto").strip().lower()
if _choice not in ("auto", "gmpy2", "fraction"):
    raise RuntimeError(
        "FRACTALCOPULA_BACKEND must be one of auto, gmpy2, fraction; got %r" % _choice
    )

if _choice in ("auto", "gmpy2"):
    try:
        from gmpy2 import mpq as Rat

        BACKEND = "gmpy2"
    except ImportError:
        if _choice == "gmpy2":
            raise
        from fractions import Fraction as Rat

        BACKEND = "fraction"
else:
    from fractions import Fraction as Rat

    BACKEND = "fraction"

ZERO = Rat(0)
ONE = Rat(1)

# Strict token syntax for files: optional sign, integer, optional /denominator.
# Floats are rejected on purpose; this library never rounds silently.
_TOKEN = re.compile(r"^[+-]?\d+(?:/[1-9]\d*)?$")


def rat(value, den=None):
    """Coerce to the active rational type.

    Accepts ints, the active Rat type, fractions.Fraction, and exact token
    strings like "-3/7". Floats raise TypeError.
    """
    if den is not None:
        return Rat(value, den)
    if isinstance(value, float):
        raise TypeError("refusing float %r; pass an exact rational" % value)
    if isinstance(value, str):
        return parse_rat(value)
    return Rat(value)


def parse_rat(token: str):
    """Parse one exact token (``a`` or ``a/b``); raises ValueError otherwise."""
    token = token.strip()
    if not _TOKEN.match(token):
        raise ValueError("not an exact rational token: %r" % token)
    if "/" in token:
        num, den = token.split("/")
        return Rat(int(num), int(den))
    return Rat(int(token))


def format_rat(value) -> str:
    """Canonical token for a rational: lowest terms, ``a`` or ``a/b``."""
    return str(Rat(value))


def with_decimal(value, digits: int = 6) -> str:
    """Exact token with a decimal approximation parenthesized after it."""
    return "%s (%.*g)" % (format_rat(value), digits, float(value))


def floor_div(value) -> int:
    """Exact floor of a rational as a Python int."""
    return value.numerator // value.denominator
