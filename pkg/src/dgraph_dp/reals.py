"""Extended-real rendering that survives a text round trip bit for bit."""

from __future__ import annotations

import math


def format_real(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x.is_integer() and abs(x) < 2**53 and not (x == 0 and math.copysign(1.0, x) < 0):
        return str(int(x))
    return repr(float(x))


def parse_real(token: str) -> float:
    x = float(token)
    if math.isnan(x):
        raise ValueError(f"not a number: {token!r}")
    return x
