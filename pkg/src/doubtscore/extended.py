"""Extended reals: plain floats where +/-inf are legal values and NaN is not.

Doubt values live in R u {inf}. Python floats already carry infinities, so the
helpers here only pin down reciprocals and the text encoding used in reports.
"""

import math

INF = math.inf


def reciprocal(x):
    """1/x with 1/0 -> inf and 1/inf -> 0. The sign of a finite x is kept."""
    if x == 0:
        return INF
    if math.isinf(x):
        return 0.0
    return 1.0 / x


def is_extended_real(x):
    return isinstance(x, (int, float)) and not math.isnan(x)


def encode(x):
    """JSON/CSV encoding: infinities become the strings "inf" / "-inf"."""
    x = float(x)
    if x == INF:
        return "inf"
    if x == -INF:
        return "-inf"
    return x


def decode(token):
    if token == "inf":
        return INF
    if token == "-inf":
        return -INF
    if isinstance(token, str):
        raise ValueError(f"not an extended real: {token!r}")
    return float(token)


def encode_list(values):
    return [encode(v) for v in values]


def decode_list(tokens):
    return [decode(t) for t in tokens]
