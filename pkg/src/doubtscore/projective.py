"""Points on the real projective line and the certainty map into it.

A point ``[a:b]`` is stored as its unit-norm representative with the first
nonzero coordinate positive. Certainty ``g`` and doubt ``1/g`` for the same
label are one point, ``[g:1] = [1:1/g]``; a tie is the point at infinity
``[0:1]``.

``angle_to_rp1`` and ``rp1_to_angle`` are the stereographic pair between the
circle and the projective line. Angles are returned in ``[-pi/2, pi/2]``;
``angle_to_rp1`` is 2-to-1 on the full circle (antipodes collapse).
"""

import math
from dataclasses import dataclass

import numpy as np

from doubtscore.errors import InvalidInputError
from doubtscore.score_core import validate_probs

EQ_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class RP1Point:
    a: float
    b: float

    def __eq__(self, other):
        if not isinstance(other, RP1Point):
            return NotImplemented
        return abs(self.a * other.b - other.a * self.b) <= EQ_TOL

    __hash__ = None

    @property
    def is_infinity(self):
        return self.a == 0.0

    def as_list(self):
        return [self.a, self.b]


def rp1_new(a, b):
    a, b = float(a), float(b)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise InvalidInputError(f"non-finite homogeneous coordinates ({a}, {b})")
    if a == 0 and b == 0:
        raise InvalidInputError("[0:0] is not a projective point")
    r = math.hypot(a, b)
    a, b = a / r, b / r
    if a < 0 or (a == 0 and b < 0):
        a, b = -a, -b
    # avoid -0.0 leaking into the canonical form
    return RP1Point(a + 0.0, b + 0.0)


INFINITY = RP1Point(0.0, 1.0)
ORIGIN = RP1Point(1.0, 0.0)


def certainty_projection(p_ordered):
    """Image of a descending probability vector under the certainty map.

    The top label maps to ``[1:0]``; label ``i`` maps to ``[p_1 - p_i : 1]``,
    which is the point at infinity exactly when ``p_1 == p_i``.
    """
    p = validate_probs(p_ordered)
    if np.any(np.diff(p) > 0):
        raise InvalidInputError("input must be sorted in descending order; use sort_descending")
    return [ORIGIN] + [rp1_new(p[0] - x, 1.0) for x in p[1:]]


def angle_to_rp1(theta):
    theta = float(theta)
    if not math.isfinite(theta):
        raise InvalidInputError(f"angle must be finite, got {theta}")
    s, c = math.sin(theta), math.cos(theta)
    if s == 1.0:
        # first chart [1 - sin : cos] is undefined at pi/2
        return rp1_new(c, 1.0 + s)
    return rp1_new(1.0 - s, c)


def rp1_to_angle(pt):
    """Inverse stereographic map ``arcsin((b^2 - a^2) / (a^2 + b^2))``, with ``[0:1] -> pi/2``.

    Evaluated as ``pi/2 - 2 atan2(|a|, |b|)``, which is the same function but
    stays accurate where the arcsin argument is close to +-1.
    """
    if pt.a == 0:
        return math.pi / 2
    return math.pi / 2 - 2.0 * math.atan2(abs(pt.a), abs(pt.b))
