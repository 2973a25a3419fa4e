"""Pairwise certainty and doubt on probability vectors and logits.

For a score vector v with top index j, the certainty of label i is the gap
v[j] - v[i] and its doubt is the reciprocal of that gap. The top label gets
certainty 1 and doubt 0 by convention. On probabilities the off-top
certainties lie in [0, p_max] and the doubts in [1/p_max, inf]; on logits
the same constructions give the "raw" scores, which are log-probability gaps.
"""

import math
from dataclasses import dataclass

import numpy as np

from doubtscore.errors import InvalidInputError
from doubtscore.extended import INF

SUM_TOL = 1e-9
NEG_TOL = 1e-12


@dataclass(frozen=True)
class CertaintyVector:
    scores: np.ndarray
    argmax_index: int

    def off_argmax(self):
        return np.delete(self.scores, self.argmax_index)


@dataclass(frozen=True)
class DoubtVector:
    """Doubt scores; entries are extended reals (``inf`` marks an exact tie)."""

    scores: np.ndarray
    argmax_index: int

    def off_argmax(self):
        return np.delete(self.scores, self.argmax_index)


def _as_vector(values):
    try:
        v = np.asarray(values, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"not a numeric vector: {values!r}") from exc
    if v.ndim != 1:
        raise InvalidInputError(f"expected a 1-d vector, got shape {v.shape}")
    if v.size < 2:
        raise InvalidInputError(f"need at least 2 classes, got {v.size}")
    return v


def validate_probs(values):
    """Return ``values`` as a float array on the probability simplex.

    Entries down to -1e-12 are accepted and clamped to 0; the sum must be
    within 1e-9 of 1.
    """
    p = _as_vector(values)
    if not np.all(np.isfinite(p)):
        raise InvalidInputError("probabilities must be finite")
    if np.any(p < -NEG_TOL):
        raise InvalidInputError(f"negative probability {p.min()!r}")
    p = np.where(p < 0, 0.0, p)
    total = math.fsum(p)
    if abs(total - 1.0) > SUM_TOL:
        raise InvalidInputError(f"probabilities sum to {total!r}, not 1")
    return p


def validate_logits(values):
    y = _as_vector(values)
    if not np.all(np.isfinite(y)):
        raise InvalidInputError("logits must be finite")
    return y


def argmax_index(values):
    """Index of the largest entry; ties go to the smallest index."""
    v = _as_vector(values)
    return int(np.argmax(v))


def sort_descending(p):
    """Stable descending sort. Returns ``(sorted, perm)`` with ``sorted == p[perm]``."""
    p = validate_probs(p)
    perm = np.argsort(-p, kind="stable")
    return p[perm], perm


def softmax(y):
    """Softmax of one logit vector, accumulated with ``math.fsum``."""
    y = validate_logits(y)
    m = y.max()
    e = [math.exp(v - m) for v in y]
    s = math.fsum(e)
    return np.array([x / s for x in e])


def _gaps(v, j):
    if j is None:
        j = int(np.argmax(v))
    elif not 0 <= j < v.size:
        raise InvalidInputError(f"index {j} out of range for {v.size} classes")
    gaps = v[j] - v
    gaps[j] = 1.0
    return gaps, j


def _reciprocals(gaps, j):
    with np.errstate(divide="ignore"):
        out = np.where(gaps == 0, INF, 1.0 / gaps)
    out[j] = 0.0
    return out


def pairwise_certainty(p, j=None):
    """Gaps ``p[j] - p[i]`` with 1 at the top index.

    Passing ``j`` re-scores against a label other than the argmax; gaps may
    then be negative.
    """
    p = validate_probs(p)
    gaps, j = _gaps(p, j)
    return CertaintyVector(gaps, j)


def pairwise_doubt(p, j=None):
    p = validate_probs(p)
    gaps, j = _gaps(p, j)
    return DoubtVector(_reciprocals(gaps, j), j)


def raw_certainty(y, j=None):
    """Logit gaps ``y[j] - y[i]``; unbounded above, shift invariant."""
    y = validate_logits(y)
    gaps, j = _gaps(y, j)
    return CertaintyVector(gaps, j)


def raw_doubt(y, j=None):
    y = validate_logits(y)
    gaps, j = _gaps(y, j)
    return DoubtVector(_reciprocals(gaps, j), j)


def neg_log_certainty(p):
    """``-ln`` of each pairwise certainty; ``inf`` where the gap is zero."""
    cert = pairwise_certainty(p)
    j = cert.argmax_index
    out = np.empty_like(cert.scores)
    for i, c in enumerate(cert.scores):
        if i == j:
            out[i] = 0.0
        elif c == 0:
            out[i] = INF
        else:
            # + 0.0 turns -ln(1) = -0.0 into 0.0
            out[i] = -math.log(c) + 0.0
    return DoubtVector(out, j)
