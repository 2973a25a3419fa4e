"""Arcsin doubt cost and its gradient.

With ``P`` the product of the off-top gaps (probabilities or logits),

    theta = arcsin((1 - P^2) / (1 + P^2))

which is the angle of the projective point ``[P:1]``. It is 0 for a one-hot
vector, pi/2 whenever some gap is zero, and negative for logits whose gap
product exceeds 1.

The value is computed as ``pi/2 - 2 atan|P|``, the same function. The arcsin
form loses about eps/P of accuracy as its argument approaches 1 (1e-9 error
at P = 1e-9); the arctan form keeps full precision.

Gradients treat the top index ``j`` as fixed. Differentiating the arcsin
through ``u = P^2`` gives ``dtheta/du = -1 / ((1 + u) sqrt(u))`` and
``du/dP = 2P``, so ``dtheta/dP = -2 sign(P) / (1 + P^2)``. That form is finite
right up to ``P = 0`` and never evaluates arcsin' at the boundary. A sample
with a zero gap is flagged degenerate and gets a zero gradient.
"""

import math
from dataclasses import dataclass

import numpy as np

from doubtscore.errors import InvalidInputError
from doubtscore.score_core import softmax, validate_logits, validate_probs

HALF_PI = math.pi / 2


@dataclass(frozen=True)
class Gradient:
    values: np.ndarray
    degenerate: bool = False


def _off_gaps(v, j):
    return [float(v[j] - v[i]) for i in range(v.size) if i != j]


def _theta(prod):
    return HALF_PI - 2.0 * math.atan(abs(prod))


def _top(v, j):
    if j is None:
        return int(np.argmax(v))
    if not 0 <= j < v.size:
        raise InvalidInputError(f"index {j} out of range for {v.size} classes")
    return j


def certainty_product(p):
    """Product of off-top probability gaps; zero exactly on a tied maximum."""
    p = validate_probs(p)
    return math.prod(_off_gaps(p, _top(p, None)))


def doubt_cost(p):
    p = validate_probs(p)
    return _theta(math.prod(_off_gaps(p, _top(p, None))))


def raw_doubt_cost(y):
    y = validate_logits(y)
    return _theta(math.prod(_off_gaps(y, _top(y, None))))


def _gap_gradient(v, j):
    n = v.size
    j = _top(v, j)
    idx = [i for i in range(n) if i != j]
    gaps = np.array([v[j] - v[i] for i in idx])
    if np.any(gaps == 0):
        return Gradient(np.zeros(n), degenerate=True)
    prod = math.prod(gaps)
    dtheta_dprod = -2.0 * math.copysign(1.0, prod) / (1.0 + prod * prod)
    # products of all gaps but one, without dividing by the gap
    m = gaps.size
    prefix = np.ones(m)
    suffix = np.ones(m)
    for k in range(1, m):
        prefix[k] = prefix[k - 1] * gaps[k - 1]
        suffix[m - 1 - k] = suffix[m - k] * gaps[m - k]
    dprod_dgap = dtheta_dprod * prefix * suffix
    grad = np.zeros(n)
    grad[idx] = -dprod_dgap
    grad[j] = dprod_dgap.sum()
    if not np.all(np.isfinite(grad)):
        grad = np.nan_to_num(grad, nan=0.0, posinf=0.0, neginf=0.0)
    return Gradient(grad, degenerate=False)


def doubt_cost_gradient(p, j=None):
    """d theta / d p in ambient coordinates, top index held fixed.

    The input is not required to sum to 1, so finite-difference probes off the
    simplex are allowed; entries must be finite.
    """
    p = validate_logits(p)
    return _gap_gradient(p, j)


def raw_doubt_cost_gradient(y, j=None):
    """d theta / d y; sums to zero (constant shifts lie in the kernel)."""
    y = validate_logits(y)
    return _gap_gradient(y, j)


def cross_entropy(y, target):
    y = validate_logits(y)
    m = y.max()
    lse = m + math.log(math.fsum(math.exp(v - m) for v in y))
    return lse - y[target]


def composite_loss(y, target, lam):
    """Cross-entropy of ``softmax(y)`` plus ``lam`` times the raw doubt cost.

    Returns ``(loss, Gradient)``; the gradient's degenerate flag comes from the
    doubt term.
    """
    y = validate_logits(y)
    target = int(target)
    if not 0 <= target < y.size:
        raise InvalidInputError(f"target {target} out of range for {y.size} classes")
    if lam < 0:
        raise InvalidInputError(f"lambda must be >= 0, got {lam}")
    ce = cross_entropy(y, target)
    ce_grad = softmax(y)
    ce_grad[target] -= 1.0
    if lam == 0:
        return ce, Gradient(ce_grad)
    pen = _gap_gradient(y, None)
    loss = ce + lam * raw_doubt_cost(y)
    return loss, Gradient(ce_grad + lam * pen.values, pen.degenerate)


def batch_raw_doubt_cost(Y):
    """Row-wise raw doubt cost and gradient for a logit matrix ``(n, K)``.

    Returns ``(theta, grad, degenerate)``. Same conventions as the per-sample
    functions; used by the training loop.
    """
    Y = np.asarray(Y, dtype=float)
    n, K = Y.shape
    rows = np.arange(n)
    j = np.argmax(Y, axis=1)
    gaps = Y[rows, j][:, None] - Y
    gaps[rows, j] = 1.0
    degenerate = np.any(gaps == 0, axis=1)
    prod = np.prod(gaps, axis=1)
    theta = HALF_PI - 2.0 * np.arctan(np.abs(prod))
    with np.errstate(over="ignore"):
        dtheta_dprod = -2.0 * np.sign(prod) / (1.0 + prod * prod)
    prefix = np.ones_like(gaps)
    suffix = np.ones_like(gaps)
    for k in range(1, K):
        prefix[:, k] = prefix[:, k - 1] * gaps[:, k - 1]
        suffix[:, K - 1 - k] = suffix[:, K - k] * gaps[:, K - k]
    with np.errstate(over="ignore", invalid="ignore"):
        dgap = dtheta_dprod[:, None] * prefix * suffix
    dgap[rows, j] = 0.0
    grad = -dgap
    grad[rows, j] = dgap.sum(axis=1)
    grad[degenerate] = 0.0
    grad = np.nan_to_num(grad, nan=0.0, posinf=0.0, neginf=0.0)
    return theta, grad, degenerate
