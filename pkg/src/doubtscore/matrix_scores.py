"""Matrix encodings of certainty and doubt.

``C0 = p 1^T - 1 p^T`` is skew-symmetric, ``C = I + C0`` is always invertible,
and the doubt matrix is the elementwise (not matrix) reciprocal of ``C``
minus ``I``. For ``p = [.5, .5]`` the matrix inverse of ``C`` is ``I`` while
the doubt matrix has infinite off-diagonals, which is the reason for using
the elementwise form.
"""

import math
import warnings

import numpy as np
import scipy.linalg

from doubtscore.errors import InvalidInputError
from doubtscore.extended import INF
from doubtscore.score_core import validate_probs


def certainty_offset_matrix(p):
    p = validate_probs(p)
    # entry (i, k) is p_i - p_k, so (k, i) is its exact negation
    return p[:, None] - p[None, :]


def certainty_matrix(p):
    c0 = certainty_offset_matrix(p)
    return np.eye(c0.shape[0]) + c0


def is_invertible(C):
    """Check invertibility of ``C`` with an LU factorization.

    Returns ``(ok, cond)`` where ``cond`` is the 1-norm condition estimate,
    or ``inf`` when a zero pivot shows up.
    """
    C = np.asarray(C, dtype=float)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {C.shape}")
    with warnings.catch_warnings():
        # a zero pivot is a normal False answer here
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, _ = scipy.linalg.lu_factor(C, check_finite=True)
    if np.any(np.diag(lu) == 0):
        return False, INF
    anorm = np.abs(C).sum(axis=0).max()
    rcond = scipy.linalg.lapack.dgecon(lu, anorm, norm="1")[0]
    if rcond == 0:
        return False, INF
    return True, float(1.0 / rcond)


def doubt_matrix(p):
    """Signed elementwise reciprocal of ``C(p)`` with a zero diagonal.

    Off-diagonal ``(i, k)`` is ``1 / (p_i - p_k)``; equal coordinates give
    ``+inf`` (both ``+0`` gaps, since ``x - x`` is ``+0`` in IEEE arithmetic).
    """
    c0 = certainty_offset_matrix(p)
    with np.errstate(divide="ignore"):
        d = np.where(c0 == 0, INF, 1.0 / c0)
    np.fill_diagonal(d, 0.0)
    return d


def max_doubt_score(p):
    """Extended Chebyshev norm of the doubt matrix: ``1 / min_{i != k} |p_i - p_k|``."""
    p = validate_probs(p)
    d = np.abs(doubt_matrix(p))
    return float(d.max())


def row_l1_max(p):
    """Largest row 1-norm of ``C(p)``; a secondary reading of the min-certainty summary."""
    C = certainty_matrix(p)
    return max(math.fsum(np.abs(row)) for row in C)


def matrix_summary(p):
    return {
        "offset": certainty_offset_matrix(p),
        "certainty": certainty_matrix(p),
        "doubt": doubt_matrix(p),
        "max_doubt": max_doubt_score(p),
        "row_l1_max": row_l1_max(p),
    }
