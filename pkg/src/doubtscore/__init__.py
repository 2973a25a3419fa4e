"""Certainty and doubt scores for multi-class classifier outputs."""

from doubtscore.errors import InvalidInputError
from doubtscore.score_core import (
    CertaintyVector,
    DoubtVector,
    argmax_index,
    neg_log_certainty,
    pairwise_certainty,
    pairwise_doubt,
    raw_certainty,
    raw_doubt,
    softmax,
    sort_descending,
    validate_logits,
    validate_probs,
)
from doubtscore.matrix_scores import (
    certainty_matrix,
    certainty_offset_matrix,
    doubt_matrix,
    is_invertible,
    max_doubt_score,
    row_l1_max,
)
from doubtscore.projective import (
    RP1Point,
    angle_to_rp1,
    certainty_projection,
    rp1_new,
    rp1_to_angle,
)
from doubtscore.cost import (
    Gradient,
    certainty_product,
    composite_loss,
    doubt_cost,
    doubt_cost_gradient,
    raw_doubt_cost,
    raw_doubt_cost_gradient,
)

__version__ = "0.1.0"
