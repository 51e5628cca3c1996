"""The network Γ, the penalty d and the projection φ_d."""

from .penalty import (
    PENALTY,
    PenaltyField,
    IdentityReport,
    check_identities,
    invariance_threshold,
    kappa,
    penalty,
    penalty_array,
    penalty_gradient,
    penalty_gradient_array,
)
from .projection import (
    BRANCH_CODES,
    classify_branch,
    dominant_branch,
    holder_ratio,
    network_distance,
    project_array,
    project_to_network,
    projected_plane,
)

__all__ = [
    'PENALTY',
    'PenaltyField',
    'IdentityReport',
    'check_identities',
    'invariance_threshold',
    'kappa',
    'penalty',
    'penalty_array',
    'penalty_gradient',
    'penalty_gradient_array',
    'BRANCH_CODES',
    'classify_branch',
    'dominant_branch',
    'holder_ratio',
    'network_distance',
    'project_array',
    'project_to_network',
    'projected_plane',
]
