"""Sine distance, fidelity and Kraus-operation bounds for finite-dimensional quantum states."""
from .channels import (
    KrausChannel,
    Povm,
    apply,
    branch,
    branch_probs,
    extend,
    output_state,
    povm_probs,
    povm_to_channel,
    success_prob,
)
from .errors import SineDistError
from .metrics import (
    DistanceReport,
    angle,
    bures,
    distance_report,
    fidelity,
    fidelity_oracle_purification_search,
    sine_distance,
)
from .states import DensityMatrix, PureState, make_pair, purify

__all__ = [
    "DensityMatrix",
    "DistanceReport",
    "KrausChannel",
    "Povm",
    "PureState",
    "SineDistError",
    "angle",
    "apply",
    "branch",
    "branch_probs",
    "bures",
    "distance_report",
    "extend",
    "fidelity",
    "fidelity_oracle_purification_search",
    "make_pair",
    "output_state",
    "povm_probs",
    "povm_to_channel",
    "purify",
    "sine_distance",
    "success_prob",
]
