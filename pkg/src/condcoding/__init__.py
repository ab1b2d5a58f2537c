"""Exact information measures for residual versus conditional interframe coding."""
from condcoding.kernels import BACKEND
from condcoding.prob import (
    Alphabet,
    DeterministicMap,
    InvalidArgumentError,
    Joint2,
    Pmf,
    apply_map_to_col,
    conditional_entropy_row_given_col,
    conditional_mutual_information_via_map,
    entropy,
    joint_entropy,
    joint_from_channel,
    marginal_col,
    marginal_row,
    mutual_information,
    pmf_uniform,
    residual_joint,
)

__version__ = "0.1.0"
