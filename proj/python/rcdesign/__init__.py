"""Moment operators, Pauli-string Markov chains and design distances for random circuits."""

from ._core import (
    clifford2_size,
    decay_k1,
    decay_k2_offdiag,
    design_l1,
    design_l2,
    diamond_bound,
    eigen_gap,
    ensemble_ghat,
    frame_potential,
    gap_mixing_bound,
    haar_ghat,
    l2_mixing_bound,
    mixing_time,
    transition_matrix,
    tv_distance,
    zero_stationary,
    zero_trajectory,
)

__version__ = "0.1.0"
