"""Quantitative uncertainty principles: weights, Remez constants, covers and
discrete observability experiments."""

from ._core import (
    QuniqError,
    Weight,
    parse_weight_spec,
    MomentSequence,
    moment_sequence,
    ostrowski_rho,
    log_integral,
    pls_classify,
    bang_degree,
    theta_1d,
    theta_nd,
    pls_constant,
    IntervalSet,
    cantor_set,
    cantor_indices,
    omega_scale,
    greedy_short_cover,
    regularize_cover,
    sparsity_norm_estimate,
    phi_regular_cover_count,
    bourdyat_norm_bound,
    observability_constant,
    recovery_ratio,
    plancherel_derivative_check,
    paley_wiener_profile,
    run_cli,
)

__all__ = [name for name in dir() if not name.startswith("_")]
