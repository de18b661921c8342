"""Masked multi-party expression display over Fourier coefficient streams."""

from .theta import (
    RootBaseMismatch,
    RootFactor,
    ThetaError,
    ThetaExpr,
    UnresolvedRoot,
    eval_t,
    formal_root,
    power,
    star_mul,
)
from .fourier import (
    CoefficientSet,
    CosineRule,
    FourierError,
    MixedParity,
    TauOutOfRange,
    coefficients_by_quadrature,
    constants_pipeline,
    constants_product,
    convolve,
    cosine_coefficients,
    cross_integral,
    dense,
    identity_gap,
    kernel_transform,
    moment,
    normalize_eta,
    normalized_cosine_basis,
)
from .chebyshev import ChebModel, cheb_nodes, error_bound, interp_1d, interp_2d
from .protocol import (
    HyperVector,
    MaskSet,
    OracleMismatch,
    PartyMasks,
    ProtocolError,
    SecretInput,
    SubsetTooLarge,
    TelescopeViolation,
    Transcript,
    UnnormalizedBasis,
    baseline_round,
    multi_node_round,
    n_party_round,
    oracle_display,
    residual_diagnostic,
    sample_masks,
    simulate_views,
    split_secret,
    two_party_round,
    wrapped_display,
)
from .harness import (
    ConfigInvalid,
    MessageLog,
    Report,
    Scenario,
    assert_no_internode_traffic,
    privacy_check,
    run,
    serialize,
)

__version__ = "0.1.0"
