"""Schwarzian derivatives, univalence criteria and injectivity diagnostics
for planar harmonic mappings of the unit disk."""

from .errors import (
    DomainError,
    NumericError,
    SchwarzianLabError,
    SensePreservationError,
    SingularEvaluationError,
    UsageError,
)
from .jets import ComplexJet3, jet_binary, jet_compose, jet_elementary
from .maps import (
    HarmonicMap,
    MobiusTransform,
    affine_transform,
    blaschke,
    disk_automorphism,
    eval_harmonic,
    from_h_omega,
    harmonic_mobius,
    holomorphic_map,
    make_f_alpha,
    normalizing_automorphism,
    parse_map,
    scaling_map,
    shear,
)

__version__ = "0.1.0"
