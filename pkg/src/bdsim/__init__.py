"""Pseudo-spectral toolkit for the damped 2D Boussinesq system near hydrostatic balance."""

__version__ = "0.1.0"

from .errors import IntegrationFailure, InvalidInputError, ResolutionWarning
from .grid import FourierGrid, SpectralField
from .state import FlowState
from .semigroup import (certify_envelopes, classify, decay_envelope, eigenvalues,
                        propagator, propagator_oracle)
from .norms import NormSpec, sobolev_norm, space_norm
from .solver import InitialDataSpec, SolverConfig, generate_initial, simulate, step
from .functionals import FunctionalLedger
from .identities import cancellation_suite, commutator_probe, product_rule_identity
from .snapshot import read_snapshot, write_snapshot

__all__ = [
    "IntegrationFailure", "InvalidInputError", "ResolutionWarning",
    "FourierGrid", "SpectralField", "FlowState",
    "certify_envelopes", "classify", "decay_envelope", "eigenvalues", "propagator",
    "propagator_oracle", "NormSpec", "sobolev_norm", "space_norm",
    "InitialDataSpec", "SolverConfig", "generate_initial", "simulate", "step",
    "FunctionalLedger", "cancellation_suite", "commutator_probe", "product_rule_identity",
    "read_snapshot", "write_snapshot",
]
