"""Fock-basis simulation of multiphoton entanglement swapping with a generalized Bell measurement."""

from .channels import LossConfig, balanced_bs, db_to_reflectivity, db_to_transmittance, loss_channel
from .fock import (
    FockDensityOperator,
    FockProjector,
    InvariantViolation,
    SchmidtSpectrum,
    partial_trace,
    project_and_renormalize,
    schmidt_cutoff,
    schmidt_weights,
    sv_pure_state,
    tensor,
)
from .kravchuk import BsAmplitudeTable, bs_amplitude, bs_amplitude_table, kravchuk_fn, kravchuk_poly
from .measures import BipartiteSplit, log_negativity, log_negativity_pure_closed, qfi_pure
from .protocol import (
    ConditionalResult,
    PipelineConfig,
    Source,
    closed_form_conditional,
    epsilon_state,
    idler_loss_state,
    simulate_pipeline,
    symmetric_decomposition,
)

__version__ = "0.1.0"

__all__ = [
    "BipartiteSplit",
    "BsAmplitudeTable",
    "ConditionalResult",
    "FockDensityOperator",
    "FockProjector",
    "InvariantViolation",
    "LossConfig",
    "PipelineConfig",
    "SchmidtSpectrum",
    "Source",
    "balanced_bs",
    "bs_amplitude",
    "bs_amplitude_table",
    "closed_form_conditional",
    "db_to_reflectivity",
    "db_to_transmittance",
    "epsilon_state",
    "idler_loss_state",
    "kravchuk_fn",
    "kravchuk_poly",
    "log_negativity",
    "log_negativity_pure_closed",
    "loss_channel",
    "partial_trace",
    "project_and_renormalize",
    "qfi_pure",
    "schmidt_cutoff",
    "schmidt_weights",
    "simulate_pipeline",
    "sv_pure_state",
    "symmetric_decomposition",
    "tensor",
]
