"""All-optical spin-parity measurement on a driven quantum-dot pair.

Simulates the conditional (photon-counting) master equation of two
optically coupled dots, the closed-form expectations for the parity
readout, and the protocols built on top of it: process extraction,
parity-check CNOT composition, and graph-state growth.
"""

from .analytics import (HBAR, detuned_phase, detuning_coefficients,
                        f_spatial, fidelity_no_photon, fidelity_repeat,
                        fidelity_spatial, p_even_analytic)
from .dynamics import (DEFAULT_CONFIG, EnsembleStats, IntegratorConfig,
                       PulseSchedule, Stage, StepSizeError,
                       TimeDependenceError, TrajectoryRecord, decay_stage,
                       evolve_no_jump, evolve_unconditional, liouvillian,
                       parity_schedule, pi_pulse_duration, pulse_stage,
                       run_ensemble, sample_trajectory, unitary_stage)
from .hilbert import (COMPUTATIONAL_INDICES, COMPUTATIONAL_LABELS, DIM_PAIR,
                      SECTOR_INDICES, DensityOperator, Operator, StateVector,
                      computational_state, dyad, expectation, fidelity,
                      index_of, ket, label_of, partial_trace, projector,
                      tensor)
from ._superop import average_gate_fidelity, diamond_distance, diamond_norm
from .model import (GAMMA1_DEFAULT, MODES, DeviceParams, LindbladChannel,
                    RegimeCheck, RegimeReport, canonical_mode, channels,
                    default_device, h2_block, hamiltonian_rotating,
                    ideal_pi_unitary, psi_basis, psi_minus_vector,
                    psi_plus_vector, validate_regime)
from .protocols import (CNOT, CnotComposition, GateProcess, GraphGrowthConfig,
                        GrowthStats, ParityOutcome, cnot_compose,
                        expected_attempts, extract_parity_process,
                        grow_graph, ideal_parity_process, parity_ensemble,
                        parity_measure, phase_correct)

__version__ = "0.1.0"

__all__ = [
    "HBAR", "GAMMA1_DEFAULT", "DIM_PAIR", "MODES",
    "COMPUTATIONAL_INDICES", "COMPUTATIONAL_LABELS", "SECTOR_INDICES",
    "StateVector", "Operator", "DensityOperator",
    "tensor", "dyad", "expectation", "fidelity", "partial_trace",
    "ket", "index_of", "label_of", "computational_state", "projector",
    "p_even_analytic", "fidelity_no_photon", "fidelity_repeat",
    "f_spatial", "fidelity_spatial", "detuned_phase",
    "detuning_coefficients",
    "DeviceParams", "default_device", "LindbladChannel", "channels",
    "canonical_mode",
    "hamiltonian_rotating", "h2_block", "psi_basis", "psi_plus_vector",
    "psi_minus_vector", "ideal_pi_unitary",
    "RegimeCheck", "RegimeReport", "validate_regime",
    "average_gate_fidelity", "diamond_norm", "diamond_distance",
    "IntegratorConfig", "DEFAULT_CONFIG", "Stage", "PulseSchedule",
    "pulse_stage", "decay_stage", "unitary_stage", "parity_schedule",
    "pi_pulse_duration", "liouvillian", "evolve_no_jump",
    "evolve_unconditional", "sample_trajectory", "run_ensemble",
    "TrajectoryRecord", "EnsembleStats", "StepSizeError",
    "TimeDependenceError",
    "ParityOutcome", "parity_measure", "parity_ensemble", "phase_correct",
    "GateProcess", "extract_parity_process", "ideal_parity_process",
    "CNOT", "CnotComposition", "cnot_compose",
    "GraphGrowthConfig", "GrowthStats", "grow_graph", "expected_attempts",
]
