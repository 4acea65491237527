"""Causal maps between two time-ordered qubits."""

from ._qcausal import (
    ArgumentError,
    CausalMap,
    ContractViolation,
    c_cd,
    classify,
    family_map,
    fit_theta_csv,
    negativity,
    q_from_delay,
    reconstruct_csv,
    simulate_counts_csv,
    sweep_csv,
)

__all__ = [
    "ArgumentError",
    "CausalMap",
    "ContractViolation",
    "c_cd",
    "classify",
    "family_map",
    "fit_theta_csv",
    "negativity",
    "q_from_delay",
    "reconstruct_csv",
    "simulate_counts_csv",
    "sweep_csv",
]
