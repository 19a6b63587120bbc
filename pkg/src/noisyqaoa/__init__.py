"""Noisy density-matrix simulation of QAOA for MaxCut.

The package simulates parameterized QAOA circuits on a modeled
fully-connected superconducting device with three toggleable noise sources
(depolarizing gate error, T1 relaxation, T2 dephasing), optimizes the
circuit parameters with differential evolution or grid scans, and ships a
CLI that reproduces the noise-study experiment tables.
"""

from .gates import (GateOp, cnot, decompose_to_native, duration_of, h,
                    is_virtual, matrix_of, rx, ry, rz, u1, u2, u3, x)
from .maxcut import (BUILTIN_GRAPHS, EvalRecord, Graph, QaoaParams,
                     build_qaoa_circuit, circuit_latency,
                     cost_fidelity_estimate, cost_hamiltonian_latency,
                     cost_diagonal, cost_layer_state_fidelity, cut_value,
                     estimate_expectation_from_samples, evaluate,
                     expectation_for_angles, fom_objective, load_graph,
                     max_cut_brute_force, resolve_graph, sample_counts)
from .noise import (DeviceModel, NoiseToggles, amplitude_damping_kraus,
                    apply_noisy_gate, depolarizing_kraus, device_from_dict,
                    load_device, phase_damping_kraus, scaled_device,
                    simulate_circuit, toggles_for_series)
from .optimize import (DEConfig, GridResult, OptResult,
                       differential_evolution, grid_scan, qaoa_bounds)
from .quantum import (apply_kraus, apply_unitary, basis_density,
                      density_from_pure, expectation, expectation_diag,
                      fidelity_to_pure, kron, plus_state,
                      validate_density_matrix)

__version__ = "0.1.0"
