"""pic_calibration package: circuit
Modules:
    mesh - circuit topology, the light-cone walk mesh and its text form
    forward - parameters and the currents to probabilities forward model
    walk - the independent discrete-time walk model and Hadamard walk helpers
"""
from .mesh import (Unit, Layer, CircuitSpec, MeshSection, build_qw_mesh, default_port_mask, validate_mesh,
                   masked_ports, mesh_to_text, mesh_from_text, mesh_from_dict, save_mesh, load_mesh)
from .forward import (GROUPS, Parameters, currents_to_phases, wrap_phase, input_state, apply_unit, evolve,
                      output_distribution, transfer_matrix, canonicalize, gauge_fix, phases_to_currents)
from .walk import (CoinSpec, coin_matrix, walk_state, walk_distribution, coins_from_mesh, port_positions,
                   mesh_equivalence_check, hadamard_walk_currents, hadamard_reference_distribution)
