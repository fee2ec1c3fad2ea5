"""Simulation and verification lab for detected-jump error-correcting codes."""

from .states import (
    DenseOperator,
    Ket,
    LocalOperator,
    OperatorSum,
    apply_local,
    apply_sum,
    basis_ket,
    expm_apply,
    index_to_label,
    ket_from_json,
    ket_to_json,
    label_to_index,
    local_to_dense,
    sum_to_dense,
    tensor,
)
from .codes import (
    DFSBasis,
    DesignPlane,
    JumpCode,
    affine_plane_4,
    code_from_json,
    code_to_json,
    codeword_ket,
    dfs_basis,
    dfs_projector,
    encode,
    jump_code,
    logical_qubits,
    parallelism_to_code,
    product_code_basis,
    projector,
)
from .dynamics import (
    DensityMatrix,
    KrausSet,
    LindbladModel,
    TrajectoryRecord,
    apply_operation,
    average_trajectories,
    effective_hamiltonian,
    integrate_master,
    memory_model,
    no_jump_kraus,
    pure_density,
    records_to_csv,
    run_trajectory,
    trace_distance,
    trajectory_rng,
)
from .qec import (
    DFSReport,
    KLReport,
    correct_trajectory,
    dfs_check,
    kl_check,
    kl_report_to_json,
    kraus_equivalent,
    recovery_unitary,
)
from .gates import (
    GateHamiltonian,
    HamiltonianProgram,
    LeakageError,
    ProgramSegment,
    SynthesisError,
    ThetaMatrix,
    e_op,
    ent_unitary,
    f_op,
    gate_theta_matrix,
    h_ent,
    is_primitive_diagonal,
    leakage_certificate,
    lie_closure,
    lie_closure_dimension,
    logical_matrix,
    phase_aligned_distance,
    program_from_json,
    program_logical_unitary,
    program_to_json,
    program_unitary,
    schmidt_rank,
    su3_generators,
    synthesize_qutrit,
    table1_matrices,
    trotter_commutator,
    trotter_sum,
    v_gate,
)

__version__ = "0.1.0"
