"""Engineered-reservoir protection of trapped-ion motional states.

Simulation and inverse design for dissipative stabilization of a single
vibrational mode: pick a nonclassical target state, synthesize a laser
configuration whose effective jump operator has that state as its unique
dark state, and verify protection through steady states, spectral gaps,
and fidelity dynamics of the full and adiabatically reduced models.
"""

from .errors import (
    BadHProfile,
    DegenerateNullSpace,
    DimensionMismatch,
    FirstZeroViolation,
    InconsistentScale,
    IntegratorFailure,
    IonProtectError,
    NegativeRate,
    ParseError,
    PositivityViolation,
    QuadratureNotConverged,
    SingularSystem,
    SizeGuardExceeded,
    TruncationError,
    ValidationError,
    ZeroAmplitude,
)
from .hilbert import (
    FockSpace,
    Ket,
    Operator,
    annihilation,
    basis_ket,
    cat_plus_state,
    cat_unitary,
    coherent_state,
    creation,
    default_dimension,
    displacement,
    identity,
    ket_from_amplitudes,
    number_operator,
    parity,
    phase_state,
    position_quadrature,
    sideband_amplitudes,
    sideband_coupling,
    squeezed_vacuum,
)
from .liouvillian import (
    DensityMatrix,
    Generator,
    LindbladChannel,
    SteadyStateResult,
    apply_generator,
    build_superoperator,
    fidelity,
    propagate,
    spectral_gap,
    steady_states,
    trace_distance,
)
from .pointer import (
    CarrierPair,
    DarkStateCheck,
    EngineeredDissipator,
    LaserDrive,
    RabiSolution,
    carrier_pair,
    cat_dissipator,
    default_sideband_etas,
    design_profiles,
    profile_operator,
    qubit_drive,
    solve_rabi_system,
    squeeze_dissipator,
    superposition_drive,
    vacuum_drive,
    verify_dark_state,
)
from .vibronic import (
    Environment,
    RecoilKernel,
    VibronicState,
    adiabatic_rho12,
    assemble_drive_operator,
    build_recoil_kernel,
    dipole_angular,
    environment_channels,
    full_generator,
    interaction_hamiltonian,
    joint_space,
    lift_motional,
    propagate_vibronic,
    recoil_map,
    reduced_generator,
    reduced_rhs,
    rho22_estimate,
    vibronic_rhs,
)
from .scenario import (
    Report,
    Scenario,
    design_dissipator,
    design_report,
    emit_timeseries,
    parse_scenario,
    run_scenario,
    scenario_from_dict,
    steady_report,
    target_ket,
)

__version__ = "0.1.0"
