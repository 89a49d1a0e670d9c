import math

import numpy as np
import pytest

from conftest import collinearity_residual

from ionprotect import (
    BadHProfile,
    DensityMatrix,
    FockSpace,
    FirstZeroViolation,
    SingularSystem,
    ZeroAmplitude,
    annihilation,
    assemble_drive_operator,
    basis_ket,
    carrier_pair,
    cat_dissipator,
    cat_plus_state,
    cat_unitary,
    creation,
    default_sideband_etas,
    design_profiles,
    fidelity,
    ket_from_amplitudes,
    phase_state,
    profile_operator,
    qubit_drive,
    reduced_generator,
    sideband_amplitudes,
    solve_rabi_system,
    squeeze_dissipator,
    squeezed_vacuum,
    steady_states,
    superposition_drive,
    vacuum_drive,
    verify_dark_state,
)


# ---------------------------------------------------------------------------
# profile construction
# ---------------------------------------------------------------------------

def test_qubit_profile():
    space = FockSpace(12)
    h = np.zeros(space.dim)
    h[0] = 1.0
    g, h_out = design_profiles([1.0, 1.0], h)
    assert g[0] == pytest.approx(-1.0, abs=1e-14)
    d = profile_operator(space, g, h_out)
    check = verify_dark_state(d, ket_from_amplitudes(space, [1, 1]))
    assert check.residual <= 1e-14
    assert check.null_dim == 1


def test_vacuum_family_includes_plain_ladder():
    space = FockSpace(7)
    g, h = design_profiles([1.0], np.zeros(space.dim))
    d = profile_operator(space, g, h)
    assert np.abs(d.mat - annihilation(space).mat).max() < 1e-15


def test_random_targets_have_unique_dark_state():
    rng = np.random.default_rng(11)
    space = FockSpace(16)
    for _ in range(10):
        c = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        c += np.sign(c.real + 1e-12) * 0.3  # keep amplitudes away from zero
        h = np.ones(space.dim)
        h[3] = 0.0
        h[4:] = -rng.uniform(0.5, 1.5, space.dim - 4)
        g, h_out = design_profiles(c, h)
        d = profile_operator(space, g, h_out)
        check = verify_dark_state(d, ket_from_amplitudes(space, c))
        assert check.residual <= 1e-10
        assert check.null_dim == 1


def test_profile_guards():
    with pytest.raises(ZeroAmplitude):
        design_profiles([1.0, 0.0, 1.0], np.ones(8))
    h = np.ones(8)
    with pytest.raises(BadHProfile):        # h(N) must vanish
        design_profiles([1.0, 1.0], h)
    h2 = np.ones(8)
    h2[0] = 0.0
    h2[2] = 0.0
    with pytest.raises(BadHProfile):        # premature zero below N
        design_profiles([1.0, 1.0, 1.0], h2)


# ---------------------------------------------------------------------------
# Rabi linear system
# ---------------------------------------------------------------------------

def test_single_laser_closed_form():
    eta = 0.2
    h = np.array([1.0, 0.0])
    sol = solve_rabi_system([1.0, 1.0], h, [eta])
    f1_0 = sideband_amplitudes(1, 1, eta)[0]
    assert sol.omegas[0] == pytest.approx(1j / (eta * f1_0), abs=1e-12)
    assert sol.condition_number == pytest.approx(1.0, rel=1e-12)


def test_rabi_system_consistency():
    eta_list = [0.1, 0.15, 0.2]
    target = phase_state(FockSpace(8), 3, 0.4).amp[:4]
    pair = carrier_pair(0.2, 3, 20)
    sol = solve_rabi_system(target, pair.h_values, eta_list)
    A = np.empty((3, 3), complex)
    for j, eta in enumerate(eta_list):
        A[:, j] = eta * sideband_amplitudes(3, 1, eta)
    b = np.array([1j * pair.h_values[m] * target[m] / (math.sqrt(m + 1) * target[m + 1])
                  for m in range(3)])
    assert np.linalg.norm(A @ sol.omegas - b) <= 1e-10 * sol.condition_number


def test_duplicated_projections_are_singular():
    with pytest.raises(SingularSystem):
        solve_rabi_system([1.0, 1.0, 1.0], np.array([1.0, 0.5, 0.0]), [0.2, 0.2])


# ---------------------------------------------------------------------------
# carrier pair
# ---------------------------------------------------------------------------

def test_carrier_pair_first_order():
    pair = carrier_pair(0.2, 1, 10)
    # ratio set by the first Laguerre value 1 - eta^2 = 0.96, with the
    # axial beam's Debye-Waller factor exp(-eta^2/2) included
    assert pair.ratio == pytest.approx(-math.exp(-0.02) * 0.96, abs=1e-12)
    assert pair.h_values[0] > 0
    assert abs(pair.h_values[1]) < 1e-15


def test_carrier_pair_degree_three():
    pair = carrier_pair(0.3, 3, 12)
    assert np.all(pair.h_values[:3] > 0)
    assert abs(pair.h_values[3]) < 1e-15


def test_carrier_pair_degenerate_limit():
    # as eta_x -> 0 every level shift coincides and the zero pattern drowns
    # in rounding noise
    with pytest.raises(FirstZeroViolation):
        carrier_pair(1e-8, 2, 10)


# ---------------------------------------------------------------------------
# vacuum drive
# ---------------------------------------------------------------------------

def test_vacuum_drive_is_sideband_cooling():
    space = FockSpace(15)
    diss = vacuum_drive(space, 0.2, 0.5)
    check = verify_dark_state(diss.d, basis_ket(space, 0))
    assert check.residual <= 1e-14
    assert check.null_dim == 1
    assert len(diss.drives) == 1
    assert diss.drives[0].sideband_k == 1
    assert diss.gamma_eng == pytest.approx((0.2 * 0.5) ** 2)


def test_vacuum_drive_round_trip():
    space = FockSpace(15)
    diss = vacuum_drive(space, 0.2, 0.5)
    g, assembled = assemble_drive_operator(space, diss.drives)
    assert g == pytest.approx(0.05)
    assert collinearity_residual(assembled.mat.reshape(-1),
                                 diss.d.mat.reshape(-1)) <= 1e-13


def test_vacuum_drive_steady_state():
    space = FockSpace(12)
    diss = vacuum_drive(space, 0.2, 0.5)
    result = steady_states(reduced_generator(space, diss))
    assert result.multiplicity == 1
    vac = DensityMatrix.from_ket(basis_ket(space, 0))
    assert fidelity(vac, result.states[0]) >= 1 - 1e-10


# ---------------------------------------------------------------------------
# qubit drive
# ---------------------------------------------------------------------------

def test_qubit_drive_ratios():
    space = FockSpace(20)
    diss = qubit_drive(space, 1 / math.sqrt(2), 1 / math.sqrt(2), 0.2, 0.5)
    assert diss.meta["omega_x_over_omega1"] == pytest.approx(-5j, abs=1e-12)
    assert diss.meta["omega_y_over_omega1"] == pytest.approx(
        1j * math.exp(-0.02) * 0.96 / 0.2, abs=1e-12)
    assert abs(diss.meta["omega_y_over_omega1"] - 4.7050j) < 1e-4


def test_qubit_drive_rate_identity():
    # Gamma = 4 MHz, Omega_1 = 2 MHz, eta = 0.2 -> Gamma_eng = 40 kHz
    space = FockSpace(20)
    diss = qubit_drive(space, 1.0, 1.0, 0.2, 2.0, gamma=4.0)
    assert diss.gamma_eng == 0.2**2 * 2.0**2 / 4.0
    assert diss.gamma_eng * 1e3 == pytest.approx(40.0, rel=1e-12)


def test_qubit_drive_dark_state():
    space = FockSpace(25)
    diss = qubit_drive(space, 1.0, 0.7j, 0.15, 0.4)
    check = verify_dark_state(diss.d, diss.target)
    assert check.residual <= 1e-12
    assert check.null_dim == 1


def test_qubit_drive_zero_amplitude():
    space = FockSpace(10)
    with pytest.raises(ZeroAmplitude):
        qubit_drive(space, 1.0, 0.0, 0.2, 0.5)


def test_qubit_drive_round_trip():
    # rebuilding d from the emitted beam list must agree up to global scale
    space = FockSpace(18)
    diss = qubit_drive(space, 1.0, 1.0, 0.2, 0.5)
    g, d_assembled = assemble_drive_operator(space, diss.drives)
    assert g == pytest.approx(0.2 * 0.5 / 2.0, rel=1e-12)
    assert collinearity_residual(d_assembled.mat.reshape(-1),
                                 diss.d.mat.reshape(-1)) <= 1e-12
    check = verify_dark_state(d_assembled, diss.target)
    assert check.residual <= 1e-8 * d_assembled.largest_singular_value()


def test_qubit_drive_phase_covariance():
    space = FockSpace(14)
    base = qubit_drive(space, 1.0, 1.0, 0.2, 0.5)
    rotated = qubit_drive(space, np.exp(0.6j), np.exp(0.6j), 0.2, 0.5)
    assert np.abs(base.d.mat - rotated.d.mat).max() < 1e-12
    assert rotated.dark_residual == pytest.approx(base.dark_residual, abs=1e-12)


# ---------------------------------------------------------------------------
# superposition drive
# ---------------------------------------------------------------------------

def test_superposition_drive_phase_target():
    space = FockSpace(30)
    target = np.exp(1j * 0.3 * np.arange(4)) / 2.0
    diss = superposition_drive(space, target, 0.2, 0.5,
                               etas=[0.1, 0.15, 0.2])
    assert len(diss.drives) == 5
    check = verify_dark_state(diss.d, diss.target)
    assert check.residual <= 1e-8
    assert check.null_dim == 1
    assert diss.meta["condition_number"] < 1e12


def test_superposition_drive_default_projections():
    etas = default_sideband_etas(0.2, 3)
    assert etas[0] == pytest.approx(0.2)
    assert etas[1] == pytest.approx(0.2 * math.cos(math.pi / 6), rel=1e-12)
    assert etas[2] == pytest.approx(0.1, rel=1e-12)
    space = FockSpace(24)
    diss = superposition_drive(space, np.ones(4) / 2.0, 0.2, 0.5)
    assert verify_dark_state(diss.d, diss.target).residual <= 1e-8


def test_superposition_drive_round_trip():
    space = FockSpace(24)
    diss = superposition_drive(space, np.ones(4) / 2.0, 0.2, 0.5)
    _, d_assembled = assemble_drive_operator(space, diss.drives)
    assert collinearity_residual(d_assembled.mat.reshape(-1),
                                 diss.d.mat.reshape(-1)) <= 1e-10
    check = verify_dark_state(d_assembled, diss.target)
    assert check.residual <= 1e-8 * d_assembled.largest_singular_value()


def test_superposition_phase_covariance():
    space = FockSpace(24)
    base = superposition_drive(space, np.ones(4) / 2.0, 0.2, 0.5)
    rotated = superposition_drive(space, np.exp(1.1j) * np.ones(4) / 2.0, 0.2, 0.5)
    assert rotated.dark_residual == pytest.approx(base.dark_residual, abs=1e-12)


def test_engineered_only_uniqueness():
    # one-dimensional null space of the engineered dissipator for each family
    space = FockSpace(22)
    designs = [
        qubit_drive(space, 1.0, 1.0, 0.2, 0.5),
        superposition_drive(space, np.ones(4) / 2.0, 0.2, 0.5),
        squeeze_dissipator(space, 0.4, 0.5),
    ]
    for diss in designs:
        result = steady_states(reduced_generator(space, diss))
        assert result.multiplicity == 1
        target = DensityMatrix.from_ket(diss.target)
        assert fidelity(target, result.states[0]) >= 1 - 1e-6


# ---------------------------------------------------------------------------
# cat dissipator
# ---------------------------------------------------------------------------

def test_cat_dissipator_zero_amplitude_limit():
    space = FockSpace(10)
    diss = cat_dissipator(space, 0.0, 1.0)
    assert verify_dark_state(diss.d, basis_ket(space, 0)).residual <= 1e-14


def test_cat_dissipator_dark_state():
    space = FockSpace(40)
    alpha = math.sqrt(3)
    diss = cat_dissipator(space, alpha, 1.0)
    assert diss.drives == ()
    assert np.linalg.norm(diss.d.mat @ cat_plus_state(space, alpha).amp) <= 1e-7


def test_cat_unitary_conjugation_consistency():
    # T a T+ equals the closed form on every low-energy probe state; the
    # matrix-norm comparison is dominated by truncation-edge rows and is not
    # meaningful at finite dimension
    space = FockSpace(40)
    alpha = math.sqrt(3)
    diss = cat_dissipator(space, alpha, 1.0)
    t_op = cat_unitary(space, alpha)
    conj = t_op @ annihilation(space) @ t_op.dag()
    probes = [cat_plus_state(space, alpha).amp] + \
        [basis_ket(space, n).amp for n in range(4)]
    for amp in probes:
        assert np.linalg.norm((conj.mat - diss.d.mat) @ amp) <= 1e-7


def test_cat_engineered_only_steady_state():
    space = FockSpace(30)
    alpha = math.sqrt(3)
    diss = cat_dissipator(space, alpha, 1.0)
    result = steady_states(reduced_generator(space, diss))
    assert result.multiplicity == 1
    target = DensityMatrix.from_ket(cat_plus_state(space, alpha))
    assert fidelity(target, result.states[0]) >= 1 - 1e-8


# ---------------------------------------------------------------------------
# squeeze dissipator
# ---------------------------------------------------------------------------

def test_squeeze_dissipator_zero_limit():
    space = FockSpace(10)
    diss = squeeze_dissipator(space, 0.0, 0.5)
    assert np.abs(diss.d.mat - annihilation(space).mat).max() < 1e-15
    assert len(diss.drives) == 1


def test_squeeze_dissipator_ratio():
    space = FockSpace(40)
    diss = squeeze_dissipator(space, 0.6, 0.5)
    chi = math.tanh(0.6)
    assert diss.meta["omega2_over_omega1"] == pytest.approx(chi, rel=1e-12)
    assert abs(chi - 0.53705) < 1e-5
    red, blue = diss.drives
    assert blue.rabi / red.rabi == pytest.approx(chi, rel=1e-12)
    assert blue.sideband_k == -1


def test_squeeze_engineered_only_steady_state():
    space = FockSpace(40)
    diss = squeeze_dissipator(space, 0.6, 0.5)
    result = steady_states(reduced_generator(space, diss))
    assert result.multiplicity == 1
    target = DensityMatrix.from_ket(squeezed_vacuum(space, 0.6))
    assert fidelity(target, result.states[0]) >= 1 - 1e-6


def test_squeeze_drive_realization_converges_in_lamb_dicke_limit():
    # the two-sideband realization reproduces a + chi a+ only to O(eta^2);
    # halving eta must shrink the collinearity defect about fourfold
    space = FockSpace(30)
    ideal = (annihilation(space) + math.tanh(0.6) * creation(space)).mat.reshape(-1)
    defects = []
    for eta in (0.1, 0.05):
        diss = squeeze_dissipator(space, 0.6, 0.5, eta=eta)
        _, assembled = assemble_drive_operator(space, diss.drives)
        defects.append(collinearity_residual(assembled.mat.reshape(-1), ideal))
    assert defects[0] / defects[1] >= 2.5


# ---------------------------------------------------------------------------
# dark-state verification
# ---------------------------------------------------------------------------

def test_verify_dark_state_basics():
    space = FockSpace(8)
    a = annihilation(space)
    zero = verify_dark_state(a, basis_ket(space, 0))
    assert zero.residual <= 1e-15
    assert zero.null_dim == 1
    one = verify_dark_state(a, basis_ket(space, 1))
    assert one.residual == pytest.approx(1.0, abs=1e-14)


def test_laser_drive_guards():
    from ionprotect import LaserDrive
    with pytest.raises(ValueError):
        LaserDrive(1.0, 1, 0.0, "sideband needs eta")
    with pytest.raises(ValueError):
        LaserDrive(1.0, 0, 1.0, "eta out of range")
    LaserDrive(1.0, 0, 0.0, "carrier at eta 0 is fine")
