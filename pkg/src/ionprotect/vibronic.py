"""Two-level x motion dynamics with spontaneous-emission recoil.

Electronic basis: |1> ground, |2> excited, stacked as the slow index of the
joint space (dimension 2D).  With the drive decomposition H = g(A21 d +
A12 d+) the electronic blocks of the joint density operator obey

    d rho11/dt = -i g (d+ rho21 - rho12 d) + Gamma * R[rho22] + L rho11
    d rho22/dt = -i g (d  rho12 - rho21 d+) - Gamma rho22     + L rho22
    d rho12/dt = -i g (d+ rho22 - rho11 d+) - Gamma/2 rho12   + L rho12

where R is the recoil average over the emission direction,

    R[rho] = integral_{-1}^{1} ds W(s) U(s) rho U(s)+ ,
    U(s) = exp(i eta (a + a+) s),  integral W ds = 1,

realized here by Gauss-Legendre quadrature: a convex mixture of unitary
conjugations, hence exactly trace preserving once the weights are
normalized.  Because R is such a mixture, the full model is itself a
Lindblad generator with emission jumps A12 (x) U(s_j), which this module
exploits to reuse the generic propagation and spectral machinery.

Adiabatic elimination of the fast coherences (rate Gamma/2) and of rho22
(rate Gamma) closes the motional equation

    d rho_v/dt = (Geng/2)(2 d rho_v d+ - d+d rho_v - rho_v d+d)
                 - Gamma (rho22_est - R[rho22_est]) + L rho_v ,

with Geng = 4 g^2 / Gamma and rho22_est = (Geng/Gamma) d rho_v d+, the
leading-order closure of the elimination.  The recoil-corrected reduced
model is again a Lindblad generator with dressed jumps U(s_j) d.
"""

import numpy as np
from dataclasses import dataclass

from .errors import (
    DimensionMismatch,
    InconsistentScale,
    NegativeRate,
    QuadratureNotConverged,
)
from .hilbert import FockSpace, Ket, Operator, annihilation, creation, sideband_amplitudes
from .liouvillian import (
    DensityMatrix,
    Generator,
    LindbladChannel,
    apply_generator,
    propagate,
)
from .pointer import EngineeredDissipator

_A12 = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)   # |1><2|
_A21 = _A12.conj().T

RECOIL_NODES = 16
QUADRATURE_TOL = 1e-9


# ---------------------------------------------------------------------------
# environments
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Environment:
    """Motional reservoir: thermal contact, random driving field, or none."""

    kind: str = "none"
    gamma: float = 0.0        # thermal contact rate
    n_thermal: float = 0.0    # thermal occupation
    rate: float = 0.0         # random-field strength (single opaque rate)

    def __post_init__(self):
        if self.kind not in ("none", "thermal", "random_field"):
            raise ValueError(f"unknown environment kind {self.kind!r}")
        if self.gamma < 0 or self.n_thermal < 0 or self.rate < 0:
            raise NegativeRate("environment rates must be nonnegative")

    @classmethod
    def none(cls) -> "Environment":
        return cls()

    @classmethod
    def thermal(cls, gamma: float, n_thermal: float) -> "Environment":
        return cls(kind="thermal", gamma=gamma, n_thermal=n_thermal)

    @classmethod
    def random_field(cls, rate: float) -> "Environment":
        return cls(kind="random_field", rate=rate)

    def scaled(self, factor: float) -> "Environment":
        return Environment(self.kind, self.gamma * factor, self.n_thermal,
                           self.rate * factor)


def environment_channels(env: Environment | None, space: FockSpace) -> list[LindbladChannel]:
    """Jump channels of the motional reservoir (zero-rate channels dropped).

    thermal(gamma, N): (gamma (N+1), a) and (gamma N, a+).
    random_field(L):   (2L, a) and (2L, a+); the balanced pair heats at
    d<n>/dt = 2L for any state, the infinite-temperature limit of a thermal
    reservoir with gamma N held fixed.
    """
    if env is None or env.kind == "none":
        return []
    channels = []
    if env.kind == "thermal":
        down = env.gamma * (env.n_thermal + 1.0)
        up = env.gamma * env.n_thermal
    else:
        down = up = 2.0 * env.rate
    if down > 0:
        channels.append(LindbladChannel(down, annihilation(space)))
    if up > 0:
        channels.append(LindbladChannel(up, creation(space)))
    return channels


# ---------------------------------------------------------------------------
# recoil kernel
# ---------------------------------------------------------------------------

def dipole_angular(s):
    """Default emission pattern (3/8)(1 + s^2); integrates to 1 on [-1, 1]."""
    return 0.375 * (1.0 + np.asarray(s) ** 2)


class RecoilKernel:
    """Quadrature realization of the recoil average for one eta.

    Carries a doubled-node rule so convergence can be audited on demand.
    """

    __slots__ = ("space", "eta", "nodes", "weights", "unitaries",
                 "_nodes2", "_weights2", "_unitaries2")

    def __init__(self, space, eta, nodes, weights, unitaries,
                 nodes2, weights2, unitaries2):
        self.space = space
        self.eta = eta
        self.nodes = nodes
        self.weights = weights
        self.unitaries = unitaries
        self._nodes2 = nodes2
        self._weights2 = weights2
        self._unitaries2 = unitaries2

    def mean_square_direction(self) -> float:
        return float(np.sum(self.weights * self.nodes ** 2))


def _rule(space, eta, n_nodes, angular):
    nodes, gauss_w = np.polynomial.legendre.leggauss(n_nodes)
    wvals = np.asarray(angular(nodes), dtype=float)
    if np.any(wvals < 0):
        raise ValueError("angular distribution must be nonnegative")
    weights = gauss_w * wvals
    total = weights.sum()
    x = annihilation(space).mat
    x = x + x.conj().T
    evals, vecs = np.linalg.eigh(x)
    unitaries = np.stack([
        (vecs * np.exp(1j * eta * evals * s)) @ vecs.conj().T for s in nodes
    ])
    return nodes, weights, total, unitaries


def build_recoil_kernel(space: FockSpace, eta: float, n_nodes: int = RECOIL_NODES,
                        angular=None) -> RecoilKernel:
    """Recoil kernel for the given Lamb-Dicke parameter.

    ``angular`` may be any callable W(s); it must integrate to 1 over
    [-1, 1] within 1e-10 (checked with the doubled rule), after which the
    quadrature weights are renormalized to sum to exactly 1 so the realized
    map is trace preserving to machine precision.
    """
    if eta < 0:
        raise ValueError(f"eta must be nonnegative, got {eta}")
    if n_nodes < 1:
        raise ValueError("need at least one quadrature node")
    angular = dipole_angular if angular is None else angular
    n1, w1, t1, u1 = _rule(space, eta, n_nodes, angular)
    n2, w2, t2, u2 = _rule(space, eta, 2 * n_nodes, angular)
    if abs(t2 - 1.0) > 1e-10:
        raise ValueError(
            f"angular distribution integrates to {t2:.12f}, expected 1 within 1e-10")
    return RecoilKernel(space, eta, n1, w1 / t1, u1, n2, w2 / t2, u2)


def _mixture(unitaries, weights, mat):
    conj = unitaries.conj().transpose(0, 2, 1)
    return np.einsum("k,kij,jl,klm->im", weights, unitaries, mat, conj, optimize=True)


def recoil_map(rho, kernel: RecoilKernel, check_convergence: bool = False) -> np.ndarray:
    """Average of displaced copies of rho over the emission direction."""
    mat = rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho, complex)
    if mat.shape != (kernel.space.dim, kernel.space.dim):
        raise DimensionMismatch("state does not match the kernel's space")
    out = _mixture(kernel.unitaries, kernel.weights, mat)
    if check_convergence:
        ref = _mixture(kernel._unitaries2, kernel._weights2, mat)
        err = float(np.abs(out - ref).max())
        if err > QUADRATURE_TOL:
            raise QuadratureNotConverged(
                f"node doubling changes the recoil map by {err:.3e} > {QUADRATURE_TOL:.1e}")
    return out


# ---------------------------------------------------------------------------
# drives on the joint space
# ---------------------------------------------------------------------------

def joint_space(space: FockSpace) -> FockSpace:
    """Flat container for the two-level (x) motional space."""
    return FockSpace(2 * space.dim)


def lift_motional(op: Operator) -> Operator:
    return Operator(joint_space(op.space), np.kron(np.eye(2), op.mat))


def assemble_drive_operator(space: FockSpace, drives) -> tuple[float, Operator]:
    """Coupling scale g and jump operator d with g d = sum of drive terms.

    Per drive: carrier (Omega/2) f_0(n); k-th red sideband
    (Omega/2)(i eta)^k f_k(n) a^k; k-th blue sideband the a+^k counterpart.
    The scale convention is g = max_n eta_n |Omega_n| / 2 over sideband
    drives (|Omega_n|/2 over carriers when no sideband is present), which
    reduces to g = eta Omega_1 / 2 for a single red-sideband beam.
    """
    drives = tuple(drives)
    if not drives:
        raise InconsistentScale("no drives to decompose")
    a = annihilation(space).mat
    total = np.zeros((space.dim, space.dim), complex)
    sideband_scales = []
    carrier_scales = []
    for dr in drives:
        k = abs(dr.sideband_k)
        if dr.sideband_k == 0:
            fk = np.ones(space.dim) if dr.eta == 0.0 else \
                sideband_amplitudes(space.dim, 0, dr.eta)
            total += (dr.rabi / 2.0) * np.diag(fk)
            carrier_scales.append(abs(dr.rabi) / 2.0)
        else:
            fk = np.diag(sideband_amplitudes(space.dim, k, dr.eta))
            ladder = np.linalg.matrix_power(a, k)
            motional = fk @ ladder if dr.sideband_k > 0 else ladder.conj().T @ fk
            total += (dr.rabi / 2.0) * (1j * dr.eta) ** k * motional
            sideband_scales.append(dr.eta * abs(dr.rabi) / 2.0)
    g = max(sideband_scales) if sideband_scales else max(carrier_scales)
    if g <= 0:
        raise InconsistentScale("all drive amplitudes vanish; no positive scale exists")
    return g, Operator(space, total / g)


def interaction_hamiltonian(space: FockSpace, drives) -> Operator:
    """g (A21 d + A12 d+) on the joint space for the given drive list."""
    g, d = assemble_drive_operator(space, drives)
    mat = g * (np.kron(_A21, d.mat) + np.kron(_A12, d.mat.conj().T))
    return Operator(joint_space(space), mat)


def full_generator(space: FockSpace, gamma_decay: float, *, drives=None,
                   hamiltonian: Operator | None = None,
                   kernel: RecoilKernel | None = None,
                   env: Environment | None = None) -> Generator:
    """Joint-space Lindblad generator of the driven, decaying two-level ion.

    Emission enters as the jump family A12 (x) U(s_j) weighted by the recoil
    quadrature (plain A12 (x) 1 when no kernel is given); the motional
    reservoir is lifted with an identity on the electronic factor.
    """
    if gamma_decay <= 0:
        raise NegativeRate("electronic decay rate must be positive")
    if (drives is None) == (hamiltonian is None):
        raise ValueError("give exactly one of drives or hamiltonian")
    if hamiltonian is None:
        hamiltonian = interaction_hamiltonian(space, drives)
    jsp = joint_space(space)
    if hamiltonian.space.dim != jsp.dim:
        raise DimensionMismatch("hamiltonian must live on the joint space")
    channels = []
    if kernel is None:
        channels.append(LindbladChannel(
            gamma_decay, Operator(jsp, np.kron(_A12, np.eye(space.dim)))))
    else:
        for w, u in zip(kernel.weights, kernel.unitaries):
            channels.append(LindbladChannel(
                gamma_decay * w, Operator(jsp, np.kron(_A12, u))))
    for ch in environment_channels(env, space):
        channels.append(LindbladChannel(ch.rate, lift_motional(ch.jump)))
    return Generator(channels, hamiltonian, space=jsp)


# ---------------------------------------------------------------------------
# block representation
# ---------------------------------------------------------------------------

class VibronicState:
    """Electronic-basis blocks of the joint density operator.

    Only rho11, rho12, rho22 are stored; rho21 is the adjoint of rho12.
    """

    __slots__ = ("space", "r11", "r12", "r22")

    def __init__(self, space: FockSpace, r11, r12, r22):
        d = space.dim
        self.space = space
        self.r11 = np.asarray(r11, complex).reshape(d, d)
        self.r12 = np.asarray(r12, complex).reshape(d, d)
        self.r22 = np.asarray(r22, complex).reshape(d, d)

    @property
    def r21(self) -> np.ndarray:
        return self.r12.conj().T

    @classmethod
    def ground(cls, motional) -> "VibronicState":
        """Electronic ground state tensored with the given motional state."""
        if isinstance(motional, Ket):
            motional = DensityMatrix.from_ket(motional)
        d = motional.space.dim
        z = np.zeros((d, d), complex)
        return cls(motional.space, motional.mat, z, z)

    @classmethod
    def from_joint(cls, space: FockSpace, joint) -> "VibronicState":
        mat = joint.mat if isinstance(joint, DensityMatrix) else np.asarray(joint, complex)
        d = space.dim
        if mat.shape != (2 * d, 2 * d):
            raise DimensionMismatch("joint matrix does not match 2 x dim")
        return cls(space, mat[:d, :d], mat[:d, d:], mat[d:, d:])

    def to_joint(self) -> np.ndarray:
        return np.block([[self.r11, self.r12], [self.r21, self.r22]])

    def motional(self) -> np.ndarray:
        """Reduced motional state rho11 + rho22."""
        return self.r11 + self.r22

    def excited_population(self) -> float:
        return float(np.trace(self.r22).real)

    def trace(self) -> float:
        return float((np.trace(self.r11) + np.trace(self.r22)).real)

    def validate(self, trace_tol: float = 1e-8, herm_tol: float = 1e-10,
                 pos_tol: float = 1e-6):
        if abs(self.trace() - 1.0) > trace_tol:
            raise ValueError(f"block traces sum to {self.trace():.10f}, not 1")
        joint = self.to_joint()
        if np.abs(joint - joint.conj().T).max() > herm_tol:
            raise ValueError("joint matrix is not Hermitian within tolerance")
        lo = float(np.linalg.eigvalsh((joint + joint.conj().T) / 2).min())
        if lo < -pos_tol:
            raise ValueError(f"joint matrix has eigenvalue {lo:.3e} below -{pos_tol:.1e}")


def _coupling_block(hamiltonian: Operator, dim: int) -> np.ndarray:
    """Extract G = g d from the lower-left electronic block of H."""
    if hamiltonian.space.dim != 2 * dim:
        raise DimensionMismatch("hamiltonian must live on the joint space")
    return hamiltonian.mat[dim:, :dim]


def vibronic_rhs(state: VibronicState, hamiltonian: Operator, gamma_decay: float,
                 kernel: RecoilKernel | None = None,
                 env: Environment | None = None) -> VibronicState:
    """Block derivatives of the joint master equation (see module docstring)."""
    d = state.space.dim
    G = _coupling_block(hamiltonian, d)
    Gd = G.conj().T
    env_gen = None
    chans = environment_channels(env, state.space)
    if chans:
        env_gen = Generator(chans, space=state.space)

    def lind(block):
        return apply_generator(env_gen, block) if env_gen is not None else 0.0

    r11, r12, r22 = state.r11, state.r12, state.r22
    r21 = state.r21
    rbar22 = recoil_map(r22, kernel) if kernel is not None else r22
    d11 = -1j * (Gd @ r21 - r12 @ G) + gamma_decay * rbar22 + lind(r11)
    d22 = -1j * (G @ r12 - r21 @ Gd) - gamma_decay * r22 + lind(r22)
    d12 = -1j * (Gd @ r22 - r11 @ Gd) - 0.5 * gamma_decay * r12 + lind(r12)
    return VibronicState(state.space, d11, d12, d22)


def adiabatic_rho12(state: VibronicState, g: float, gamma_decay: float,
                    d: Operator) -> np.ndarray:
    """Leading-order elimination of the electronic coherence.

    -(2 i g / Gamma)(d+ rho22 - rho11 d+); corrections are one order higher
    in the environment-to-decay ratio and are dropped.
    """
    dd = d.mat.conj().T
    return (-2j * g / gamma_decay) * (dd @ state.r22 - state.r11 @ dd)


def rho22_estimate(rho_v, diss: EngineeredDissipator, gamma_decay: float) -> np.ndarray:
    """Adiabatic closure of the excited block, (Geng/Gamma) d rho_v d+."""
    mat = rho_v.mat if isinstance(rho_v, DensityMatrix) else np.asarray(rho_v, complex)
    d = diss.d.mat
    return (diss.gamma_eng / gamma_decay) * (d @ mat @ d.conj().T)


def reduced_rhs(rho_v, diss: EngineeredDissipator, gamma_decay: float = 1.0,
                kernel: RecoilKernel | None = None,
                env: Environment | None = None) -> np.ndarray:
    """Motional master equation with engineered dissipator and recoil correction."""
    mat = rho_v.mat if isinstance(rho_v, DensityMatrix) else np.asarray(rho_v, complex)
    d = diss.d.mat
    if mat.shape != d.shape:
        raise DimensionMismatch("state does not match the dissipator's space")
    dd = d.conj().T @ d
    sandwich = d @ mat @ d.conj().T
    out = diss.gamma_eng * (sandwich - 0.5 * (dd @ mat + mat @ dd))
    if kernel is not None:
        r22e = (diss.gamma_eng / gamma_decay) * sandwich
        out -= gamma_decay * (r22e - recoil_map(r22e, kernel))
    chans = environment_channels(env, diss.d.space)
    if chans:
        out += apply_generator(Generator(chans, space=diss.d.space), mat)
    return out


def reduced_generator(space: FockSpace, diss: EngineeredDissipator,
                      kernel: RecoilKernel | None = None,
                      env: Environment | None = None) -> Generator:
    """Channel form of the reduced model: recoil-dressed jumps U(s_j) d.

    sum_j Geng w_j D[U_j d] reproduces the engineered dissipator plus the
    recoil correction exactly, because U+ U = 1 leaves the anticommutator
    part undressed.
    """
    if diss.d.space.dim != space.dim:
        raise DimensionMismatch("dissipator does not live on the requested space")
    channels = []
    if kernel is None:
        channels.append(LindbladChannel(diss.gamma_eng, diss.d))
    else:
        for w, u in zip(kernel.weights, kernel.unitaries):
            channels.append(LindbladChannel(
                diss.gamma_eng * w, Operator(space, u @ diss.d.mat)))
    channels.extend(environment_channels(env, space))
    return Generator(channels, space=space)


def propagate_vibronic(gen_joint: Generator, state0: VibronicState, t_grid,
                       **kwargs) -> list[VibronicState]:
    """Propagate a block state with the joint-space generator."""
    space = state0.space
    rho0 = DensityMatrix(gen_joint.space, state0.to_joint(), validate=False)
    traj = propagate(gen_joint, rho0, t_grid, **kwargs)
    return [VibronicState.from_joint(space, dm) for dm in traj]
