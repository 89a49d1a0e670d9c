"""Inverse design of engineered jump operators and their laser realizations.

The protection strategy: pick a jump operator d with the target state as its
only zero-eigenvalue eigenstate, then realize d as the motional part of a
driven electronic transition so that the effective dissipator relaxes every
state onto the target.

For a finite superposition sum_{n<=N} c_n |n> (all c_n nonzero) the operator

    d = g(n) a + h(n)

annihilates the target iff  g(m) = -h(m) c_m / (sqrt(m+1) c_{m+1})  for
m < N, with  h(N) = 0  the first zero of the offset profile.  The bidiagonal
structure makes that null vector unique as long as h stays nonzero above N.
The a-part is produced by N lasers on the first red sideband whose Rabi
frequencies solve an N x N linear system; the diagonal offset comes from a
carrier pair, one beam along the trap axis and one orthogonal to it.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadHProfile,
    DimensionMismatch,
    FirstZeroViolation,
    SingularSystem,
    ZeroAmplitude,
)
from .hilbert import (
    FockSpace,
    Ket,
    Operator,
    annihilation,
    basis_ket,
    cat_plus_state,
    identity,
    ket_from_amplitudes,
    parity,
    sideband_amplitudes,
    squeezed_vacuum,
)

CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class LaserDrive:
    """One laser: complex Rabi frequency, sideband order, Lamb-Dicke projection.

    ``sideband_k`` counts red sidebands positively (0 = carrier); negative
    values address the corresponding blue sideband, which the squeezed-state
    realization needs.
    """

    rabi: complex
    sideband_k: int
    eta: float
    label: str = ""

    def __post_init__(self):
        if not 0.0 <= self.eta < 1.0:
            raise ValueError(f"Lamb-Dicke projection must lie in [0, 1), got {self.eta}")
        if self.sideband_k != 0 and self.eta == 0.0:
            raise ValueError("sideband drives need a nonzero Lamb-Dicke projection")


class EngineeredDissipator:
    """Jump operator with its strength, laser realization, and dark target.

    ``gamma_eng`` is the effective dissipator rate 4 g^2 / Gamma in the
    scenario's rate units, with g the coupling scale of the drive
    decomposition.  ``drives`` may be empty for operators without a known
    finite laser realization (the cat family).
    """

    __slots__ = ("d", "gamma_eng", "drives", "target", "meta", "dark_residual")

    def __init__(self, d: Operator, gamma_eng: float, drives, target: Ket,
                 meta: dict | None = None, residual_tol: float = 1e-8):
        if gamma_eng <= 0 or not np.isfinite(gamma_eng):
            raise ValueError(f"gamma_eng must be positive and finite, got {gamma_eng}")
        if d.space.dim != target.space.dim:
            raise DimensionMismatch("jump operator and target live on different spaces")
        self.d = d
        self.gamma_eng = float(gamma_eng)
        self.drives = tuple(drives)
        self.target = target.normalized()
        self.meta = dict(meta or {})
        sigma_max = d.largest_singular_value()
        self.dark_residual = float(np.linalg.norm(d.mat @ self.target.amp))
        if self.dark_residual > residual_tol * sigma_max:
            raise ValueError(
                f"dark-state residual {self.dark_residual:.3e} exceeds "
                f"{residual_tol:.1e} * ||d|| = {residual_tol * sigma_max:.3e}")

    def summary(self) -> dict:
        out = {
            "gamma_eng": self.gamma_eng,
            "dark_residual": self.dark_residual,
            "drives": [
                {
                    "label": dr.label,
                    "rabi": [dr.rabi.real, dr.rabi.imag],
                    "sideband_k": dr.sideband_k,
                    "eta": dr.eta,
                }
                for dr in self.drives
            ],
        }
        for key, val in self.meta.items():
            out[key] = [val.real, val.imag] if isinstance(val, complex) else val
        return out

    def __repr__(self):
        return (f"EngineeredDissipator(dim={self.d.space.dim}, "
                f"gamma_eng={self.gamma_eng:.4g}, drives={len(self.drives)})")


@dataclass(frozen=True)
class DarkStateCheck:
    residual: float
    null_dim: int


@dataclass(frozen=True)
class CarrierPair:
    """Carrier-beam ratio and the diagonal offset profile it produces."""

    ratio: float            # Omega_y / Omega_x with h(N) = 0 imposed exactly
    h_values: np.ndarray    # offset profile for Omega_x = 1


@dataclass(frozen=True)
class RabiSolution:
    omegas: np.ndarray
    condition_number: float
    etas: np.ndarray = field(default=None, repr=False)


def _clean_target(target_amplitudes) -> np.ndarray:
    c = np.asarray(target_amplitudes, dtype=complex).reshape(-1)
    if c.size == 0:
        raise ZeroAmplitude("target needs at least one amplitude")
    if np.abs(c).min() <= 1e-12 * np.abs(c).max():
        raise ZeroAmplitude("every retained target amplitude must be nonzero")
    return c


def design_profiles(target_amplitudes, h_values) -> tuple[np.ndarray, np.ndarray]:
    """Lowering-gain profile g(m) for a given offset profile h(m) and target.

    Returns (g, h) with g of length len(h)-1; g(m) for m >= N defaults to 1
    so the assembled operator keeps a one-dimensional null space when h has
    further zeros above N.
    """
    c = _clean_target(target_amplitudes)
    h = np.asarray(h_values, dtype=complex).reshape(-1)
    N = c.size - 1
    if h.size < N + 1:
        raise BadHProfile(f"offset profile needs at least {N + 1} entries, got {h.size}")
    scale = max(np.abs(h).max(), 1.0)
    if np.any(np.abs(h[:N]) <= 1e-12 * scale):
        raise BadHProfile("offset profile vanishes below the target degree")
    if abs(h[N]) > 1e-12 * scale:
        raise BadHProfile(f"offset profile must vanish at m={N}, got h({N})={h[N]:.3e}")
    g = np.ones(h.size - 1, dtype=complex)
    for m in range(N):
        g[m] = -h[m] * c[m] / (math.sqrt(m + 1) * c[m + 1])
    return g, h


def profile_operator(space: FockSpace, g_values, h_values) -> Operator:
    """Assemble d = g(n) a + h(n) from its diagonal profiles."""
    g = np.asarray(g_values, dtype=complex).reshape(-1)
    h = np.asarray(h_values, dtype=complex).reshape(-1)
    if h.size != space.dim or g.size != space.dim - 1:
        raise DimensionMismatch(
            f"profiles of length {g.size}/{h.size} do not fit dimension {space.dim}")
    mat = np.diag(h) + np.diag(g * np.sqrt(np.arange(1, space.dim)), 1)
    return Operator(space, mat)


def verify_dark_state(d: Operator, psi: Ket, null_tol: float = 1e-10) -> DarkStateCheck:
    """Residual ||d psi|| and the numerical nullity of d."""
    if d.space.dim != psi.space.dim:
        raise DimensionMismatch("operator and state live on different spaces")
    amp = psi.amp / np.linalg.norm(psi.amp)
    residual = float(np.linalg.norm(d.mat @ amp))
    sv = np.linalg.svd(d.mat, compute_uv=False)
    null_dim = int(np.sum(sv <= null_tol * sv[0]))
    return DarkStateCheck(residual=residual, null_dim=null_dim)


def solve_rabi_system(target_amplitudes, h_values, etas,
                      cond_limit: float = CONDITION_LIMIT) -> RabiSolution:
    """Rabi frequencies of the N red-sideband lasers producing the a-part.

    Row m of the system reads sum_n eta_n Omega_n f_1^{(eta_n)}(m) =
    i h(m) c_m / (sqrt(m+1) c_{m+1}) for m = 0 .. N-1.  The offset profile
    h sets the physical scale (carrier Rabi units).
    """
    c = _clean_target(target_amplitudes)
    N = c.size - 1
    if N < 1:
        raise ValueError("the linear system needs a target of degree N >= 1")
    etas = np.asarray(etas, dtype=float).reshape(-1)
    if etas.size != N:
        raise ValueError(f"need {N} Lamb-Dicke projections, got {etas.size}")
    if np.any((etas <= 0) | (etas >= 1)):
        raise ValueError("sideband projections must lie in (0, 1)")
    h = np.asarray(h_values, dtype=complex).reshape(-1)
    if h.size < N:
        raise BadHProfile(f"offset profile needs at least {N} entries, got {h.size}")

    A = np.empty((N, N), dtype=complex)
    for j, eta in enumerate(etas):
        A[:, j] = eta * sideband_amplitudes(N, 1, eta)
    b = np.array([1j * h[m] * c[m] / (math.sqrt(m + 1) * c[m + 1]) for m in range(N)])
    cond = float(np.linalg.cond(A))
    if not np.isfinite(cond) or cond > cond_limit:
        raise SingularSystem(
            f"condition number {cond:.3e} beyond {cond_limit:.1e}; "
            "the Lamb-Dicke projections are too close")
    omegas = np.linalg.solve(A, b)
    return RabiSolution(omegas=omegas, condition_number=cond, etas=etas)


def carrier_pair(eta_x: float, N: int, dim: int) -> CarrierPair:
    """Carrier-beam pair whose combined light shift profile first vanishes at N.

    The axial beam contributes exp(-eta_x^2/2) L_m(eta_x^2) per level, the
    orthogonal beam a level-independent offset; the returned ratio enforces
    h(N) = 0 exactly, including the Debye-Waller factor of the axial beam.
    """
    if N < 0 or int(N) != N:
        raise ValueError(f"target degree must be a nonnegative integer, got {N}")
    if N >= dim:
        raise DimensionMismatch(f"target degree {N} does not fit dimension {dim}")
    f0 = sideband_amplitudes(dim, 0, eta_x)      # exp(-eta^2/2) L_m(eta^2)
    ratio = -f0[N]
    h = f0 + ratio
    scale = np.abs(h).max()
    if scale <= 64 * np.finfo(float).eps * np.abs(f0).max():
        raise FirstZeroViolation(
            f"profile is numerically zero at eta_x={eta_x}; the degenerate "
            "small-eta limit leaves no resolvable zero pattern")
    if np.any(h[:N] <= 1e-12 * scale):
        raise FirstZeroViolation(
            f"profile vanishes or crosses zero below m={N}; reduce the target "
            f"degree or increase eta_x={eta_x}")
    return CarrierPair(ratio=float(ratio), h_values=h)


def default_sideband_etas(eta_max: float, N: int) -> np.ndarray:
    """Distinct projections eta_max * cos(theta) with theta even in [0, 60 deg]."""
    if N == 1:
        return np.array([eta_max])
    return eta_max * np.cos(np.linspace(0.0, np.pi / 3.0, N))


def vacuum_drive(space: FockSpace, eta: float, omega1: float,
                 gamma: float = 1.0) -> EngineeredDissipator:
    """Single red-sideband beam pinning the vacuum (ordinary sideband cooling).

    The degree-zero member of the finite-superposition family: the offset
    profile is identically zero and d reduces to i f_1(n) a, whose only dark
    state on the retained levels is |0>.
    """
    if not 0.0 < eta < 1.0:
        raise ValueError(f"eta must lie in (0, 1), got {eta}")
    if omega1 <= 0 or gamma <= 0:
        raise ValueError("omega1 and gamma must be positive")
    f1 = sideband_amplitudes(space.dim, 1, eta)
    d = Operator(space, 1j * np.diag(f1) @ annihilation(space).mat)
    drives = (LaserDrive(omega1, 1, eta, "sideband_red1"),)
    meta = {"family": "vacuum", "coupling_g": eta * omega1 / 2.0}
    return EngineeredDissipator(d, (eta * omega1) ** 2 / gamma, drives,
                                basis_ket(space, 0), meta)


def qubit_drive(space: FockSpace, c0: complex, c1: complex, eta: float,
                omega1: float, gamma: float = 1.0) -> EngineeredDissipator:
    """Three-laser realization protecting c0|0> + c1|1>.

    One first-red-sideband beam (Omega_1) and a carrier pair with

        Omega_x = -i Omega_1 (c1/c0) / eta
        Omega_y =  i Omega_1 exp(-eta^2/2) (c1/c0) (1 - eta^2) / eta

    The 1 - eta^2 factor is the exact first Laguerre polynomial of the axial
    carrier, so the dark state is exact on the retained levels.  The coupling
    scale is g = eta Omega_1 / 2, hence gamma_eng = eta^2 Omega_1^2 / gamma.
    """
    if abs(c0) < 1e-12 or abs(c1) < 1e-12:
        raise ZeroAmplitude(
            "qubit_drive needs both amplitudes nonzero; protect the vacuum with d = a instead")
    if not 0.0 < eta < 1.0:
        raise ValueError(f"eta must lie in (0, 1), got {eta}")
    if omega1 <= 0 or gamma <= 0:
        raise ValueError("omega1 and gamma must be positive")
    ratio = c1 / c0
    omega_x = -1j * omega1 * ratio / eta
    omega_y = 1j * omega1 * math.exp(-eta * eta / 2.0) * ratio * (1 - eta * eta) / eta
    drives = (
        LaserDrive(omega1, 1, eta, "sideband_red1"),
        LaserDrive(omega_x, 0, eta, "carrier_axial"),
        LaserDrive(omega_y, 0, 0.0, "carrier_orthogonal"),
    )
    f1 = sideband_amplitudes(space.dim, 1, eta)
    f0 = sideband_amplitudes(space.dim, 0, eta)
    g = eta * omega1 / 2.0
    h_prof = (omega_x * f0 + omega_y) / (2.0 * g)
    d = Operator(space, 1j * np.diag(f1) @ annihilation(space).mat + np.diag(h_prof))
    target = ket_from_amplitudes(space, [c0, c1])
    meta = {
        "family": "qubit",
        "omega_x_over_omega1": complex(omega_x / omega1),
        "omega_y_over_omega1": complex(omega_y / omega1),
        "coupling_g": g,
    }
    return EngineeredDissipator(d, (eta * omega1) ** 2 / gamma, drives, target, meta)


def superposition_drive(space: FockSpace, target_amplitudes, eta_max: float,
                        omega_x: float, gamma: float = 1.0,
                        etas=None) -> EngineeredDissipator:
    """N+2 laser realization protecting a degree-N number-state superposition.

    The carrier pair fixes the offset profile (first zero at N); the N
    red-sideband Rabi frequencies then solve the design system.  Coupling
    scale g = Omega_x / 2, so gamma_eng = Omega_x^2 / gamma.
    """
    c = _clean_target(target_amplitudes)
    N = c.size - 1
    if N < 1:
        raise ValueError("superposition_drive needs a target of degree N >= 1")
    if omega_x <= 0 or gamma <= 0:
        raise ValueError("omega_x and gamma must be positive")
    pair = carrier_pair(eta_max, N, space.dim)
    etas = default_sideband_etas(eta_max, N) if etas is None else np.asarray(etas, float)
    sol = solve_rabi_system(c, omega_x * pair.h_values, etas)

    # superdiagonal profile contributed by the sideband beams, in units of 2g
    s_prof = np.zeros(space.dim, dtype=complex)
    for om, eta in zip(sol.omegas, etas):
        s_prof += om * eta * sideband_amplitudes(space.dim, 1, eta)
    g = omega_x / 2.0
    gain = 1j * s_prof / (2.0 * g)
    d = profile_operator(space, gain[:-1], omega_x * pair.h_values / (2.0 * g))

    drives = [LaserDrive(om, 1, eta, f"sideband_red1_{j + 1}")
              for j, (om, eta) in enumerate(zip(sol.omegas, etas))]
    drives.append(LaserDrive(omega_x, 0, eta_max, "carrier_axial"))
    drives.append(LaserDrive(omega_x * pair.ratio, 0, 0.0, "carrier_orthogonal"))
    target = ket_from_amplitudes(space, c)
    meta = {
        "family": "superposition",
        "carrier_ratio": pair.ratio,
        "condition_number": sol.condition_number,
        "coupling_g": g,
    }
    return EngineeredDissipator(d, omega_x ** 2 / gamma, drives, target, meta)


def cat_dissipator(space: FockSpace, alpha: complex, gamma_eng: float,
                   tail_tol: float = 1e-8) -> EngineeredDissipator:
    """Abstract jump operator exp(i pi n) a + i alpha for the balanced cat.

    No finite set of laser beams is known to realize this operator, so the
    drive list stays empty and only the reduced model applies.
    """
    target = cat_plus_state(space, alpha, tail_tol=tail_tol)
    d = parity(space) @ annihilation(space) + (1j * alpha) * identity(space)
    meta = {"family": "cat", "alpha": complex(alpha)}
    return EngineeredDissipator(d, gamma_eng, (), target, meta, residual_tol=1e-7)


def squeeze_dissipator(space: FockSpace, r: float, omega1: float,
                       eta: float = 0.05, gamma: float = 1.0) -> EngineeredDissipator:
    """Bogoliubov jump operator a + tanh(r) a+ with its two-sideband realization.

    Red and blue first-sideband beams along the squeezing direction with
    Omega_2 / Omega_1 = tanh(r).  The drive realization approaches the ideal
    operator in the small-eta limit; the dark-state residual of the ideal
    operator itself is set by the geometric truncation tail of the even
    amplitude chain, so the acceptance gate scales with tanh(r)^(dim/2)
    rather than sitting at the exact-family level.
    """
    if r < 0:
        raise ValueError(f"squeezing factor must be nonnegative, got {r}")
    if omega1 <= 0 or gamma <= 0:
        raise ValueError("omega1 and gamma must be positive")
    chi = math.tanh(r)
    a = annihilation(space)
    d = a + chi * a.dag()
    target = squeezed_vacuum(space, r)
    drives = [LaserDrive(omega1, 1, eta, "sideband_red1")]
    if chi > 0:
        drives.append(LaserDrive(chi * omega1, -1, eta, "sideband_blue1"))
    meta = {"family": "squeezed", "chi": chi, "omega2_over_omega1": chi,
            "coupling_g": eta * omega1 / 2.0}
    # truncation-tail bound on the relative residual of the even chain
    m_top = (space.dim - 2) // 2
    tail_bound = 10.0 * chi ** (m_top + 1) if chi > 0 else 0.0
    tol = max(1e-8, tail_bound)
    return EngineeredDissipator(d, (eta * omega1) ** 2 / gamma, drives, target,
                                meta, residual_tol=tol)
