"""Lindblad generators: assembly, spectral analysis, and time propagation.

A generator collects jump channels (gamma_i, c_i) and an optional Hamiltonian
(expressed in the same rate units) and produces

    drho/dt = -i[H, rho] + sum_i (gamma_i/2)(2 c_i rho c_i+ - c_i+ c_i rho - rho c_i+ c_i).

Steady states and spectral gaps come from the dense column-stacked
superoperator; propagation integrates the D x D right-hand side directly so
the D^2 x D^2 matrix is only ever formed for spectral analysis.
"""

import warnings

import numpy as np
import scipy.linalg as sla
from scipy.integrate import solve_ivp

from .errors import (
    DegenerateNullSpace,
    DimensionMismatch,
    IntegratorFailure,
    NegativeRate,
    PositivityViolation,
    SizeGuardExceeded,
)
from .hilbert import FockSpace, Ket, Operator

NULL_SPACE_TOL = 1e-10
SUPEROP_MAX_DIM = 128


class LindbladChannel:
    """Rate paired with a jump operator; the rate carries the time units."""

    __slots__ = ("rate", "jump")

    def __init__(self, rate: float, jump: Operator):
        if not np.isfinite(rate) or rate < 0:
            raise NegativeRate(f"channel rate must be finite and >= 0, got {rate}")
        self.rate = float(rate)
        self.jump = jump

    def __repr__(self):
        return f"LindbladChannel(rate={self.rate:.4g}, dim={self.jump.space.dim})"


class DensityMatrix:
    """Hermitian, unit-trace, positive (within tolerance) matrix on a space."""

    __slots__ = ("space", "mat")

    def __init__(self, space: FockSpace, mat, validate: bool = True,
                 trace_tol: float = 1e-10, herm_tol: float = 1e-10, pos_tol: float = 1e-8):
        mat = np.asarray(mat, dtype=complex)
        if mat.shape != (space.dim, space.dim):
            raise DimensionMismatch(
                f"matrix shape {mat.shape} does not match space dimension {space.dim}"
            )
        self.space = space
        self.mat = mat
        if validate:
            self.validate(trace_tol=trace_tol, herm_tol=herm_tol, pos_tol=pos_tol)

    @classmethod
    def from_ket(cls, ket: Ket) -> "DensityMatrix":
        amp = ket.amp / np.linalg.norm(ket.amp)
        return cls(ket.space, np.outer(amp, amp.conj()), validate=False)

    @classmethod
    def maximally_mixed(cls, space: FockSpace) -> "DensityMatrix":
        return cls(space, np.eye(space.dim) / space.dim, validate=False)

    def validate(self, trace_tol: float = 1e-10, herm_tol: float = 1e-10,
                 pos_tol: float = 1e-8):
        if np.abs(self.mat - self.mat.conj().T).max() > herm_tol:
            raise ValueError("density matrix is not Hermitian within tolerance")
        if abs(np.trace(self.mat) - 1.0) > trace_tol:
            raise ValueError(f"trace {np.trace(self.mat):.12f} deviates from 1 beyond {trace_tol:.1e}")
        lo = float(np.linalg.eigvalsh((self.mat + self.mat.conj().T) / 2).min())
        if lo < -pos_tol:
            raise PositivityViolation(f"minimum eigenvalue {lo:.3e} below -{pos_tol:.1e}")

    def trace(self) -> float:
        return float(np.trace(self.mat).real)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh((self.mat + self.mat.conj().T) / 2).min())

    def expect(self, op: Operator) -> float:
        if op.space.dim != self.space.dim:
            raise DimensionMismatch("expectation value across mismatched spaces")
        val = np.sum(op.mat * self.mat.T)
        return float(val.real)

    def __repr__(self):
        return f"DensityMatrix(dim={self.space.dim})"


class Generator:
    """Immutable bundle of jump channels and an optional Hamiltonian."""

    def __init__(self, channels, hamiltonian: Operator | None = None,
                 space: FockSpace | None = None):
        channels = tuple(channels)
        if space is None:
            if hamiltonian is not None:
                space = hamiltonian.space
            elif channels:
                space = channels[0].jump.space
            else:
                raise ValueError("an empty generator needs an explicit space")
        for ch in channels:
            if ch.jump.space.dim != space.dim:
                raise DimensionMismatch("all jump operators must share one space")
        if hamiltonian is not None and hamiltonian.space.dim != space.dim:
            raise DimensionMismatch("Hamiltonian space does not match the channels")
        self.space = space
        self.channels = channels
        self.hamiltonian = hamiltonian
        d = space.dim
        # scaled jump stack: sum_k J_k rho J_k+ with J_k = sqrt(gamma_k) c_k
        if channels:
            self._jumps = np.stack([np.sqrt(ch.rate) * ch.jump.mat for ch in channels])
        else:
            self._jumps = np.zeros((0, d, d), complex)
        self._jumps_dag = self._jumps.conj().transpose(0, 2, 1)
        self._anticomm = np.einsum("kij,kjl->il", self._jumps_dag, self._jumps) \
            if channels else np.zeros((d, d), complex)

    def scaled(self, factor: float) -> "Generator":
        """Same structure with every rate multiplied by ``factor``."""
        if factor < 0:
            raise NegativeRate("scaling factor must be nonnegative")
        chans = [LindbladChannel(ch.rate * factor, ch.jump) for ch in self.channels]
        ham = None if self.hamiltonian is None else factor * self.hamiltonian
        return Generator(chans, ham, space=self.space)

    def __repr__(self):
        return (f"Generator(dim={self.space.dim}, channels={len(self.channels)}, "
                f"hamiltonian={'yes' if self.hamiltonian is not None else 'no'})")


def _as_matrix(rho, dim):
    mat = rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    if mat.shape != (dim, dim):
        raise DimensionMismatch(f"state shape {mat.shape} does not match dimension {dim}")
    return mat


def apply_generator(gen: Generator, rho) -> np.ndarray:
    """Right-hand side d(rho)/dt for a density matrix or raw matrix."""
    mat = _as_matrix(rho, gen.space.dim)
    out = np.zeros_like(mat)
    if gen._jumps.shape[0]:
        sandwich = np.einsum("kij,jl,kml->im", gen._jumps, mat, gen._jumps.conj(),
                             optimize=True)
        out += sandwich - 0.5 * (gen._anticomm @ mat + mat @ gen._anticomm)
    if gen.hamiltonian is not None:
        h = gen.hamiltonian.mat
        out += -1j * (h @ mat - mat @ h)
    return out


def build_superoperator(gen: Generator, max_dim: int = SUPEROP_MAX_DIM) -> np.ndarray:
    """Dense D^2 x D^2 matrix M with vec(L rho) = M vec(rho) (row-major vec)."""
    d = gen.space.dim
    if d > max_dim:
        raise SizeGuardExceeded(f"dimension {d} exceeds the superoperator guard {max_dim}")
    eye = np.eye(d)
    M = np.zeros((d * d, d * d), complex)
    for ch in gen.channels:
        c = ch.jump.mat
        cdc = c.conj().T @ c
        M += ch.rate * (np.kron(c, c.conj())
                        - 0.5 * np.kron(cdc, eye) - 0.5 * np.kron(eye, cdc.T))
    if gen.hamiltonian is not None:
        h = gen.hamiltonian.mat
        M += -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    return M


class SteadyStateResult:
    """Null-space basis of the generator with its multiplicity."""

    __slots__ = ("states", "multiplicity", "degenerate")

    def __init__(self, states, multiplicity, degenerate):
        self.states = states
        self.multiplicity = multiplicity
        self.degenerate = degenerate

    def __iter__(self):
        return iter(self.states)


def _null_cluster(eigvals: np.ndarray, scale: float, tol: float) -> np.ndarray:
    return np.abs(eigvals) <= tol * max(scale, 1e-300)


def steady_states(gen: Generator, tol: float = NULL_SPACE_TOL,
                  max_dim: int = SUPEROP_MAX_DIM) -> SteadyStateResult:
    """All steady states: eigenvalue cluster |lambda| <= tol * ||M||_F.

    Each null vector is reshaped, Hermitized and trace-normalized.  A
    multiplicity above one is flagged with a :class:`DegenerateNullSpace`
    warning, since residual environment terms can then still drive
    transitions inside the steady manifold.
    """
    M = build_superoperator(gen, max_dim=max_dim)
    scale = float(np.linalg.norm(M))
    eigvals, eigvecs = np.linalg.eig(M)
    mask = _null_cluster(eigvals, scale, tol)
    multiplicity = int(mask.sum())
    d = gen.space.dim
    states = []
    for idx in np.nonzero(mask)[0]:
        mat = eigvecs[:, idx].reshape(d, d)
        mat = (mat + mat.conj().T) / 2.0
        tr = np.trace(mat).real
        if abs(tr) > 1e-12 * d:
            mat = mat / tr
        else:  # traceless null direction in a degenerate manifold
            mat = mat / np.linalg.norm(mat)
        states.append(DensityMatrix(gen.space, mat, validate=False))
    degenerate = multiplicity > 1
    if degenerate:
        warnings.warn(
            f"steady-state manifold has multiplicity {multiplicity}",
            DegenerateNullSpace, stacklevel=2)
    return SteadyStateResult(states, multiplicity, degenerate)


def spectral_gap(gen: Generator, tol: float = NULL_SPACE_TOL,
                 max_dim: int = SUPEROP_MAX_DIM) -> float:
    """Asymptotic relaxation rate: -max Re(lambda) outside the null cluster."""
    M = build_superoperator(gen, max_dim=max_dim)
    scale = float(np.linalg.norm(M))
    eigvals = np.linalg.eigvals(M)
    mask = _null_cluster(eigvals, scale, tol)
    rest = eigvals[~mask]
    if rest.size == 0:
        return 0.0
    return float(-rest.real.max())


def propagate(gen: Generator, rho0: DensityMatrix, t_grid, *,
              rtol: float = 1e-8, atol: float = 1e-10, method: str = "DOP853",
              trace_tol: float = 1e-7, positivity_tol: float = 1e-6) -> list[DensityMatrix]:
    """Integrate rho(t) on an increasing grid starting at 0.

    Adaptive embedded Runge-Kutta on the dense D x D right-hand side; each
    output is Hermitized and audited for trace drift and positivity.
    """
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ValueError("t_grid must be a nonempty 1-d array")
    if t[0] != 0.0 or (t.size > 1 and np.any(np.diff(t) <= 0)):
        raise ValueError("t_grid must start at 0 and increase strictly")
    dim = gen.space.dim
    mat0 = _as_matrix(rho0, dim)

    if t.size == 1:
        raw = [mat0]
    else:
        def rhs(_t, y):
            return apply_generator(gen, y.reshape(dim, dim)).reshape(-1)

        sol = solve_ivp(rhs, (0.0, float(t[-1])), mat0.reshape(-1).astype(complex),
                        t_eval=t, method=method, rtol=rtol, atol=atol)
        if not sol.success:
            raise IntegratorFailure(f"integration failed: {sol.message}")
        raw = [sol.y[:, k].reshape(dim, dim) for k in range(t.size)]

    out = []
    for tk, mat in zip(t, raw):
        mat = (mat + mat.conj().T) / 2.0
        drift = abs(np.trace(mat).real - 1.0)
        if drift > trace_tol:
            raise IntegratorFailure(f"trace drift {drift:.3e} at t={tk:.4g} exceeds {trace_tol:.1e}")
        lo = float(np.linalg.eigvalsh(mat).min())
        if lo < -positivity_tol:
            raise PositivityViolation(
                f"minimum eigenvalue {lo:.3e} at t={tk:.4g} below -{positivity_tol:.1e}")
        out.append(DensityMatrix(gen.space, mat, validate=False))
    return out


def fidelity(rho_ref, rho_t) -> float:
    """Tr[rho_ref rho_t]; equals the overlap when the reference is pure."""
    a = rho_ref.mat if isinstance(rho_ref, DensityMatrix) else np.asarray(rho_ref, complex)
    b = rho_t.mat if isinstance(rho_t, DensityMatrix) else np.asarray(rho_t, complex)
    if a.shape != b.shape:
        raise DimensionMismatch(f"fidelity across shapes {a.shape} and {b.shape}")
    val = complex(np.sum(a * b.T))
    if abs(val.imag) > 1e-10 * max(1.0, abs(val)):
        raise ValueError(f"fidelity has imaginary residue {val.imag:.3e}")
    return float(val.real)


def trace_distance(rho_a, rho_b) -> float:
    a = rho_a.mat if isinstance(rho_a, DensityMatrix) else np.asarray(rho_a, complex)
    b = rho_b.mat if isinstance(rho_b, DensityMatrix) else np.asarray(rho_b, complex)
    if a.shape != b.shape:
        raise DimensionMismatch(f"trace distance across shapes {a.shape} and {b.shape}")
    diff = (a - b + (a - b).conj().T) / 2.0
    return float(0.5 * np.abs(np.linalg.eigvalsh(diff)).sum())
