"""Truncated Fock-space algebra for a single vibrational mode.

Ladder operators, the diagonal Lamb-Dicke coupling functions that govern
sideband transitions, and constructors for the nonclassical states handled
by the inverse-design layer (coherent, balanced cat, squeezed vacuum,
truncated phase states).

All state constructors renormalize to unit norm on the retained levels and
record the discarded tail mass; they raise :class:`TruncationError` when the
tail exceeds the tolerance instead of silently misrepresenting the state.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import DimensionMismatch, TruncationError

DEFAULT_TAIL_TOL = 1e-8


@dataclass(frozen=True)
class FockSpace:
    """Vibrational Hilbert space truncated to the lowest ``dim`` number states."""

    dim: int

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 2:
            raise ValueError(f"FockSpace dimension must be an integer >= 2, got {self.dim}")


def default_dimension(mean_excitation: float) -> int:
    """Truncation keeping the tail mass of low-energy states around 1e-8 or below."""
    return max(20, int(math.ceil(8.0 * float(mean_excitation) + 10.0)))


def _check_space(a, b):
    if a.dim != b.dim:
        raise DimensionMismatch(f"operands on spaces of dimension {a.dim} and {b.dim}")


class Operator:
    """Dense complex matrix attached to a :class:`FockSpace`.

    Thin wrapper so that compositions across mismatched truncations are
    rejected instead of silently broadcasting.
    """

    __slots__ = ("space", "mat")

    def __init__(self, space: FockSpace, mat):
        mat = np.asarray(mat, dtype=complex)
        if mat.shape != (space.dim, space.dim):
            raise DimensionMismatch(
                f"matrix shape {mat.shape} does not match space dimension {space.dim}"
            )
        if not np.all(np.isfinite(mat)):
            raise ValueError("operator entries must be finite")
        self.space = space
        self.mat = mat

    def dag(self) -> "Operator":
        return Operator(self.space, self.mat.conj().T)

    def __matmul__(self, other):
        if isinstance(other, Operator):
            _check_space(self.space, other.space)
            return Operator(self.space, self.mat @ other.mat)
        if isinstance(other, Ket):
            _check_space(self.space, other.space)
            return Ket(other.space, self.mat @ other.amp, tail=other.tail)
        return NotImplemented

    def __add__(self, other):
        if not isinstance(other, Operator):
            return NotImplemented
        _check_space(self.space, other.space)
        return Operator(self.space, self.mat + other.mat)

    def __sub__(self, other):
        if not isinstance(other, Operator):
            return NotImplemented
        _check_space(self.space, other.space)
        return Operator(self.space, self.mat - other.mat)

    def __neg__(self):
        return Operator(self.space, -self.mat)

    def __mul__(self, scalar):
        if isinstance(scalar, (int, float, complex)):
            return Operator(self.space, scalar * self.mat)
        return NotImplemented

    __rmul__ = __mul__

    def norm_max(self) -> float:
        return float(np.abs(self.mat).max())

    def largest_singular_value(self) -> float:
        return float(np.linalg.svd(self.mat, compute_uv=False)[0])

    def __repr__(self):
        return f"Operator(dim={self.space.dim})"


class Ket:
    """State vector on a :class:`FockSpace`.

    ``tail`` records the amplitude mass discarded by truncation when the ket
    was built by one of the state constructors (zero for derived vectors).
    """

    __slots__ = ("space", "amp", "tail")

    def __init__(self, space: FockSpace, amp, tail: float = 0.0):
        amp = np.asarray(amp, dtype=complex).reshape(-1)
        if amp.shape != (space.dim,):
            raise DimensionMismatch(
                f"amplitude length {amp.shape[0]} does not match space dimension {space.dim}"
            )
        if not np.all(np.isfinite(amp)):
            raise ValueError("amplitudes must be finite")
        self.space = space
        self.amp = amp
        self.tail = float(tail)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amp))

    def normalized(self) -> "Ket":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return Ket(self.space, self.amp / n, tail=self.tail)

    def overlap(self, other: "Ket") -> complex:
        _check_space(self.space, other.space)
        return complex(np.vdot(self.amp, other.amp))

    def number_distribution(self) -> np.ndarray:
        return np.abs(self.amp) ** 2

    def mean_excitation(self) -> float:
        return float(np.sum(np.arange(self.space.dim) * self.number_distribution()))

    def __repr__(self):
        return f"Ket(dim={self.space.dim}, tail={self.tail:.2e})"


# ---------------------------------------------------------------------------
# elementary operators
# ---------------------------------------------------------------------------

def annihilation(space: FockSpace) -> Operator:
    """Ladder lowering operator, <n-1|a|n> = sqrt(n)."""
    return Operator(space, np.diag(np.sqrt(np.arange(1, space.dim)), 1))


def creation(space: FockSpace) -> Operator:
    return annihilation(space).dag()


def number_operator(space: FockSpace) -> Operator:
    return Operator(space, np.diag(np.arange(space.dim).astype(complex)))


def identity(space: FockSpace) -> Operator:
    return Operator(space, np.eye(space.dim))


def parity(space: FockSpace) -> Operator:
    """exp(i pi n); flips the sign of odd number states."""
    return Operator(space, np.diag((-1.0 + 0j) ** np.arange(space.dim)))


def position_quadrature(space: FockSpace) -> Operator:
    """Dimensionless position a + a† (Hermitian by construction)."""
    a = annihilation(space).mat
    return Operator(space, a + a.conj().T)


def displacement(space: FockSpace, beta: complex) -> Operator:
    """exp(beta a† - beta* a) via dense matrix exponential."""
    a = annihilation(space).mat
    return Operator(space, sla.expm(beta * a.conj().T - np.conj(beta) * a))


def sideband_amplitudes(n_levels: int, k: int, eta: float) -> np.ndarray:
    """Lamb-Dicke coupling amplitudes f_k(n) for n = 0 .. n_levels-1.

    f_k(n) = exp(-eta^2/2) sum_{l=0}^{n} (-eta^2)^l n! / (l! (l+k)! (n-l)!),
    evaluated with a stable term recurrence (no raw factorials, which lose
    precision long before they overflow).  Coincides with the generalized
    Laguerre form exp(-eta^2/2) n!/(n+k)! L_n^{(k)}(eta^2).
    """
    if k < 0 or int(k) != k:
        raise ValueError(f"sideband order must be a nonnegative integer, got {k}")
    if not 0.0 < eta < 1.0:
        raise ValueError(f"Lamb-Dicke parameter must lie in (0, 1), got {eta}")
    e2 = eta * eta
    vals = np.empty(n_levels)
    for n in range(n_levels):
        term = 1.0 / math.factorial(k)
        acc = term
        for l in range(1, n + 1):
            term *= -e2 * (n - l + 1) / (l * (l + k))
            acc += term
        vals[n] = math.exp(-e2 / 2.0) * acc
    return vals


def sideband_coupling(space: FockSpace, k: int, eta: float) -> Operator:
    """Diagonal operator of the k-th sideband coupling amplitudes f_k(n)."""
    return Operator(space, np.diag(sideband_amplitudes(space.dim, k, eta).astype(complex)))


# ---------------------------------------------------------------------------
# state constructors
# ---------------------------------------------------------------------------

def _log_factorials(n_levels: int) -> np.ndarray:
    return np.concatenate(([0.0], np.cumsum(np.log(np.arange(1, n_levels)))))


def _coherent_amplitudes(dim: int, alpha: complex) -> tuple[np.ndarray, float]:
    """Exact (untruncated-normalized) coherent amplitudes and the tail mass."""
    if alpha == 0:
        amp = np.zeros(dim, complex)
        amp[0] = 1.0
        return amp, 0.0
    n = np.arange(dim)
    log_amp = -abs(alpha) ** 2 / 2.0 + n * np.log(complex(alpha)) - 0.5 * _log_factorials(dim)
    amp = np.exp(log_amp)
    tail = max(0.0, 1.0 - float(np.sum(np.abs(amp) ** 2)))
    return amp, tail


def _finish_ket(space, amp, tail, tail_tol, what):
    if tail > tail_tol:
        raise TruncationError(
            f"{what}: discarded tail mass {tail:.3e} exceeds tolerance {tail_tol:.1e} "
            f"at dimension {space.dim}"
        )
    amp = amp / np.linalg.norm(amp)
    return Ket(space, amp, tail=tail)


def basis_ket(space: FockSpace, n: int) -> Ket:
    if not 0 <= n < space.dim:
        raise ValueError(f"number state index {n} outside 0..{space.dim - 1}")
    amp = np.zeros(space.dim, complex)
    amp[n] = 1.0
    return Ket(space, amp)


def ket_from_amplitudes(space: FockSpace, amplitudes) -> Ket:
    """Ket from a (possibly unnormalized) amplitude list, zero-padded to dim."""
    c = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if len(c) > space.dim:
        raise DimensionMismatch(f"{len(c)} amplitudes exceed space dimension {space.dim}")
    amp = np.zeros(space.dim, complex)
    amp[: len(c)] = c
    nrm = np.linalg.norm(amp)
    if nrm == 0.0:
        raise ValueError("amplitude list must not be identically zero")
    return Ket(space, amp / nrm)


def coherent_state(space: FockSpace, alpha: complex, tail_tol: float = DEFAULT_TAIL_TOL) -> Ket:
    """Coherent state |alpha>, c_n = exp(-|alpha|^2/2) alpha^n / sqrt(n!)."""
    amp, tail = _coherent_amplitudes(space.dim, alpha)
    return _finish_ket(space, amp, tail, tail_tol, f"coherent_state(alpha={alpha})")


def cat_plus_state(space: FockSpace, alpha: complex, tail_tol: float = DEFAULT_TAIL_TOL) -> Ket:
    """Balanced superposition (|alpha> + i|-alpha>)/norm.

    Its number distribution coincides with the coherent one for every n, so
    the state has no hole that would obstruct a finite-superposition design.
    """
    cp, tail = _coherent_amplitudes(space.dim, alpha)
    cm, _ = _coherent_amplitudes(space.dim, -alpha)
    # <alpha|-alpha> is real, so the exact squared norm of the sum is 2 and
    # the discarded mass equals the coherent tail.
    return _finish_ket(space, cp + 1j * cm, tail, tail_tol, f"cat_plus_state(alpha={alpha})")


def cat_unitary(space: FockSpace, alpha: complex, tail_tol: float = DEFAULT_TAIL_TOL) -> Operator:
    """Unitary that maps the vacuum onto the balanced cat state.

    Product of the quadratic phase ladder exp[i pi n(n-1)/2] and the
    momentum-type displacement exp[-i(alpha a† + alpha* a)].  The phase
    convention is fixed by its two defining properties: applied to |0> it
    yields (|alpha> + i|-alpha>)/sqrt(2) up to a global phase, and it
    conjugates a into  exp(i pi n) a + i alpha.
    """
    _, tail = _coherent_amplitudes(space.dim, alpha)
    if tail > tail_tol:
        raise TruncationError(
            f"cat_unitary(alpha={alpha}): displacement tail {tail:.3e} exceeds "
            f"{tail_tol:.1e} at dimension {space.dim}"
        )
    n = np.arange(space.dim)
    phase = np.diag(np.exp(1j * np.pi * n * (n - 1) / 2.0))
    return Operator(space, phase @ displacement(space, -1j * alpha).mat)


def squeezed_vacuum(space: FockSpace, r: float, tail_tol: float = DEFAULT_TAIL_TOL) -> Ket:
    """Squeezed vacuum with even amplitudes c_2m ~ (-tanh r)^m sqrt((2m)!)/(2^m m!).

    Annihilated by the Bogoliubov mode a + tanh(r) a† (up to truncation).
    """
    if r < 0:
        raise ValueError(f"squeezing factor must be nonnegative, got {r}")
    chi = math.tanh(r)
    amp = np.zeros(space.dim, complex)
    amp[0] = 1.0
    for m in range(1, (space.dim - 1) // 2 + 1):
        amp[2 * m] = amp[2 * m - 2] * (-chi) * math.sqrt((2 * m - 1) / (2 * m))
    # exact normalization of the untruncated chain is 1/sqrt(cosh r)
    tail = max(0.0, 1.0 - float(np.sum(np.abs(amp) ** 2)) / math.cosh(r))
    return _finish_ket(space, amp, tail, tail_tol, f"squeezed_vacuum(r={r})")


def phase_state(space: FockSpace, N: int, phi: float) -> Ket:
    """Truncated phase state, c_n = exp(i n phi)/sqrt(N+1) for n <= N."""
    if N < 0 or int(N) != N:
        raise ValueError(f"phase-state degree must be a nonnegative integer, got {N}")
    if N >= space.dim:
        raise DimensionMismatch(f"phase-state degree {N} does not fit dimension {space.dim}")
    amp = np.zeros(space.dim, complex)
    amp[: N + 1] = np.exp(1j * phi * np.arange(N + 1)) / math.sqrt(N + 1)
    return Ket(space, amp)
