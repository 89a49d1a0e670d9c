"""Exception types shared across the package."""


class IonProtectError(Exception):
    """Base class for all package-specific failures."""


class DimensionMismatch(IonProtectError):
    """Operands live on Hilbert spaces of different dimension."""


class TruncationError(IonProtectError):
    """Discarded amplitude tail beyond the retained Fock levels is too large."""


class SizeGuardExceeded(IonProtectError):
    """Requested dense superoperator would exceed the configured size budget."""


class IntegratorFailure(IonProtectError):
    """Time propagation failed (step underflow or trace drift beyond tolerance)."""


class PositivityViolation(IonProtectError):
    """A density matrix developed a negative eigenvalue beyond tolerance."""


class NegativeRate(IonProtectError):
    """Dissipation rates must be nonnegative."""


class ZeroAmplitude(IonProtectError):
    """Inverse design requires every retained target amplitude to be nonzero."""


class BadHProfile(IonProtectError):
    """Diagonal offset profile violates its zero-pattern requirements."""


class SingularSystem(IonProtectError):
    """Rabi-frequency linear system is numerically singular."""


class FirstZeroViolation(IonProtectError):
    """Carrier-pair profile vanishes or crosses zero below the intended level."""


class InconsistentScale(IonProtectError):
    """No positive coupling scale renders the requested drive decomposition."""


class QuadratureNotConverged(IonProtectError):
    """Recoil quadrature changes beyond tolerance under node doubling."""


class ParseError(IonProtectError):
    """Scenario document is not well-formed."""


class ValidationError(IonProtectError):
    """Scenario document violates a declared invariant."""


class DegenerateNullSpace(UserWarning):
    """Steady-state null space has multiplicity above one."""
