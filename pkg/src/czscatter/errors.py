"""Exception types shared across the package."""


class CzScatterError(Exception):
    """Base class for all errors raised by czscatter."""


class PoleError(CzScatterError, ValueError):
    """Photon-atom coupling evaluated exactly on resonance (v*k == omega0).

    The effective barrier strength diverges there; pick the wavevector from a
    target coupling instead, e.g. ``detuning_for_gamma``.
    """


class AdmissibilityError(CzScatterError, ValueError):
    """Wavepacket parameters violate a separation or bandwidth condition."""


class DegeneratePhaseError(CzScatterError, ArithmeticError):
    """Reflection phase undefined because the closed-form bracket vanished."""


class SolveError(CzScatterError, RuntimeError):
    """A linear boundary-condition solve failed (singular or non-finite)."""


class ConsistencyError(CzScatterError, RuntimeError):
    """Two supposedly equivalent computation routes disagreed."""
