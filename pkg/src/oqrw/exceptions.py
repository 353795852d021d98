"""Exception types shared across the package."""


class OqrwError(Exception):
    """Base class for all package-specific errors."""


class NormalizationError(OqrwError):
    """Kraus pair violates B*B + C*C = I.

    Carries the max-norm deviation in ``defect``.
    """

    def __init__(self, defect: float):
        self.defect = float(defect)
        super().__init__(
            f"Kraus normalization defect ||B*B + C*C - I||_inf = {self.defect:.3e} "
            "exceeds 1e-12"
        )


class SumError(OqrwError):
    """Distribution mass drifted away from 1 beyond tolerance."""


class ResidueError(OqrwError):
    """Fourier inversion left a non-negligible imaginary residue."""


class NonUniqueInvariant(OqrwError):
    """The channel's invariant state is not unique; CLT parameters undefined."""


class NoInvariantState(OqrwError):
    """No eigenvalue near 1 found (numerical failure; impossible for valid pairs)."""


class DegenerateJump(OqrwError):
    """Both trajectory branches have vanishing probability."""


class DegenerateMax(OqrwError):
    """|f| does not have an isolated maximum on the sampling grid."""


class ParameterError(OqrwError):
    """Example parameters violate their admissible range."""


class UnsupportedExample(OqrwError):
    """The requested operation has no closed form for this example."""


class SizeError(OqrwError):
    """Requested computation exceeds a hard resource guard."""
