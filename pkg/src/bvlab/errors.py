"""Error types shared across the package.

Exit-code mapping used by the CLI: validation problems exit 2, capacity and
unresolved-scale/truncation problems exit 3.
"""

# Frequencies are kept as checked 64-bit-range integers.  Constructions that
# would exceed this raise CapacityError instead of silently losing precision.
FREQ_CAP = 2**63 - 1


class BVLabError(Exception):
    """Base class for package errors."""


class ValidationError(BVLabError):
    """Invalid parameters or malformed input documents."""


class CapacityError(BVLabError):
    """A requested construction exceeds the 64-bit frequency range."""


class UnsupportedTermError(BVLabError):
    """A transform result leaves the monomial-annulus term class.

    This happens only for the degenerate radial exponent e = 2p + gamma + 2 = 0,
    whose antiderivative is logarithmic.  None of the shell, lacunary or
    truncation constructions produce it (their exponents equal the positive
    angular order n), so the error marks genuinely unsupported inputs.
    """


class DivergentMomentError(BVLabError):
    """Radial moment integral diverges (unbounded support with e >= 0)."""


class UnresolvedScaleError(BVLabError):
    """A variance estimate was requested below the resolved frequency cutoff."""


class UnresolvedTruncationError(BVLabError):
    """Truncation tail mass exceeds the requested tolerance."""
