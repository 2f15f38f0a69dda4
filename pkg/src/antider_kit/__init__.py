"""Verification toolkit for split-coefficient localization kernels, trace-based
antiderivatives on toy covers, and contour/residue integrality checks."""

__version__ = "0.1.0"

from .exactkernel import DomainError, binom, split_coefficients  # noqa: E402

__all__ = ["DomainError", "__version__", "binom", "split_coefficients"]
