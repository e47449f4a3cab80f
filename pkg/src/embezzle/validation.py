"""Input validation helpers for Schmidt vectors, spectra and amplitude matrices.

All helpers return fresh read-only float64 arrays; callers may rely on the
returned value satisfying the documented invariants.
"""

import numbers

import numpy as np

NORM_TOL = 1e-9
SELF_TOL = 1e-12


class NormalizationError(ValueError):
    """Raised when an input state is not normalized within tolerance."""

    def __init__(self, deviation, tol, what="state"):
        self.deviation = float(deviation)
        self.tol = float(tol)
        super().__init__(
            f"{what} is not normalized: deviation {self.deviation:.3e} exceeds tolerance {self.tol:.1e}"
        )


class SizeGuardError(ValueError):
    """Raised when a full tensor-product spectrum would be too large to materialize."""


class BoundUndefinedError(ValueError):
    """Raised when a closed-form bound involving log(n) is requested for n < 2."""


def _frozen(a):
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


def check_positive_int(value, name, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def _as_1d(values, name):
    a = np.asarray(values, dtype=np.float64)
    if a.ndim == 0:
        a = a.reshape(1)
    if a.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {a.shape}")
    if a.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def _strip_zeros(a):
    nz = np.flatnonzero(a)
    if nz.size == 0:
        raise ValueError("state has no nonzero coefficient")
    return a[: nz[-1] + 1]


def check_schmidt_vector(coeffs, *, tol=NORM_TOL, sort=False):
    """Validate Schmidt coefficients and return them as a read-only array.

    Parameters
    ----------
    coeffs : array_like
        Non-negative amplitudes.
    tol : float
        Allowed deviation of the sum of squares from one.
    sort : bool
        Sort into non-increasing order instead of rejecting unsorted input.
    """
    a = _as_1d(coeffs, "Schmidt vector")
    if np.any(a < 0):
        raise ValueError("Schmidt coefficients must be non-negative")
    if sort:
        a = np.sort(a)[::-1]
    elif np.any(np.diff(a) > 0):
        raise ValueError("Schmidt coefficients must be non-increasing")
    dev = abs(float(np.dot(a, a)) - 1.0)
    if dev > tol:
        raise NormalizationError(dev, tol, "Schmidt vector")
    return _frozen(_strip_zeros(a))


def check_probability_vector(probs, *, tol=NORM_TOL, sort=False):
    """Validate a reduced-state spectrum (probabilities, non-increasing, unit sum)."""
    a = _as_1d(probs, "probability vector")
    if np.any(a < 0):
        raise ValueError("probabilities must be non-negative")
    if sort:
        a = np.sort(a)[::-1]
    elif np.any(np.diff(a) > 0):
        raise ValueError("probabilities must be non-increasing")
    dev = abs(float(a.sum()) - 1.0)
    if dev > tol:
        raise NormalizationError(dev, tol, "probability vector")
    return _frozen(_strip_zeros(a))


def check_amplitude_matrix(entries, *, tol=NORM_TOL):
    """Validate a 2-D (possibly complex) amplitude matrix of a bipartite pure state."""
    a = np.asarray(entries)
    if a.ndim != 2:
        raise ValueError(f"amplitude matrix must be two-dimensional, got shape {a.shape}")
    if a.size == 0:
        raise ValueError("amplitude matrix has dimension 0")
    a = a.astype(np.complex128 if np.iscomplexobj(a) else np.float64)
    if not np.all(np.isfinite(a)):
        raise ValueError("amplitude matrix contains non-finite entries")
    dev = abs(float(np.sum(np.abs(a) ** 2)) - 1.0)
    if dev > tol:
        raise NormalizationError(dev, tol, "amplitude matrix")
    return a
