"""Bipartite pure states in Schmidt form.

A state sum_j lambda_j |j>_A |j>_B is represented by its Schmidt vector: a
read-only float64 array of non-negative, non-increasing amplitudes with unit
sum of squares. The reduced state of either party is diagonal in the Schmidt
basis with spectrum lambda_j**2, so every comparison below is index-aligned.
"""

import numpy as np

from .validation import (
    SizeGuardError,
    check_amplitude_matrix,
    check_positive_int,
    check_schmidt_vector,
)

MAX_PRODUCT_SIZE = 10**8
MAJORIZATION_TOL = 1e-12


def _frozen(a):
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


def _padded(x, y):
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    size = max(x.size, y.size)
    return np.pad(x, (0, size - x.size)), np.pad(y, (0, size - y.size))


def schmidt_decompose(amplitudes):
    """Schmidt coefficients of a bipartite pure state given its amplitude matrix.

    Parameters
    ----------
    amplitudes : array_like, shape (d_A, d_B)
        Real or complex amplitudes, ``psi = sum_ab M[a, b] |a>|b>``.

    Returns
    -------
    numpy.ndarray
        Singular values of ``M`` in non-increasing order. Values below the
        numerical-rank cutoff ``max(d_A, d_B) * eps * s_max`` are dropped.
    """
    a = check_amplitude_matrix(amplitudes)
    s = np.linalg.svd(a, compute_uv=False)
    cutoff = max(a.shape) * np.finfo(np.float64).eps * s[0]
    return _frozen(s[s > cutoff])


def maximally_entangled(m):
    """Schmidt vector of the rank-``m`` maximally entangled state."""
    m = check_positive_int(m, "m")
    return _frozen(np.full(m, 1.0 / np.sqrt(m)))


def spectrum(coeffs):
    """Reduced-state eigenvalues (squared Schmidt coefficients)."""
    c = np.asarray(coeffs, dtype=np.float64)
    return _frozen(c * c)


def sorted_outer(a, b, max_size=MAX_PRODUCT_SIZE):
    """All products ``a[i] * b[j]`` in non-increasing order.

    Ties keep row-major ``(i, j)`` order, so the output is deterministic.
    Works for amplitudes and probabilities alike.
    """
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    size = a.size * b.size
    if size > max_size:
        raise SizeGuardError(
            f"product spectrum has {size} entries (limit {max_size}); use omega_top_k instead"
        )
    flat = np.multiply.outer(a, b).ravel()
    order = np.argsort(-flat, kind="stable")
    return _frozen(flat[order])


def tensor_spectrum_full(a, b, max_size=MAX_PRODUCT_SIZE):
    """Schmidt vector of ``|a> (x) |b>``: every pairwise product, sorted."""
    a = check_schmidt_vector(a)
    b = check_schmidt_vector(b)
    return sorted_outer(a, b, max_size=max_size)


def overlap_fidelity(a, b):
    """``|<a|b>|`` for two states written in a common Schmidt basis.

    The shorter vector is zero-padded. For sorted inputs this is the largest
    overlap reachable by permuting either basis locally.
    """
    x, y = _padded(a, b)
    return float(np.dot(x, y))


def von_neumann_entropy(x, *, amplitudes=True):
    """Entropy in bits of the reduced state.

    ``x`` holds Schmidt coefficients by default; pass ``amplitudes=False`` to
    give the eigenvalues directly. ``0 log 0`` is taken as 0.
    """
    p = np.asarray(x, dtype=np.float64).ravel()
    if amplitudes:
        p = p * p
    p = p[p > 0]
    return float(max(0.0, -np.dot(p, np.log2(p))))


def reduced_trace_distance(p, q):
    """Unnormalized trace norm ``sum_j |p_j - q_j|`` of two commuting spectra.

    The range is [0, 2]; no factor 1/2 is applied.
    """
    x, y = _padded(p, q)
    return float(np.sum(np.abs(x - y)))


def _prefix_gaps(x, y):
    xs, ys = _padded(x, y)
    # extended precision keeps long prefix sums well inside MAJORIZATION_TOL
    cx = np.cumsum(xs.astype(np.longdouble))
    cy = np.cumsum(ys.astype(np.longdouble))
    return cx - cy


def first_violation(x, y, tol=MAJORIZATION_TOL):
    """1-based length of the first prefix where ``x`` fails to dominate ``y``.

    Returns ``None`` when ``x`` majorizes ``y``.
    """
    bad = np.flatnonzero(_prefix_gaps(x, y) < -tol)
    return int(bad[0]) + 1 if bad.size else None


def majorizes(x, y, tol=MAJORIZATION_TOL):
    """True iff ``x`` majorizes ``y`` (both sorted non-increasing probability vectors)."""
    return first_violation(x, y, tol) is None


def is_trumped(x, y, c, max_size=MAX_PRODUCT_SIZE):
    """True iff catalyst ``c`` makes ``x -> y`` possible, i.e. ``x(x)c`` is majorized by ``y(x)c``.

    All three arguments are probability vectors (reduced-state spectra).
    """
    xc = sorted_outer(x, c, max_size=max_size)
    yc = sorted_outer(y, c, max_size=max_size)
    return majorizes(yc, xc)
