"""The universal embezzling family and the communication-free embezzlement protocol.

``mu(n)`` has Schmidt coefficients ``1/sqrt(j C(n))`` for ``j = 1..n``, where
``C(n)`` is the n-th harmonic number. To embezzle a target ``phi`` with
Schmidt coefficients ``alpha_1..alpha_m`` both parties apply the local
permutation that sorts the coefficients of ``mu(n) (x) phi``; the sorted vector
is ``omega(n)``. The protocol's output is ``mu(n)`` paired index-wise with the
top ``n`` entries of ``omega(n)``, which gives exact expressions for its
fidelity and reduced-state trace distance.

Logarithms are base 2 throughout; fidelities are unsquared overlaps and trace
distances are unnormalized (range [0, 2]).
"""

import math
from dataclasses import asdict, dataclass
from decimal import Decimal, localcontext
from functools import lru_cache

import numba
import numpy as np

from .schmidt import von_neumann_entropy
from .validation import (
    BoundUndefinedError,
    check_positive_int,
    check_schmidt_vector,
)

MAX_EMBEZZLER_RANK = 10**8
MAX_MERGE_POPS = 10**8
FANNES_BRACKET_LO = 1e-18
FANNES_XTOL = 1e-12
FANNES_MAXITER = 200
BOUND_TOL = 1e-12
INV_E = math.exp(-1.0)

_HARMONIC_CHUNK = 1 << 16


def harmonic_number(n):
    """``C(n) = sum_{j=1}^n 1/j``, accumulated smallest term first.

    Blocks of reciprocals are summed pairwise, and the block sums are combined
    with Neumaier compensation, so the result stays within a few ulps for
    ``n`` up to 1e8 and beyond.
    """
    n = check_positive_int(n, "n")
    total = 0.0
    comp = 0.0
    hi = n
    while hi >= 1:
        lo = max(1, hi - _HARMONIC_CHUNK + 1)
        part = float(np.sum(1.0 / np.arange(hi, lo - 1, -1, dtype=np.float64)))
        t = total + part
        if abs(total) >= abs(part):
            comp += (total - t) + part
        else:
            comp += (part - t) + total
        total = t
        hi = lo - 1
    return total + comp


@lru_cache(maxsize=4)
def build_embezzler(n):
    """Schmidt vector of ``mu(n)``: entries ``1/sqrt(j C(n))``, strictly decreasing."""
    n = check_positive_int(n, "n")
    if n > MAX_EMBEZZLER_RANK:
        raise MemoryError(f"mu({n}) exceeds the configured rank budget {MAX_EMBEZZLER_RANK}")
    log_c = math.log(harmonic_number(n))
    j = np.arange(1, n + 1, dtype=np.float64)
    mu = np.exp(-0.5 * (np.log(j) + log_c))
    mu.setflags(write=False)
    return mu


@numba.njit(cache=True, nogil=True)
def _merge_top_k(alphas, mu, k):
    # Max-heap over the m streams alphas[i] * mu[0], alphas[i] * mu[1], ...
    # Priority: larger value first, then smaller stream index.
    m = alphas.size
    n = mu.size
    hval = np.empty(m)
    hidx = np.empty(m, dtype=np.int64)
    pos = np.zeros(m, dtype=np.int64)
    for i in range(m):
        # alphas sorted non-increasing, so this array is already a valid heap
        hval[i] = alphas[i] * mu[0]
        hidx[i] = i
    size = m
    out = np.empty(k)
    for t in range(k):
        out[t] = hval[0]
        i = hidx[0]
        pos[i] += 1
        if pos[i] < n:
            v = alphas[i] * mu[pos[i]]
            s = i
        else:
            size -= 1
            v = hval[size]
            s = hidx[size]
        # sift (v, s) down from the root
        p = 0
        while True:
            c = 2 * p + 1
            if c >= size:
                break
            r = c + 1
            if r < size and (hval[r] > hval[c] or (hval[r] == hval[c] and hidx[r] < hidx[c])):
                c = r
            if hval[c] > v or (hval[c] == v and hidx[c] < s):
                hval[p] = hval[c]
                hidx[p] = hidx[c]
                p = c
            else:
                break
        if size > 0:
            hval[p] = v
            hidx[p] = s
    return out


def omega_top_k(n, phi, k):
    """The ``k`` largest Schmidt coefficients of ``mu(n) (x) phi``, non-increasing.

    Runs an m-way merge over the already-sorted streams
    ``alpha_i / sqrt(j C(n))``, so the ``n * m`` products are never
    materialized. The result is a prefix, not a normalized vector.

    Parameters
    ----------
    n : int
        Rank of the embezzling state.
    phi : array_like
        Schmidt vector of the target state.
    k : int
        Number of leading coefficients, at most ``n * len(phi)``.
    """
    n = check_positive_int(n, "n")
    k = check_positive_int(k, "k")
    alphas = check_schmidt_vector(phi)
    if k > n * alphas.size:
        raise ValueError(f"k={k} exceeds the number of coefficients n*m={n * alphas.size}")
    if k > MAX_MERGE_POPS:
        raise MemoryError(f"k={k} exceeds the merge budget {MAX_MERGE_POPS}")
    out = _merge_top_k(np.ascontiguousarray(alphas), build_embezzler(n), k)
    out.setflags(write=False)
    return out


def _aligned(n, phi):
    mu = build_embezzler(n)
    return mu, omega_top_k(n, phi, n)


def protocol_fidelity(n, phi):
    """Exact fidelity ``|<mu(n)|omega(n)>| = sum_{j<=n} mu_j omega_j`` of the protocol."""
    alphas = check_schmidt_vector(phi)
    if alphas.size == 1:
        return 1.0
    mu, omega = _aligned(n, alphas)
    return float(np.dot(mu, omega))


def sum_omega_sq(n, phi):
    """``sum_{j<=n} omega_j**2``, the weight of omega(n) on the first n Schmidt vectors."""
    alphas = check_schmidt_vector(phi)
    if alphas.size == 1:
        return 1.0
    _, omega = _aligned(n, alphas)
    return float(np.dot(omega, omega))


def _delta_two_sums(mu, omega):
    head = float(np.sum(mu * mu - omega * omega))
    tail = 1.0 - float(np.dot(omega, omega))
    return head + tail


def protocol_delta(n, phi):
    """Trace distance ``Tr|omega(n)_A - mu(n)_A|`` between the reduced states.

    Evaluated as ``sum_{j<=n}(mu_j^2 - omega_j^2) + sum_{j>n} omega_j^2`` with
    the tail obtained from normalization, so only the top-n merge is needed.
    """
    alphas = check_schmidt_vector(phi)
    if alphas.size == 1:
        return 0.0
    mu, omega = _aligned(n, alphas)
    return _delta_two_sums(mu, omega)


def _log_ratio(n, m):
    n = check_positive_int(n, "n")
    m = check_positive_int(m, "m")
    if m == 1:
        return 0.0
    if n < 2:
        raise BoundUndefinedError("bounds undefined for n<2 (log n = 0)")
    return math.log2(m) / math.log2(n)


def fidelity_lower_bound(n, m):
    """Closed-form fidelity guarantee ``max(0, 1 - log m / log n)``."""
    return max(0.0, 1.0 - _log_ratio(n, m))


def delta_upper_bound(n, m):
    """Closed-form error bound ``2 log m / log n``."""
    return 2.0 * _log_ratio(n, m)


def min_rank_for(epsilon, m):
    """Smallest integer ``n`` with ``n > m**(1/epsilon)``.

    Returned as an exact Python ``int``: integral exponents use integer
    powers, other exponents use decimal arithmetic at sufficient precision.
    """
    epsilon = _check_epsilon(epsilon)
    m = check_positive_int(m, "m")
    if m == 1:
        return 1
    p = 1.0 / epsilon
    p_int = round(p)
    if abs(p - p_int) <= 1e-12 * p:
        return m**p_int + 1
    bits = p * math.log2(m)
    if bits > 1e6:
        raise OverflowError(f"m**(1/epsilon) has about {bits:.3g} bits; use min_qubit_pairs")
    with localcontext() as ctx:
        ctx.prec = int(bits * 0.30103) + 30
        threshold = (Decimal(m).ln() / Decimal(repr(epsilon))).exp()
        return int(threshold.to_integral_value(rounding="ROUND_FLOOR")) + 1


def min_qubit_pairs(epsilon, m):
    """Size of the sufficient catalyst in qubit pairs, ``ceil(log2(m) / epsilon)``."""
    epsilon = _check_epsilon(epsilon)
    m = check_positive_int(m, "m")
    return math.ceil(math.log2(m) / epsilon) if m > 1 else 0


def _check_epsilon(epsilon):
    epsilon = float(epsilon)
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    return epsilon


def eta(delta):
    """``-delta log2 delta`` with ``eta(0) = 0``."""
    delta = float(delta)
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta must lie in [0, 1], got {delta}")
    if delta == 0.0:
        return 0.0
    return -delta * math.log2(delta)


def fannes_min_delta(target_entropy_bits, m, n, full_output=False):
    """Smallest trace distance any LOCC embezzler with a rank-``n`` catalyst can reach.

    Solves ``delta (log2 m + log2 n) + eta(delta) = S`` for ``delta`` in
    ``(0, 1/e]`` by bisection; the left side is strictly increasing there.
    When the root would lie beyond ``1/e`` the result is clamped to ``1/e``.

    Parameters
    ----------
    target_entropy_bits : float
        Entanglement entropy ``S`` of the target, at most ``log2 m``.
    m, n : int
        Schmidt ranks of the target and of the catalyst.
    full_output : bool
        Also return whether the clamp at ``1/e`` was applied.

    Returns
    -------
    delta : float
    saturated : bool
        Only when ``full_output`` is true.
    """
    m = check_positive_int(m, "m")
    n = check_positive_int(n, "n")
    s = float(target_entropy_bits)
    if s < 0:
        raise ValueError("target entropy must be non-negative")
    if s > math.log2(m) + 1e-12:
        raise ValueError(f"target entropy {s} exceeds log2(m) = {math.log2(m)}")
    log_mn = math.log2(m) + math.log2(n)
    if log_mn <= 0:
        raise BoundUndefinedError("Fannes floor needs m >= 2 or n >= 2")

    def lhs(d):
        return d * log_mn + eta(d)

    if s == 0.0:
        result = (0.0, False)
    elif lhs(INV_E) < s:
        result = (INV_E, True)
    else:
        lo, hi = FANNES_BRACKET_LO, INV_E
        if lhs(lo) >= s:
            hi = lo
        for _ in range(FANNES_MAXITER):
            if hi - lo <= FANNES_XTOL:
                break
            mid = 0.5 * (lo + hi)
            if lhs(mid) < s:
                lo = mid
            else:
                hi = mid
        result = (0.5 * (lo + hi), False)
    return result if full_output else result[0]


@dataclass(frozen=True)
class BoundReport:
    """Every quantity computed for one ``(n, phi)`` instance.

    ``fidelity``, ``sum_omega_sq``, ``delta`` and ``epsilon_implied`` are
    ``None`` for bound-only reports (``n`` too large for the exact merge).
    """

    n: int
    m: int
    fidelity: float | None
    eq4_bound: float
    sum_omega_sq: float | None
    delta: float | None
    eq6_bound: float
    fannes_floor: float
    target_entropy_bits: float
    epsilon_implied: float | None
    fannes_saturated: bool = False

    @property
    def exact(self):
        return self.fidelity is not None

    @property
    def fannes_ratio(self):
        """``delta / fannes_floor``; how far the protocol sits above the optimum floor."""
        if not self.exact or self.fannes_floor == 0.0:
            return None
        return self.delta / self.fannes_floor

    def violations(self, tol=BOUND_TOL):
        """Names of the report invariants that fail."""
        failed = []
        if self.exact:
            if self.fidelity < self.sum_omega_sq - tol:
                failed.append("fidelity >= sum_omega_sq")
            if self.sum_omega_sq < self.eq4_bound - tol:
                failed.append("sum_omega_sq >= eq4_bound")
            if self.delta > self.eq6_bound + tol:
                failed.append("delta <= eq6_bound")
            if self.delta < INV_E and self.fannes_floor > self.delta + tol:
                failed.append("fannes_floor <= delta")
        return failed

    def to_dict(self):
        return asdict(self)


def bound_report(n, phi, *, bounds_only=False):
    """Assemble a :class:`BoundReport` for embezzling ``phi`` out of ``mu(n)``."""
    n = check_positive_int(n, "n")
    if n < 2:
        raise BoundUndefinedError("bounds undefined for n<2 (log n = 0)")
    alphas = check_schmidt_vector(phi)
    m = alphas.size
    entropy = von_neumann_entropy(alphas)
    floor, saturated = fannes_min_delta(min(entropy, math.log2(m)), m, n, full_output=True)
    fidelity = sq = delta = None
    if not bounds_only:
        if m == 1:
            fidelity, sq, delta = 1.0, 1.0, 0.0
        else:
            mu, omega = _aligned(n, alphas)
            fidelity = float(np.dot(mu, omega))
            sq = float(np.dot(omega, omega))
            delta = _delta_two_sums(mu, omega)
    return BoundReport(
        n=n,
        m=m,
        fidelity=fidelity,
        eq4_bound=fidelity_lower_bound(n, m),
        sum_omega_sq=sq,
        delta=delta,
        eq6_bound=delta_upper_bound(n, m),
        fannes_floor=floor,
        target_entropy_bits=entropy,
        epsilon_implied=None if fidelity is None else 1.0 - fidelity,
        fannes_saturated=saturated,
    )
