"""Randomized invariant suite behind ``embezzle selftest``.

Every check draws its instances from one seeded generator, so a given seed
always produces the same summary. Library functions are looked up through
their modules at call time; patching ``embezzle.protocol.omega_top_k`` (for
instance) is enough to see the suite catch a fault.
"""

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import protocol, schmidt
from .validation import check_probability_vector, check_schmidt_vector

DEFAULT_SEED = 20021107
TOL = 1e-12


class InvariantViolation(AssertionError):
    def __init__(self, name, detail):
        self.name = name
        super().__init__(f"{name}: {detail}")


def random_target(rng, m):
    """Schmidt vector with squared coefficients drawn from Dirichlet(1, ..., 1)."""
    p = np.sort(rng.dirichlet(np.ones(m)))[::-1]
    return np.sqrt(p / p.sum())


def _require(cond, name, detail):
    if not cond:
        raise InvariantViolation(name, detail)


def _average_down(rng, p, steps=3):
    # T-transforms: replace two entries by a convex mix; result is majorized by p
    q = np.array(p, dtype=np.float64)
    for _ in range(steps):
        if q.size < 2:
            break
        i, j = rng.choice(q.size, size=2, replace=False)
        t = rng.uniform()
        qi, qj = q[i], q[j]
        q[i], q[j] = t * qi + (1 - t) * qj, (1 - t) * qi + t * qj
    return np.sort(q)[::-1]


# --- schmidt-core --------------------------------------------------------


def check_normalization_closure(rng, count=1000):
    name = "normalization closure"
    for _ in range(count):
        a = random_target(rng, int(rng.integers(1, 17)))
        b = random_target(rng, int(rng.integers(1, 17)))
        try:
            check_schmidt_vector(schmidt.tensor_spectrum_full(a, b))
            check_schmidt_vector(schmidt.maximally_entangled(int(rng.integers(1, 17))))
            check_probability_vector(schmidt.spectrum(a))
            r, c = rng.integers(1, 7, size=2)
            mat = rng.normal(size=(r, c)) + 1j * rng.normal(size=(r, c))
            check_schmidt_vector(schmidt.schmidt_decompose(mat / np.linalg.norm(mat)))
        except ValueError as exc:
            raise InvariantViolation(name, str(exc)) from exc
    return count


def check_entropy_additivity(rng, count=200):
    name = "entropy additivity"
    for _ in range(count):
        a = random_target(rng, int(rng.integers(1, 17)))
        b = random_target(rng, int(rng.integers(1, 17)))
        lhs = schmidt.von_neumann_entropy(schmidt.tensor_spectrum_full(a, b))
        rhs = schmidt.von_neumann_entropy(a) + schmidt.von_neumann_entropy(b)
        _require(abs(lhs - rhs) <= 1e-9, name, f"S(a(x)b)={lhs!r} vs S(a)+S(b)={rhs!r}")
    return count


def check_rearrangement_maximality(rng, count=50, perms=100):
    name = "rearrangement maximality"
    for _ in range(count):
        m = int(rng.integers(2, 17))
        a, b = random_target(rng, m), random_target(rng, m)
        best = schmidt.overlap_fidelity(a, b)
        for _ in range(perms):
            other = float(np.dot(a, b[rng.permutation(m)]))
            _require(best >= other - TOL, name, f"sorted overlap {best!r} < permuted {other!r}")
    return count * perms


def check_majorization_order(rng, count=200):
    name = "majorization partial order"
    for _ in range(count):
        x = random_target(rng, int(rng.integers(1, 17))) ** 2
        _require(schmidt.majorizes(x, x), name, "not reflexive")
        y = _average_down(rng, x)
        z = _average_down(rng, y)
        _require(schmidt.majorizes(x, y) and schmidt.majorizes(y, z), name, "averaging moved up the order")
        _require(schmidt.majorizes(x, z), name, "not transitive")
    return count


def check_trumping_extends_majorization(rng, count=200):
    name = "trumping extends majorization"
    for _ in range(count):
        y = random_target(rng, int(rng.integers(1, 9))) ** 2
        x = _average_down(rng, y)
        c = random_target(rng, int(rng.integers(1, 5))) ** 2
        _require(schmidt.is_trumped(x, y, c), name, f"x={x}, y={y}, c={c}")
    return count


def check_decomposition_self_overlap(rng, count=200):
    name = "decomposition self-overlap"
    for _ in range(count):
        r, c = rng.integers(1, 7, size=2)
        mat = rng.normal(size=(r, c)) + 1j * rng.normal(size=(r, c))
        s = schmidt.schmidt_decompose(mat / np.linalg.norm(mat))
        f = schmidt.overlap_fidelity(s, s)
        _require(abs(f - 1.0) <= TOL, name, f"<s|s> = {f!r}")
    return count


# --- embezzlement --------------------------------------------------------


def check_protocol_instances(rng, targets=1000, ranks=(16, 256, 4096)):
    """Proof-step, majorization, fidelity-chain, closed-form and Fannes checks on random targets."""
    cases = 0
    for _ in range(targets):
        m = int(rng.integers(1, 17))
        phi = random_target(rng, m)
        entropy = schmidt.von_neumann_entropy(phi)
        for n in ranks:
            mu = protocol.build_embezzler(n)
            omega = protocol.omega_top_k(n, phi, n)
            tag = f"n={n}, m={m}"

            excess = float(np.max(omega - mu))
            _require(excess <= TOL, "proof-step omega_j <= mu_j", f"{tag}: max excess {excess:.3e}")

            full = schmidt.sorted_outer(mu, phi)
            psi = schmidt.sorted_outer(mu, np.full(m, 1.0 / math.sqrt(m)))
            _require(
                schmidt.majorizes(full**2, psi**2),
                "majorization omega > mu(x)Phi",
                f"{tag}: first violation at prefix {schmidt.first_violation(full**2, psi**2)}",
            )

            fid = protocol.protocol_fidelity(n, phi)
            sq = protocol.sum_omega_sq(n, phi)
            delta = protocol.protocol_delta(n, phi)
            _require(fid >= sq - TOL, "fidelity chain", f"{tag}: fidelity {fid!r} < sum omega^2 {sq!r}")
            eq4 = protocol.fidelity_lower_bound(n, m)
            _require(sq >= eq4 - TOL, "fidelity lower bound", f"{tag}: {sq!r} < {eq4!r}")
            eq6 = protocol.delta_upper_bound(n, m)
            _require(delta <= eq6 + TOL, "delta upper bound", f"{tag}: {delta!r} > {eq6!r}")
            _require(
                abs(delta - 2.0 * (1.0 - sq)) <= TOL,
                "delta identity",
                f"{tag}: delta {delta!r} vs 2(1 - sum omega^2) {2.0 * (1.0 - sq)!r}",
            )
            if delta < protocol.INV_E:
                floor = protocol.fannes_min_delta(min(entropy, math.log2(m)), m, n)
                _require(floor <= delta + TOL, "Fannes consistency", f"{tag}: floor {floor!r} > delta {delta!r}")
            cases += 1
    return cases


def check_streaming_equivalence(rng, count=200):
    name = "streaming/oracle equivalence"
    for _ in range(count):
        n = int(rng.integers(1, 501))
        m = int(rng.integers(1, 9))
        phi = random_target(rng, m)
        fast = protocol.omega_top_k(n, phi, n)
        slow = schmidt.sorted_outer(protocol.build_embezzler(n), phi)[:n]
        err = float(np.max(np.abs(fast - slow)))
        _require(err <= TOL, name, f"n={n}, m={m}: max deviation {err:.3e}")
    return count


def check_tie_break_independence(rng, count=50):
    name = "tie-break independence"
    for _ in range(count):
        m = int(rng.integers(2, 9))
        n = int(rng.integers(2, 300))
        phi = schmidt.maximally_entangled(m)
        mu = protocol.build_embezzler(n)
        fid = protocol.protocol_fidelity(n, phi)
        # unstable sort of the products gives a different order among equal values
        alt = np.sort(np.multiply.outer(mu, phi).ravel())[::-1][:n]
        other = float(np.dot(mu, alt))
        _require(abs(fid - other) <= TOL, name, f"n={n}, m={m}: {fid!r} vs {other!r}")
    return count


CHECKS = (
    ("normalization closure", check_normalization_closure),
    ("entropy additivity", check_entropy_additivity),
    ("rearrangement maximality", check_rearrangement_maximality),
    ("majorization partial order", check_majorization_order),
    ("trumping extends majorization", check_trumping_extends_majorization),
    ("decomposition self-overlap", check_decomposition_self_overlap),
    ("protocol instances", check_protocol_instances),
    ("streaming/oracle equivalence", check_streaming_equivalence),
    ("tie-break independence", check_tie_break_independence),
)


@dataclass
class SelftestResult:
    seed: int
    counts: dict = field(default_factory=dict)
    failures: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def ok(self):
        return not self.failures

    def summary_lines(self):
        lines = [f"selftest seed={self.seed}"]
        for name, count in self.counts.items():
            status = "FAIL" if name in self.failures else "ok"
            lines.append(f"  {status:4} {name}: {count} cases")
        for name, detail in self.failures.items():
            lines.append(f"  violated: {detail}")
        lines.append("PASS" if self.ok else f"FAIL ({len(self.failures)} invariant(s))")
        return lines


def run_selftest(seed=DEFAULT_SEED, checks=CHECKS):
    """Run every check with a generator seeded from ``seed``; collects failures instead of stopping."""
    result = SelftestResult(seed=seed)
    start = time.perf_counter()
    for idx, (label, check) in enumerate(checks):
        rng = np.random.default_rng([seed, idx])
        try:
            result.counts[label] = check(rng)
        except InvariantViolation as exc:
            result.counts[label] = 0
            result.failures[label] = str(exc)
    result.seconds = time.perf_counter() - start
    return result
