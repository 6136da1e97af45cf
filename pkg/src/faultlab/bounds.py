"""Closed-form norm bounds for same-step fault families of pair couplings.

For r = 2n faults struck in a single working period, the fault paths are
grouped by how many disjoint qubit pairs are first hit by a shared coupling
("contractions"). The family with k contractions is bounded by

    S_k <= (1 / (2^k k!)) (2 n eta)^k eta^(2n - 2k)

and the sum over k closes to (eta')^r with eta' = e^(1 + 1/2e) sqrt(eta).
For two-qubit gate locations eta is doubled, because a location is faulty
as soon as either of its qubits is struck. All constants are evaluated from
their closed forms at full float precision, never from decimal literals.
"""

from __future__ import annotations

import math

# sqrt prefactor of the effective single-step locality strength
LOCALITY_PREFACTOR = math.exp(1.0 + 1.0 / (2.0 * math.e))
# base of the closed contraction sum; equals LOCALITY_PREFACTOR**2
CONTRACTION_CLOSURE_BASE = math.exp(2.0 + 1.0 / math.e)


def _validate_nk(n: int, k: int) -> None:
    if not (isinstance(n, int) and isinstance(k, int)):
        raise ValueError("n and k must be integers")
    if n < 0 or k < 0 or k > n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")


def _validate_eta(eta: float) -> float:
    eta = float(eta)
    if not eta >= 0.0:
        raise ValueError(f"eta must be nonnegative, got {eta}")
    return eta


def contracted_family_bound(n: int, k: int, eta: float) -> float:
    """Tight bound on the norm of the k-contraction family, r = 2n faults."""
    _validate_nk(n, k)
    eta = _validate_eta(eta)
    if k == 0:
        return eta ** (2 * n)
    return (2.0 * n * eta) ** k / (2.0**k * math.factorial(k)) * eta ** (2 * n - 2 * k)


def contracted_family_bound_loose(n: int, k: int, eta: float) -> float:
    """Looser form e^k (n/k)^k eta^(2n-k), via k! >= (k/e)^k."""
    _validate_nk(n, k)
    eta = _validate_eta(eta)
    if k == 0:
        return eta ** (2 * n)
    return math.e**k * (n / k) ** k * eta ** (2 * n - k)


def eta_prime(eta: float) -> float:
    """Effective single-step locality strength e^(1 + 1/2e) sqrt(eta)."""
    return LOCALITY_PREFACTOR * math.sqrt(_validate_eta(eta))


def same_step_intermediate_bound(n: int, eta: float) -> float:
    """(n+1) e^n e^(n/e) eta^n, the pre-closure form of the contraction sum."""
    if not isinstance(n, int) or n < 0:
        raise ValueError(f"n must be a nonnegative integer, got {n}")
    eta = _validate_eta(eta)
    return (n + 1) * math.exp(n) * math.exp(n / math.e) * eta**n


def same_step_bound(r: int, eta: float) -> float:
    """(eta')^r bound for r faults sharing one working period (any parity r)."""
    if not isinstance(r, int) or r < 0:
        raise ValueError(f"r must be a nonnegative integer, got {r}")
    eta = _validate_eta(eta)
    closed = eta_prime(eta) ** r
    if r % 2 == 0 and eta > 0:
        # the closure (n+1) <= e^n makes the intermediate form never exceed it
        n = r // 2
        intermediate = same_step_intermediate_bound(n, eta)
        if intermediate > closed * (1.0 + 1e-12):
            raise AssertionError(
                f"intermediate bound {intermediate} exceeds closed form {closed}"
            )
    return closed


def local_noise_strength(eta: float, gate_arity: int = 2) -> float:
    """Locality strength induced by coupling strength eta.

    Single-qubit circuits: e^(1 + 1/2e) sqrt(eta). Circuits with two-qubit
    gates: same with eta doubled, the general-purpose value.
    """
    eta = _validate_eta(eta)
    if gate_arity == 1:
        return LOCALITY_PREFACTOR * math.sqrt(eta)
    if gate_arity == 2:
        return LOCALITY_PREFACTOR * math.sqrt(2.0 * eta)
    raise ValueError(f"gate_arity must be 1 or 2, got {gate_arity}")


def coupling_strength_limit(epsilon: float, gate_arity: int = 2) -> float:
    """Inverse of local_noise_strength: the eta that induces this epsilon."""
    epsilon = float(epsilon)
    if not epsilon >= 0.0:
        raise ValueError(f"epsilon must be nonnegative, got {epsilon}")
    if gate_arity not in (1, 2):
        raise ValueError(f"gate_arity must be 1 or 2, got {gate_arity}")
    eta = (epsilon / LOCALITY_PREFACTOR) ** 2
    return eta / 2.0 if gate_arity == 2 else eta


def many_body_strength(terms: dict, p: int, t0: float = 1.0) -> float:
    """Max over indices of the summed p-body coupling norms, times t0.

    `terms` maps index tuples of size p to coupling norms. The induced
    locality exponent is 1/p; no constant is claimed for p > 2.
    """
    if not isinstance(p, int) or p < 2:
        raise ValueError(f"p must be an integer >= 2, got {p}")
    if t0 <= 0:
        raise ValueError(f"t0 must be positive, got {t0}")
    row_sums: dict[int, float] = {}
    for key, norm in terms.items():
        key = tuple(key)
        if len(key) != p:
            raise ValueError(f"term key {key} has {len(key)} indices, expected {p}")
        if len(set(key)) != len(key):
            raise ValueError(f"term key {key} has repeated indices")
        norm = float(norm)
        if norm < 0:
            raise ValueError(f"term norm must be nonnegative, got {norm}")
        for index in key:
            row_sums[index] = row_sums.get(index, 0.0) + norm
    if not row_sums:
        return 0.0
    return max(row_sums.values()) * t0
