"""Dense operator algebra on the joint system-bath Hilbert space.

Operators are plain complex numpy arrays. The tensor ordering convention is
fixed here once and used everywhere: qubit 0 is the slowest (leftmost)
factor, qubits follow in increasing order, and the bath is always the last
factor. Every embedding goes through `embed`, which implements that
convention; nothing else reorders factors.

All operations are pure functions on immutable inputs and are safe to call
concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import TOLERANCES

# An operator is just a square complex ndarray; the alias documents intent.
Operator = np.ndarray

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class TensorFactorSpec:
    """Factorization of the joint space: n qubits followed by one bath factor."""

    n_qubits: int
    bath_dim: int = 1

    def __post_init__(self):
        if self.n_qubits < 0:
            raise ValueError(f"n_qubits must be nonnegative, got {self.n_qubits}")
        if self.bath_dim < 1:
            raise ValueError(f"bath_dim must be positive, got {self.bath_dim}")

    @property
    def dims(self) -> tuple[int, ...]:
        return (2,) * self.n_qubits + (self.bath_dim,)

    @property
    def bath_index(self) -> int:
        return self.n_qubits

    @property
    def total_dim(self) -> int:
        return 2**self.n_qubits * self.bath_dim


def as_operator(entries) -> Operator:
    """Validate and return a square complex matrix with finite entries."""
    a = np.asarray(entries, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"operator must be a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("operator entries must be finite")
    return a


def identity(dim: int) -> Operator:
    return np.eye(dim, dtype=complex)


def dagger(op: Operator) -> Operator:
    return np.asarray(op).conj().T


def sup_norm(op) -> float:
    """Largest singular value of the operator (the sup operator norm)."""
    a = as_operator(op)
    return float(np.linalg.svd(a, compute_uv=False)[0])


def hermiticity_defect(op) -> float:
    a = np.asarray(op, dtype=complex)
    return float(np.max(np.abs(a - a.conj().T)))


def unitarity_defect(op) -> float:
    a = as_operator(op)
    return sup_norm(dagger(a) @ a - identity(a.shape[0]))


def is_hermitian(op, tol: float | None = None) -> bool:
    tol = TOLERANCES.hermiticity if tol is None else tol
    return hermiticity_defect(op) <= tol


def is_unitary(op, tol: float | None = None) -> bool:
    tol = TOLERANCES.unitarity if tol is None else tol
    return unitarity_defect(op) <= tol


def require_hermitian(op, tol: float | None = None, what: str = "operator") -> Operator:
    a = as_operator(op)
    tol = TOLERANCES.hermiticity if tol is None else tol
    defect = hermiticity_defect(a)
    if defect > tol:
        raise ValueError(f"{what} is not hermitian: defect {defect:.3e} exceeds {tol:.1e}")
    return a


def expm(h, scale: float = 1.0) -> Operator:
    """Unitary exp(-1j * scale * h) of a hermitian generator.

    Computed by eigendecomposition so the result is unitary to roundoff,
    which matters when bound margins are small. scale = 0 returns the
    identity exactly.
    """
    a = require_hermitian(h, what="exponential generator")
    if scale == 0:
        return identity(a.shape[0])
    hs = (a + a.conj().T) / 2  # kill the sub-tolerance asymmetry before eigh
    w, v = np.linalg.eigh(hs)
    return (v * np.exp(-1j * scale * w)) @ v.conj().T


def embed(local, support, spec: TensorFactorSpec) -> Operator:
    """Embed a local operator into the full space, identity elsewhere.

    `support` lists subsystem indices (qubits 0..n-1, bath = spec.bath_index)
    in the order of the local operator's tensor factors. The embedding is
    isometric for the sup norm and disjoint-support embeddings commute.
    """
    a = as_operator(local)
    dims = spec.dims
    support = tuple(int(s) for s in support)
    if len(set(support)) != len(support):
        raise ValueError(f"support indices must be distinct, got {support}")
    for s in support:
        if not 0 <= s < len(dims):
            raise ValueError(f"support index {s} out of range for {len(dims)} subsystems")
    sup_dims = [dims[s] for s in support]
    d_local = math.prod(sup_dims)
    if a.shape[0] != d_local:
        raise ValueError(
            f"local operator dim {a.shape[0]} does not match support dims {sup_dims}"
        )
    rest = [i for i in range(len(dims)) if i not in support]
    rest_dims = [dims[i] for i in rest]
    full = np.kron(a, identity(math.prod(rest_dims)))
    # full acts on factors ordered support + rest; permute axes to canonical order
    order = list(support) + rest
    k = len(dims)
    cur_dims = sup_dims + rest_dims
    tensor = full.reshape(cur_dims + cur_dims)
    perm = [order.index(p) for p in range(k)]
    tensor = np.transpose(tensor, perm + [k + p for p in perm])
    return np.ascontiguousarray(tensor.reshape(spec.total_dim, spec.total_dim))


def random_hermitian(dim: int, seed: int, norm: float = 1.0) -> Operator:
    """Seeded random hermitian matrix rescaled to the requested sup norm."""
    if dim < 1:
        raise ValueError(f"dim must be positive, got {dim}")
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h = (a + a.conj().T) / 2
    current = sup_norm(h)
    if norm == 0.0 or current == 0.0:
        return np.zeros((dim, dim), dtype=complex)
    return h * (norm / current)
