"""Shared document builders for the test suite."""

from __future__ import annotations

import pytest


def single_pair_document(strength: float = 0.1, n_steps: int = 1, bath_dim: int = 1) -> dict:
    """Two idle qubits with one xx coupling of the given strength."""
    return {
        "mode": "long_range",
        "n_qubits": 2,
        "bath_dim": bath_dim,
        "t0": 1.0,
        "steps": [
            [{"kind": "identity", "support": [0]}, {"kind": "identity", "support": [1]}]
        ]
        * n_steps,
        "bath_hamiltonian": None,
        "pair_terms": [
            {"i": 0, "j": 1, "preset": {"name": "xx", "strength": strength, "seed": 0}}
        ],
    }


def noiseless_document(n_qubits: int = 2, n_steps: int = 1) -> dict:
    return {
        "mode": "long_range",
        "n_qubits": n_qubits,
        "bath_dim": 1,
        "t0": 1.0,
        "steps": [
            [{"kind": "identity", "support": [q]} for q in range(n_qubits)]
        ]
        * n_steps,
        "bath_hamiltonian": None,
        "pair_terms": [],
    }


def busy_document(seed_base: int = 11) -> dict:
    """2 qubits + bath dim 2, nontrivial gates, bath, and couplings; 2 steps."""
    return {
        "mode": "long_range",
        "n_qubits": 2,
        "bath_dim": 2,
        "t0": 1.0,
        "steps": [
            [
                {"kind": "x", "support": [0], "params": {"strength": 0.8}},
                {"kind": "z", "support": [1], "params": {"strength": 0.4}},
            ],
            [{"kind": "zz", "support": [0, 1], "params": {"strength": 0.6}}],
        ],
        "bath_hamiltonian": {"seed": seed_base, "strength": 0.5},
        "pair_terms": [
            {"i": 0, "j": 1, "preset": {"name": "random", "strength": 0.05, "seed": seed_base + 1}}
        ],
    }


def short_range_document(strength: float = 0.1) -> dict:
    """Short-range mode: one location term on qubit 0 of step 0."""
    return {
        "mode": "short_range",
        "n_qubits": 2,
        "bath_dim": 1,
        "t0": 1.0,
        "steps": [
            [{"kind": "identity", "support": [0]}, {"kind": "identity", "support": [1]}]
        ],
        "bath_hamiltonian": None,
        "pair_terms": [],
        "short_range_terms": [
            {
                "step": 0,
                "support": [0],
                "matrix": [[0.0, 0.0], [strength, 0.0], [strength, 0.0], [0.0, 0.0]],
            }
        ],
    }


@pytest.fixture
def analytic_document() -> dict:
    return single_pair_document(strength=0.1)
