"""Central numerical tolerances.

Every tolerance used by the package lives in this one record so that the
acceptance checks and the library agree on the same numbers.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    hermiticity: float = 1e-12      # max |A - A^dagger| entry accepted as hermitian
    unitarity: float = 1e-10        # sup_norm(U^dagger U - I) accepted as unitary
    roundtrip: float = 1e-15        # document save/load entrywise agreement
    grid_convergence: float = 1e-6  # stop refining the micro grid below this change
    margin_zero: float = 1e-12      # measured norms below this count as exactly zero


TOLERANCES = Tolerances()
