"""faultlab: numerical laboratory for fault-path noise bounds.

Builds small system-bath circuit models, measures exact fault-path sums
E(F) on a micro grid, and checks them against the closed-form locality,
same-step, concatenation, and lattice-decay bounds.
"""

__version__ = "0.1.0"

from .bounds import (
    CONTRACTION_CLOSURE_BASE,
    LOCALITY_PREFACTOR,
    contracted_family_bound,
    coupling_strength_limit,
    eta_prime,
    local_noise_strength,
    many_body_strength,
    same_step_bound,
)
from .errors import (
    DivergentSumError,
    FaultLabError,
    ModelValidationError,
    ModeMismatchError,
    ResourceLimitError,
)
from .faultpaths import (
    BoundReport,
    DeltaGrid,
    FaultSet,
    PhaseStats,
    evolve_with_mask,
    fault_sum,
    fault_sum_norm,
    micro_step,
    randomized_phase_norm,
    verify_bound,
)
from .lattice import LatticeSpec, LatticeSum, divergence_scan, interaction_strength, lattice_sum
from .model import (
    MacroLocation,
    SystemBathModel,
    chain_document,
    load_model,
    load_model_file,
    long_range_strength,
    random_long_range_document,
    save_model,
    save_model_file,
    scaled_model,
    short_range_strength,
)
from .operators import TensorFactorSpec, embed, expm, random_hermitian, sup_norm
from .threshold import (
    GADGET_PRESETS,
    GadgetParams,
    RecursionTrace,
    amplitude_budget,
    coupling_budget,
    coupling_budget_constant_free,
    level_strength,
    level_strength_closed,
    recursion_trace,
    threshold_strength,
)
