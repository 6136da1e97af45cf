"""Acceptance suite: one test per exit criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines. Every expected value is either computed by an independent in-test
oracle (quadrature, Decimal series, exhaustive enumeration, analytic
eigenvalues) or is an exact closed form.
"""

import itertools
import json
import math
import time
from decimal import Decimal, getcontext

import numpy as np
import pytest

import faultlab
from faultlab import (
    DeltaGrid,
    FaultSet,
    LatticeSpec,
    divergence_scan,
    evolve_with_mask,
    fault_sum_norm,
    lattice_sum,
    load_model,
    randomized_phase_norm,
    verify_bound,
)
from faultlab.bounds import (
    CONTRACTION_CLOSURE_BASE,
    LOCALITY_PREFACTOR,
    contracted_family_bound,
    local_noise_strength,
    same_step_bound,
)
from faultlab.cli import main
from faultlab.model import random_long_range_document
from faultlab.operators import expm, sup_norm
from faultlab.service import handlers
from faultlab.service.schemas import VerifyBoundsRequest
from faultlab.threshold import (
    coupling_budget,
    coupling_budget_constant_free,
    level_strength,
    level_strength_closed,
    preset,
    threshold_strength,
)

from conftest import busy_document, noiseless_document, single_pair_document


def report(criterion: int, detail: str) -> None:
    print(f"[acceptance] criterion {criterion:2d}: PASS - {detail}")


def test_criterion_1_single_fault_oracle_vs_analytic():
    started = time.monotonic()
    request = VerifyBoundsRequest(
        document=single_pair_document(strength=0.1),
        fault_sets=[[{"step": 0, "support": [0]}]],
    )
    response = handlers.run_verify_bounds(request)
    elapsed = time.monotonic() - started
    rep = response.reports[0]
    target = 2 * math.sin(0.05)
    assert rep.measured == pytest.approx(target, abs=1e-5)
    assert rep.parameters["eta"] == pytest.approx(0.1, rel=1e-12)
    assert rep.margin <= 1.0
    assert elapsed < 1.0
    report(1, f"measured {rep.measured:.7f} vs 2*sin(0.05) = {target:.7f}, "
              f"margin {rep.margin:.6f}, {elapsed * 1e3:.0f} ms")


def test_criterion_2_locality_bound_sweep():
    started = time.monotonic()
    grid = DeltaGrid()
    checked = 0
    worst = 0.0
    for seed in range(20):
        document = random_long_range_document(
            seed=seed,
            n_qubits=3,
            bath_dim=2,
            n_steps=2,
            eta_target=0.05,
            include_two_qubit_gate=(seed % 2 == 1),
        )
        model = load_model(document)
        assert faultlab.long_range_strength(model) <= 0.05 * (1 + 1e-9)
        locations = model.locations()
        for r in (1, 2, 3):
            for subset in itertools.combinations(locations, r):
                rep = verify_bound(model, FaultSet(subset), grid)
                assert rep.margin <= 1.0, (seed, subset, rep)
                worst = max(worst, rep.margin)
                checked += 1
    elapsed = time.monotonic() - started
    assert elapsed < 120.0
    report(2, f"{checked} fault sets over 20 seeded models, zero violations, "
              f"worst margin {worst:.4f}, {elapsed:.1f} s")


def test_criterion_3_inclusion_exclusion_completeness():
    document = single_pair_document(strength=0.3, n_steps=2, bath_dim=2)
    document["bath_hamiltonian"] = {"seed": 5, "strength": 0.6}
    document["steps"][0] = [
        {"kind": "x", "support": [0], "params": {"strength": 0.5}},
        {"kind": "identity", "support": [1]},
    ]
    model = load_model(document)
    locations = model.locations()
    assert len(locations) == 4
    m = 16
    masked = {
        subset: evolve_with_mask(model, subset, m=m)
        for size in range(5)
        for subset in itertools.combinations(locations, size)
    }
    full = frozenset(locations)
    total = np.zeros((model.dim, model.dim), dtype=complex)
    for size in range(5):
        for t in itertools.combinations(locations, size):
            for w_size in range(size + 1):
                for w in itertools.combinations(t, w_size):
                    key = tuple(sorted(full - frozenset(w), key=lambda l: (l.step, l.support)))
                    total = total + (-1) ** (size - w_size) * masked[key]
    residual = sup_norm(total - masked[()])
    assert residual <= 1e-10
    report(3, f"16 exact-fault subsets re-sum to the noisy propagator, "
              f"residual {residual:.2e}")


def test_criterion_4_trotter_first_order():
    from faultlab.model import h_bath_full, h_system_full, pair_term_full
    from faultlab.faultpaths import micro_step

    model = load_model(busy_document())
    h_total = h_system_full(model, 0) + h_bath_full(model)
    for term in model.pair_terms:
        h_total = h_total + pair_term_full(model, term)
    u_exact = expm(h_total, model.t0)
    grids = (64, 128, 256, 512, 1024)
    errors = []
    for m in grids:
        u = np.linalg.matrix_power(micro_step(model, 0, m=m), m)
        errors.append(sup_norm(u - u_exact))
    slope = float(np.polyfit(np.log([model.t0 / m for m in grids]), np.log(errors), 1)[0])
    assert slope == pytest.approx(1.0, abs=0.1)
    report(4, f"log-log slope {slope:.4f} over m = 64..1024 "
              f"(errors {errors[0]:.2e} -> {errors[-1]:.2e})")


def test_criterion_5_combinatorial_chain():
    started = time.monotonic()
    for eta in (1e-6, 1e-4, 1e-2, 1e-1):
        for n in range(0, 11):
            total = sum(contracted_family_bound(n, k, eta) for k in range(n + 1))
            assert total <= same_step_bound(2 * n, eta) * (1 + 1e-12), (n, eta)
    for n in range(1, 1001):
        k = np.arange(1, n + 1, dtype=float)
        assert np.all(k * (math.log(n) - np.log(k)) <= n / math.e + 1e-9), n
    elapsed = time.monotonic() - started
    assert elapsed < 1.0
    report(5, f"family sums below closure for n <= 10, ratio inequality "
              f"exhaustive to n = 1000, {elapsed * 1e3:.0f} ms")


def _decimal_exp(x: Decimal) -> Decimal:
    getcontext().prec = 50
    term, total, n = Decimal(1), Decimal(1), 0
    while abs(term) > Decimal(10) ** -45:
        n += 1
        term *= x / n
        total += term
    return total


def test_criterion_6_constants():
    # independent oracle: Decimal power series, 50 digits
    e = _decimal_exp(Decimal(1))
    prefactor_oracle = float(_decimal_exp(1 + 1 / (2 * e)))
    closure_oracle = float(_decimal_exp(2 + 1 / e))
    assert abs(LOCALITY_PREFACTOR - prefactor_oracle) <= 1e-6
    assert abs(CONTRACTION_CLOSURE_BASE - closure_oracle) <= 1e-5
    # the two constants must square-close on each other
    assert CONTRACTION_CLOSURE_BASE == pytest.approx(LOCALITY_PREFACTOR**2, rel=1e-13)
    for eta in (1e-8, 1e-3, 0.4):
        ratio = local_noise_strength(eta, 2) / local_noise_strength(eta, 1)
        assert ratio == pytest.approx(math.sqrt(2), rel=1e-12)
    report(6, f"e^(1+1/2e) = {LOCALITY_PREFACTOR:.7f}, e^(2+1/e) = "
              f"{CONTRACTION_CLOSURE_BASE:.7f} vs 50-digit oracle; arity ratio sqrt(2)")


def test_criterion_7_recursion_and_budgets():
    params = preset("paper-magnitude")
    eps0 = threshold_strength(params)
    assert eps0 == pytest.approx(1e-5, rel=1e-12)
    for k in range(31):
        assert level_strength(params, eps0, k).value == pytest.approx(eps0, rel=1e-10)
    for epsilon in (eps0 / 2, eps0 / 10, eps0 / 100):
        for k in range(0, 7):
            iterative = level_strength(params, epsilon, k).value
            closed = level_strength_closed(params, epsilon, k).value
            if iterative > 1e-300:
                assert iterative == pytest.approx(closed, rel=1e-12)
    budget = coupling_budget(eps0)
    assert budget == pytest.approx(4.68e-12, rel=0.01)
    assert coupling_budget_constant_free(eps0) == pytest.approx(1e-10, rel=1e-12)
    report(7, f"fixed point stable to k = 30, closed/iterative agree to 1e-12, "
              f"budgets {budget:.3e} (exact) and {coupling_budget_constant_free(eps0):.1e} "
              f"(constant-free)")


def test_criterion_8_decay_sums():
    result = lattice_sum(LatticeSpec(dimension=1, exponent=2.0))
    target = math.pi**2 / 3
    low, high = result.interval()
    assert low <= target <= high
    assert result.value == pytest.approx(target, rel=1e-6)

    cells = divergence_scan([1, 2, 3], [0.5 * k for k in range(1, 9)], site_cap=300_000)
    assert len(cells) == 24
    for cell in cells:
        expected = "convergent" if cell.exponent > cell.dimension else "divergent"
        assert cell.verdict == expected, (cell.dimension, cell.exponent)
    harmonic = next(c for c in cells if c.dimension == 1 and c.exponent == 1.0)
    assert harmonic.growth_law == "logarithmic"
    assert harmonic.growth_coefficient == pytest.approx(2.0, rel=0.05)
    report(8, f"pi^2/3 inside [{low:.9f}, {high:.9f}], log coefficient "
              f"{harmonic.growth_coefficient:.4f}, 24 verdicts match z > D")


def test_criterion_9_phase_experiment():
    # two-equal-branch case: noiseless model, one fault; quadrature oracle
    noiseless = load_model(noiseless_document())
    stats = randomized_phase_norm(noiseless, FaultSet.of((0, 0)), n_samples=10_000, seed=2)
    thetas = (np.arange(400_000) + 0.5) * (2 * math.pi / 400_000)
    oracle = float(np.mean(np.abs(1 - np.exp(1j * thetas))))
    assert oracle == pytest.approx(4 / math.pi, rel=1e-10)
    assert stats.mean == pytest.approx(oracle, rel=0.02)

    # coherent phases reproduce the criterion-1 fault-sum norm exactly
    analytic = load_model(single_pair_document(strength=0.1))
    faults = FaultSet.of((0, 0))
    coherent = randomized_phase_norm(analytic, faults, n_samples=8, seed=0, m=64)
    assert coherent.coherent_norm == fault_sum_norm(analytic, faults, m=64)
    assert coherent.coherent_norm == pytest.approx(2 * math.sin(0.05), abs=1e-5)
    report(9, f"randomized mean {stats.mean:.5f} vs 4/pi = {4 / math.pi:.5f} "
              f"(10^4 samples), coherent norm identical to fault sum")


def test_criterion_10_determinism(tmp_path):
    model_path = tmp_path / "model.json"
    model_path.write_text(json.dumps(single_pair_document(strength=0.1)))

    def body(path):
        lines = open(path, "rb").read().split(b"\n")
        return b"\n".join(lines[1:])  # drop the timestamped header line

    commands = {
        "verify": ["verify-bounds", "--model", str(model_path), "--faults", "0:0",
                   "--faults", "0:0;0:1", "--seed", "3"],
        "sweep": ["sweep", "--model", str(model_path), "--faults", "0:0",
                  "--scale-grid", "0.0,0.5,1.0", "--seed", "3"],
        "threshold": ["threshold", "--preset", "paper-magnitude", "--epsilon", "1e-6",
                      "--levels", "4", "--lattice", "1,2", "--seed", "3"],
        "decay": ["decay-sum", "--dim-grid", "1,2,3", "--exponent-grid", "0.5:4:0.5",
                  "--seed", "3"],
        "phase": ["phase-experiment", "--model", str(model_path), "--faults", "0:0",
                  "--samples", "2000", "--seed", "3"],
    }
    for name, argv in commands.items():
        outs = []
        for run in range(2):
            out = tmp_path / f"{name}_{run}.out"
            code = main(argv + ["--out", str(out)])
            assert code == 0, (name, code)
            outs.append(out)
        assert body(outs[0]) == body(outs[1]), f"{name} reports differ between runs"
    report(10, f"{len(commands)} commands re-run with fixed seeds: byte-identical "
               f"reports (timestamps confined to the header line)")
