"""Combinatorial bound chain: contraction families, closures, constants."""

import math
from decimal import Decimal, getcontext

import numpy as np
import pytest

from faultlab.bounds import (
    CONTRACTION_CLOSURE_BASE,
    LOCALITY_PREFACTOR,
    contracted_family_bound,
    contracted_family_bound_loose,
    coupling_strength_limit,
    eta_prime,
    local_noise_strength,
    many_body_strength,
    same_step_bound,
    same_step_intermediate_bound,
)
from faultlab.model import load_model, long_range_strength
from faultlab.operators import sup_norm

from conftest import noiseless_document


def dec_exp(x: Decimal, prec: int = 50) -> Decimal:
    """exp by power series in Decimal arithmetic: an oracle independent of libm."""
    getcontext().prec = prec
    term = Decimal(1)
    total = Decimal(1)
    n = 0
    while abs(term) > Decimal(10) ** (-prec + 5):
        n += 1
        term *= x / n
        total += term
    return total


def dec_constants() -> tuple[Decimal, Decimal]:
    e = dec_exp(Decimal(1))
    prefactor = dec_exp(1 + 1 / (2 * e))
    closure = dec_exp(2 + 1 / e)
    return prefactor, closure


class TestConstants:
    def test_prefactor_matches_decimal_oracle(self):
        prefactor, _ = dec_constants()
        assert LOCALITY_PREFACTOR == pytest.approx(float(prefactor), rel=1e-14)

    def test_closure_matches_decimal_oracle(self):
        _, closure = dec_constants()
        assert CONTRACTION_CLOSURE_BASE == pytest.approx(float(closure), rel=1e-14)

    def test_closure_is_prefactor_squared(self):
        assert CONTRACTION_CLOSURE_BASE == pytest.approx(LOCALITY_PREFACTOR**2, rel=1e-14)

    def test_not_hardcoded_decimals(self):
        # the closed forms to 12 digits; a truncated literal would fail here
        prefactor, closure = dec_constants()
        assert abs(LOCALITY_PREFACTOR - float(prefactor)) < 1e-12
        assert abs(CONTRACTION_CLOSURE_BASE - float(closure)) < 1e-11


class TestContractionFamilies:
    def test_no_contractions_is_plain_power(self):
        assert contracted_family_bound(4, 0, 0.3) == pytest.approx(0.3**8, rel=1e-14)

    def test_single_pair_single_contraction(self):
        # n=1, k=1: (2 n eta)^1 / (2 * 1!) * eta^0 = eta
        assert contracted_family_bound(1, 1, 0.01) == pytest.approx(0.01, rel=1e-14)

    @pytest.mark.parametrize("eta", [1e-6, 1e-3, 1e-1])
    def test_tight_below_loose_everywhere(self, eta):
        # follows from k! >= (k/e)^k, checked exhaustively
        for n in range(1, 9):
            for k in range(1, n + 1):
                tight = contracted_family_bound(n, k, eta)
                loose = contracted_family_bound_loose(n, k, eta)
                assert tight <= loose * (1 + 1e-12)

    def test_input_validation(self):
        with pytest.raises(ValueError):
            contracted_family_bound(2, 3, 0.1)
        with pytest.raises(ValueError):
            contracted_family_bound(2, -1, 0.1)
        with pytest.raises(ValueError):
            contracted_family_bound(2, 1, -0.1)


class TestSameStepBound:
    def test_zero_strength(self):
        assert same_step_bound(2, 0.0) == 0.0
        assert same_step_bound(5, 0.0) == 0.0

    def test_r2_equals_closure_base_times_eta(self):
        # (eta')^2 = e^(2 + 1/e) eta, via the decimal oracle
        _, closure = dec_constants()
        assert same_step_bound(2, 0.01) == pytest.approx(float(closure) * 0.01, rel=1e-13)

    def test_odd_r_supported(self):
        eta = 0.004
        assert same_step_bound(3, eta) == pytest.approx(eta_prime(eta) ** 3, rel=1e-13)

    def test_intermediate_below_final(self):
        # n=3, eta=1e-3: (n+1) e^n e^(n/e) eta^n <= (eta')^(2n) since n+1 <= e^n
        n, eta = 3, 1e-3
        intermediate = same_step_intermediate_bound(n, eta)
        final = same_step_bound(2 * n, eta)
        assert intermediate == pytest.approx(4 * math.exp(3 + 3 / math.e) * 1e-9, rel=1e-12)
        assert intermediate <= final

    @pytest.mark.parametrize("eta", [1e-6, 1e-4, 1e-2, 1e-1])
    def test_family_sum_below_closure(self, eta):
        for n in range(0, 11):
            total = sum(contracted_family_bound(n, k, eta) for k in range(n + 1))
            assert total <= same_step_bound(2 * n, eta) * (1 + 1e-12)

    def test_ratio_inequality_exhaustive(self):
        # (n/k)^k <= (e^(1/e))^n for 1 <= k <= n <= 1000, in log space with
        # a float-rounding allowance (equality is approached at k = n/e)
        for n in range(1, 1001):
            k = np.arange(1, n + 1, dtype=float)
            lhs = k * (math.log(n) - np.log(k))
            assert np.all(lhs <= n / math.e + 1e-9)


class TestMonotonicity:
    from hypothesis import given, settings
    from hypothesis import strategies as st

    @settings(max_examples=50, deadline=None)
    @given(
        st.floats(min_value=1e-12, max_value=1.0),
        st.floats(min_value=1.0, max_value=10.0),
        st.integers(min_value=0, max_value=8),
    )
    def test_same_step_bound_monotone_in_eta(self, eta, factor, r):
        assert same_step_bound(r, eta) <= same_step_bound(r, eta * factor) * (1 + 1e-12)

    @settings(max_examples=50, deadline=None)
    @given(
        st.integers(min_value=0, max_value=10),
        st.floats(min_value=0.0, max_value=1.0),
    )
    def test_family_bounds_nonnegative(self, n, eta):
        for k in range(n + 1):
            assert contracted_family_bound(n, k, eta) >= 0.0
            assert contracted_family_bound_loose(n, k, eta) >= 0.0


class TestLocalityStrength:
    def test_zero(self):
        assert local_noise_strength(0.0, 2) == 0.0

    def test_pair_arity_value(self):
        prefactor, _ = dec_constants()
        expected = float(prefactor) * math.sqrt(0.01)
        assert local_noise_strength(0.005, 2) == pytest.approx(expected, rel=1e-13)

    def test_arity_ratio_is_sqrt2(self):
        for eta in (1e-8, 1e-4, 0.3):
            ratio = local_noise_strength(eta, 2) / local_noise_strength(eta, 1)
            assert ratio == pytest.approx(math.sqrt(2), rel=1e-12)

    @pytest.mark.parametrize("eta", [1e-10, 3.7e-5, 0.2])
    def test_inverse_round_trip(self, eta):
        for arity in (1, 2):
            eps = local_noise_strength(eta, arity)
            assert coupling_strength_limit(eps, arity) == pytest.approx(eta, rel=1e-12)

    def test_bad_arity(self):
        with pytest.raises(ValueError):
            local_noise_strength(0.1, 3)


class TestManyBody:
    def test_pair_case_matches_model_strength(self):
        doc = noiseless_document(n_qubits=4)
        doc["pair_terms"] = [
            {"i": i, "j": j, "preset": {"name": "xx", "strength": 0.01 * (i + j + 1), "seed": 0}}
            for i in range(4)
            for j in range(i + 1, 4)
        ]
        model = load_model(doc)
        table = {(t.i, t.j): sup_norm(t.op) for t in model.pair_terms}
        assert many_body_strength(table, p=2) == pytest.approx(
            long_range_strength(model), rel=1e-12
        )

    def test_single_three_body_term(self):
        assert many_body_strength({(0, 1, 2): 0.2}, p=3) == pytest.approx(0.2, rel=1e-14)

    def test_dense_three_body_against_exhaustive_sum(self):
        rng = np.random.default_rng(12)
        import itertools

        table = {
            triple: float(rng.uniform(0.0, 1.0))
            for triple in itertools.combinations(range(4), 3)
        }
        rows = {
            i: sum(v for key, v in table.items() if i in key) for i in range(4)
        }
        assert many_body_strength(table, p=3, t0=0.5) == pytest.approx(
            max(rows.values()) * 0.5, rel=1e-12
        )

    def test_empty_table(self):
        assert many_body_strength({}, p=3) == 0.0

    def test_validation(self):
        with pytest.raises(ValueError, match="p must be"):
            many_body_strength({(0,): 1.0}, p=1)
        with pytest.raises(ValueError, match="indices"):
            many_body_strength({(0, 1): 1.0}, p=3)
        with pytest.raises(ValueError, match="repeated"):
            many_body_strength({(0, 0, 1): 1.0}, p=3)
