import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from selectrisk import (
    BoundQuery,
    DomainError,
    binomial_tail,
    hoeffding_b,
    solve_b_star,
)
from selectrisk import _kernels

# frozen by arbitrary-precision direct summation (gmpy2, 300-bit)
TAIL_3911_31_00143 = 1.85604950614729036e-4
# frozen root of tail(1000, 37, b) = 1e-4 (300-bit bisection, 220 halvings)
B_STAR_1000_37_1E4 = 0.0643740860172351


class TestBinomialTail:
    def test_analytic_two_trials(self):
        # P(X <= 1) for Bin(2, 0.5): 0.25 + 0.5
        assert binomial_tail(2, 1, 0.5) == pytest.approx(0.75, abs=1e-15)

    def test_full_support_is_one(self):
        assert binomial_tail(10, 10, 0.3) == 1.0

    def test_against_arbitrary_precision_sum(self):
        assert binomial_tail(3911, 31, 0.0143) == pytest.approx(
            TAIL_3911_31_00143, abs=1e-12
        )

    def test_endpoints(self):
        assert binomial_tail(7, 3, 0.0) == 1.0
        assert binomial_tail(7, 3, 1.0) == 0.0

    def test_large_m_no_underflow(self):
        t = binomial_tail(10**6, 10, 0.5)
        assert 0.0 <= t <= 1.0
        assert math.isfinite(t)

    @pytest.mark.parametrize(
        "m,k,b",
        [(0, 0, 0.5), (5, -1, 0.5), (5, 6, 0.5), (5, 2, -0.1), (5, 2, 1.5)],
    )
    def test_domain_errors(self, m, k, b):
        with pytest.raises(DomainError):
            binomial_tail(m, k, b)

    @given(
        m=st.integers(1, 400),
        k=st.integers(0, 400),
        b1=st.floats(0.001, 0.999),
        b2=st.floats(0.001, 0.999),
    )
    @settings(max_examples=80, deadline=None)
    def test_nonincreasing_in_b(self, m, k, b1, b2):
        k = min(k, m)
        lo, hi = sorted((b1, b2))
        assert binomial_tail(m, k, lo) >= binomial_tail(m, k, hi) - 1e-12

    @given(m=st.integers(1, 300), k=st.integers(0, 299), b=st.floats(0.01, 0.99))
    @settings(max_examples=80, deadline=None)
    def test_nondecreasing_in_k(self, m, k, b):
        k = min(k, m - 1) if m > 1 else 0
        assert binomial_tail(m, k + 1, b) >= binomial_tail(m, k, b) - 1e-12


class TestSolveBStar:
    def test_single_trial_closed_form(self):
        res = solve_b_star(BoundQuery(1, 0, 0.001))
        assert res.b_star == pytest.approx(0.999, abs=1e-10)

    def test_zero_errors_closed_form(self):
        res = solve_b_star(BoundQuery(100, 0, 0.001))
        assert res.b_star == pytest.approx(1 - 0.001 ** (1 / 100), abs=1e-10)

    def test_all_errors_vacuous(self):
        res = solve_b_star(BoundQuery(50, 50, 0.5))
        assert res.b_star == 1.0
        assert res.iterations == 0

    def test_grid_oracle_case(self):
        res = solve_b_star(BoundQuery(1000, 37, 1e-4))
        assert res.b_star == pytest.approx(B_STAR_1000_37_1E4, abs=1e-6)

    def test_residual_or_bracket_within_tolerance(self, rng):
        # bisection stops once the bracket is below 1e-12 (40 halvings) or
        # the achieved residual already is
        for _ in range(40):
            m = int(rng.integers(1, 5000))
            k = int(rng.integers(0, m))
            delta = float(rng.uniform(1e-6, 0.99))
            res = solve_b_star(BoundQuery(m, k, delta))
            assert res.residual <= 1e-12 or res.iterations >= 40
            assert 0.0 <= res.b_star <= 1.0

    def test_monotone_in_delta(self, rng):
        for _ in range(25):
            m = int(rng.integers(2, 2000))
            k = int(rng.integers(0, m))
            d1, d2 = sorted(rng.uniform(1e-6, 0.99, size=2))
            b1 = solve_b_star(BoundQuery(m, k, float(d1))).b_star
            b2 = solve_b_star(BoundQuery(m, k, float(d2))).b_star
            assert b1 >= b2 - 1e-9

    def test_monotone_in_k(self, rng):
        for _ in range(25):
            m = int(rng.integers(2, 2000))
            k = int(rng.integers(0, m - 1))
            delta = float(rng.uniform(1e-6, 0.99))
            b1 = solve_b_star(BoundQuery(m, k, delta)).b_star
            b2 = solve_b_star(BoundQuery(m, k + 1, delta)).b_star
            assert b2 >= b1 - 1e-9

    def test_monotone_in_m(self, rng):
        for _ in range(25):
            m = int(rng.integers(2, 2000))
            k = int(rng.integers(0, m))
            delta = float(rng.uniform(1e-6, 0.99))
            b1 = solve_b_star(BoundQuery(m, k, delta)).b_star
            b2 = solve_b_star(BoundQuery(m + int(rng.integers(1, 50)), k, delta)).b_star
            assert b2 <= b1 + 1e-9

    def test_numpy_integer_inputs_accepted(self):
        mask = np.array([True, False, True, True])
        q = BoundQuery(mask.size, mask.sum(), 0.1)  # np.int64 error count
        assert (q.m, q.k) == (4, 3)
        assert isinstance(q.k, int)

    def test_invalid_queries(self):
        with pytest.raises(DomainError):
            BoundQuery(0, 0, 0.5)
        with pytest.raises(DomainError):
            BoundQuery(5, 6, 0.5)
        with pytest.raises(DomainError):
            BoundQuery(5, 2, 0.0)
        with pytest.raises(DomainError):
            BoundQuery(5, 2, 1.0)


class TestHoeffding:
    def test_ln_delta_one(self):
        # delta = 1/e makes ln(1/delta) = 1
        q = BoundQuery(100, 0, 1 / math.e)
        assert hoeffding_b(q) == pytest.approx(0.07071067811865475, abs=1e-12)

    def test_direct_formula(self):
        q = BoundQuery(400, 20, 0.001)
        assert hoeffding_b(q) == pytest.approx(0.14292305472124597, abs=1e-12)
        assert hoeffding_b(q) == pytest.approx(
            0.05 + math.sqrt(math.log(1000) / 800), abs=1e-15
        )

    def test_dominates_exact_bound(self, rng):
        for _ in range(50):
            m = int(rng.integers(1, 3000))
            k = int(rng.integers(0, m + 1))
            delta = float(rng.uniform(1e-6, 0.99))
            q = BoundQuery(m, k, delta)
            if k == m:
                continue  # vacuous exact bound, comparison uninformative
            assert hoeffding_b(q) >= solve_b_star(q).b_star - 1e-9


@pytest.mark.skipif(not _kernels.HAS_NUMBA, reason="numba backend unavailable")
class TestBackendEquivalence:
    def test_tail_matches(self, rng):
        for _ in range(30):
            m = int(rng.integers(1, 20000))
            k = int(rng.integers(0, m + 1))
            b = float(rng.uniform(1e-6, 1 - 1e-6))
            lc_np = _kernels.log_binom_coeffs_numpy(m, k)
            lc_nb = _kernels.log_binom_coeffs_numba(m, k)
            np.testing.assert_allclose(lc_np, lc_nb, rtol=0, atol=1e-9)
            t_np = _kernels.binom_tail_numpy(lc_np, m, b)
            t_nb = _kernels.binom_tail_numba(lc_nb, m, b)
            # the streaming and two-pass accumulations may differ by a few
            # ulps of rounding per term on ~1e4-term sums
            assert t_np == pytest.approx(t_nb, abs=1e-10)

    def test_solve_matches(self, rng):
        for _ in range(20):
            m = int(rng.integers(2, 20000))
            k = int(rng.integers(0, m))
            delta = float(rng.uniform(1e-6, 0.99))
            lc = _kernels.log_binom_coeffs_numpy(m, k)
            b_np, _, _ = _kernels.solve_bisect_numpy(lc, m, delta, 1e-12, 200)
            b_nb, _, _ = _kernels.solve_bisect_numba(lc, m, delta, 1e-12, 200)
            assert b_np == pytest.approx(b_nb, abs=1e-11)
