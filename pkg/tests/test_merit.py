import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from goodlattice.lattice import GeneratingVector, fibonacci_generating_vector
from goodlattice.merit import (
    Smoothness,
    bernoulli_polynomial,
    exhaustive_search_2d,
    f_alpha,
    figure_of_merit,
    korobov_search,
    p_alpha_bruteforce,
    p_alpha_exact,
)


def fourier_series_oracle(alpha, x, terms=10**6):
    """Direct partial sum of 1 + 2 sum cos(2 pi h x)/h^alpha."""
    h = np.arange(1, terms + 1, dtype=np.float64)
    return 1.0 + 2.0 * math.fsum(np.cos(2.0 * np.pi * h * x) / h**alpha)


def naive_bruteforce(gv, alpha, H):
    axes = [np.arange(-H, H + 1)] * gv.s
    grids = np.meshgrid(*axes, indexing="ij")
    stacked = np.stack([g.ravel() for g in grids], axis=1)
    dual = (stacked @ np.asarray(gv.z)) % gv.n == 0
    dual &= np.any(stacked != 0, axis=1)
    w = np.prod(np.maximum(1.0, np.abs(stacked)), axis=1) ** (-float(alpha))
    return float(w[dual].sum())


class TestBernoulli:
    def test_values(self):
        assert bernoulli_polynomial(2, 0.0) == pytest.approx(1 / 6, abs=1e-16)
        assert bernoulli_polynomial(2, 0.5) == pytest.approx(-1 / 12, abs=1e-16)
        assert bernoulli_polynomial(4, 0.0) == pytest.approx(-1 / 30, abs=1e-16)
        assert bernoulli_polynomial(6, 0.0) == pytest.approx(1 / 42, abs=1e-16)

    def test_domain_and_alpha_validation(self):
        with pytest.raises(ValueError):
            bernoulli_polynomial(2, 1.5)
        with pytest.raises(ValueError):
            bernoulli_polynomial(3, 0.5)

    def test_zero_mean(self):
        # closed-form antiderivatives of B_alpha vanish over [0, 1]
        x = np.linspace(0, 1, 20001)
        for alpha in (2, 4, 6):
            vals = bernoulli_polynomial(alpha, x)
            assert np.trapezoid(vals, x) == pytest.approx(0.0, abs=1e-8)


class TestFAlpha:
    def test_known_values(self):
        assert f_alpha(2, 0.0) == pytest.approx(1 + np.pi**2 / 3, rel=1e-14)
        assert f_alpha(2, 0.5) == pytest.approx(1 - np.pi**2 / 6, rel=1e-14)

    @pytest.mark.parametrize("alpha,tol", [(2, 2e-5), (4, 1e-10), (6, 1e-12)])
    @pytest.mark.parametrize("x", [0.0, 0.125, 0.3, 0.5, 0.77])
    def test_matches_fourier_series(self, alpha, tol, x):
        assert f_alpha(alpha, x) == pytest.approx(
            fourier_series_oracle(alpha, x), abs=tol)

    def test_unit_integral(self):
        x = np.linspace(0, 1, 40001)
        for alpha in (2, 4, 6):
            assert np.trapezoid(f_alpha(alpha, x), x) == pytest.approx(1.0, abs=1e-6)

    @given(st.floats(-10, 10))
    def test_periodic_and_symmetric(self, x):
        # equalities hold up to the rounding of x+1 and 1-x themselves
        assert f_alpha(2, x) == pytest.approx(f_alpha(2, x + 1.0), abs=1e-12)
        xf = x - math.floor(x)
        assert f_alpha(2, xf) == pytest.approx(f_alpha(2, 1.0 - xf), abs=1e-12)

    def test_unsupported_alpha(self):
        with pytest.raises(ValueError):
            f_alpha(3, 0.5)


class TestPAlphaExact:
    def test_rejects_bad_alpha(self):
        gv = GeneratingVector(5, (1, 2))
        with pytest.raises(ValueError):
            p_alpha_exact(gv, 3)
        with pytest.raises(ValueError):
            Smoothness(1.0)

    def test_diagonal_vector_is_worse(self):
        good = p_alpha_exact(GeneratingVector(144, (1, 89)), 2).p_alpha
        diag = p_alpha_exact(GeneratingVector(144, (1, 1)), 2).p_alpha
        assert good < diag

    def test_mirror_symmetry_bitwise(self):
        for n, z2 in ((89, 34), (144, 55), (233, 89)):
            a = p_alpha_exact(GeneratingVector(n, (1, z2)), 2).p_alpha
            b = p_alpha_exact(GeneratingVector(n, (1, n - z2)), 2).p_alpha
            assert a == b

    def test_coordinate_permutation_symmetry(self):
        a = p_alpha_exact(GeneratingVector(89, (1, 34)), 2).p_alpha
        b = p_alpha_exact(GeneratingVector(89, (34, 1)), 2).p_alpha
        assert a == b

    @given(st.integers(2, 144), st.integers(0, 10**6))
    @settings(max_examples=50, deadline=None)
    def test_subset_negation_symmetry(self, n, raw):
        z2 = raw % n
        a = p_alpha_exact(GeneratingVector(n, (1, z2)), 2).p_alpha
        b = p_alpha_exact(GeneratingVector(n, (1, (n - z2) % n)), 2).p_alpha
        assert a == b

    def test_monotone_merit_fibonacci(self):
        merits = [p_alpha_exact(fibonacci_generating_vector(k), 2).p_alpha
                  for k in range(7, 15)]
        assert all(a > b for a, b in zip(merits, merits[1:]))


class TestPAlphaBruteforce:
    def test_empty_box(self):
        assert p_alpha_bruteforce(GeneratingVector(5, (1, 2)), 2, 1) == 0.0

    def test_two_point_lattice(self):
        # hand enumeration: (+-1,+-1) -> 4, (0,+-2),(+-2,0) -> 1, (+-2,+-2) -> 1/4
        assert p_alpha_bruteforce(GeneratingVector(2, (1, 1)), 2, 2) == pytest.approx(
            5.25, rel=1e-15)

    @given(st.integers(2, 40), st.integers(0, 10**6), st.integers(0, 10**6),
           st.integers(1, 25))
    @settings(max_examples=60, deadline=None)
    def test_matches_naive_enumeration(self, n, a, b, H):
        gv = GeneratingVector(n, (a % n, b % n))
        fast = p_alpha_bruteforce(gv, 2, H)
        assert fast == pytest.approx(naive_bruteforce(gv, 2, H), rel=1e-12, abs=1e-14)

    def test_three_dimensional_matches_naive(self):
        gv = GeneratingVector(7, (1, 2, 4))
        assert p_alpha_bruteforce(gv, 2, 12) == pytest.approx(
            naive_bruteforce(gv, 2, 12), rel=1e-12)

    def test_monotone_in_box(self):
        gv = GeneratingVector(13, (1, 5))
        prev = 0.0
        for H in (1, 2, 4, 8, 16, 64, 256):
            cur = p_alpha_bruteforce(gv, 2, H)
            assert cur + 1e-15 >= prev
            prev = cur

    def test_non_integer_alpha(self):
        gv = GeneratingVector(13, (1, 5))
        assert p_alpha_bruteforce(gv, 1.5, 50) == pytest.approx(
            naive_bruteforce(gv, 1.5, 50), rel=1e-12)


class TestOracleAgreement:
    """The exact Bernoulli route against the truncated dual enumeration.

    The box truncation excludes dual vectors with a huge component paired
    with a small one, so its bias decays like 1/(n*H): the two routes
    agree in the limit, at a rate this test pins down.
    """

    @pytest.mark.parametrize("n,z2", [(5, 2), (55, 34), (144, 89)])
    def test_converges_at_one_over_H(self, n, z2):
        gv = GeneratingVector(n, (1, z2))
        exact = p_alpha_exact(gv, 2).p_alpha
        d1 = exact - p_alpha_bruteforce(gv, 2, 10**4)
        d2 = exact - p_alpha_bruteforce(gv, 2, 10**5)
        assert d1 > d2 > 0
        assert d1 / d2 == pytest.approx(10.0, rel=0.05)

    def test_tight_agreement_at_large_box(self):
        gv = GeneratingVector(5, (1, 2))
        exact = p_alpha_exact(gv, 2).p_alpha
        bf = p_alpha_bruteforce(gv, 2, 10**7)
        assert abs(exact - bf) / exact < 1e-6

    def test_figure_of_merit_dispatch(self):
        gv = GeneratingVector(13, (1, 5))
        assert figure_of_merit(gv, 2).p_alpha == p_alpha_exact(gv, 2).p_alpha
        assert figure_of_merit(gv, 2.5, box=100).p_alpha == pytest.approx(
            p_alpha_bruteforce(gv, 2.5, 100))


class TestSearches:
    def test_tiny_tie_break(self):
        # l in {2, 3} tie by mirror symmetry; smallest l wins
        assert korobov_search(5, 2, 2).z == (1, 2)

    def test_single_candidate(self):
        assert exhaustive_search_2d(2, 2).z == (1, 1)

    def test_beats_fibonacci_competitor(self):
        found = p_alpha_exact(korobov_search(89, 2, 2), 2).p_alpha
        fib = p_alpha_exact(GeneratingVector(89, (1, 55)), 2).p_alpha
        assert found <= fib

    def test_exhaustive_symmetric_pair(self):
        gv = exhaustive_search_2d(13, 2)
        assert gv.z[1] in (5, 8)

    @pytest.mark.parametrize("n", [13, 55, 89, 144])
    def test_search_routes_agree(self, n):
        a = korobov_search(n, 2, 2)
        b = exhaustive_search_2d(n, 2)
        assert p_alpha_exact(a, 2).p_alpha == p_alpha_exact(b, 2).p_alpha
        assert a.z == b.z

    def test_workers_do_not_change_result(self):
        serial = korobov_search(233, 2, 2, workers=1)
        threaded = korobov_search(233, 2, 2, workers=4)
        assert serial == threaded

    def test_four_dimensional_search(self):
        gv = korobov_search(307, 4, 2)
        assert gv.z[0] == 1 and gv.s == 4
        found = p_alpha_exact(gv, 2).p_alpha
        # spot-check optimality against a few explicit Korobov candidates
        for l in (2, 3, 5, 100, 151, 306):
            z = (1, l, l**2 % 307, l**3 % 307)
            assert found <= p_alpha_exact(GeneratingVector(307, z), 2).p_alpha

    def test_fibonacci_near_optimality(self):
        for k, n in ((10, 55), (11, 89), (12, 144)):
            fib = p_alpha_exact(fibonacci_generating_vector(k), 2).p_alpha
            best = p_alpha_exact(exhaustive_search_2d(n, 2), 2).p_alpha
            assert fib <= 1.05 * best

    def test_constructive_rate_bound_with_slack(self):
        # searched optimum against the (2 log n)^(alpha s) / n^alpha rate,
        # slack factor 10 since the constant in the O-term is not pinned down
        for n in (13, 55, 89, 233, 987):
            p = p_alpha_exact(korobov_search(n, 2, 2), 2).p_alpha
            assert p <= 10.0 * (2.0 * math.log(n)) ** 4 / n**2

    def test_guards(self):
        with pytest.raises(ValueError):
            korobov_search(1, 2, 2)
        with pytest.raises(ValueError):
            korobov_search(10, 1, 2)
        with pytest.raises(ValueError):
            korobov_search(10, 2, 3)
        with pytest.raises(ValueError):
            exhaustive_search_2d(1001, 2)
