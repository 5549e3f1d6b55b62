"""Analytic layer: evaluator accuracy, pole structure, zeros, tails, Mellin."""

import cmath
import math

import mpmath as mp
import numpy as np
import pytest

from moblike.analytic import (
    TailSpec,
    ZeroRecord,
    dirichlet_l,
    f_series,
    find_critical_zeros,
    gamma,
    hardy_z,
    mellin_check,
    noncancelled_zeros,
    omega_constant,
    p_factor,
    reflection_residual,
    z_m_tail,
    zero_count_estimate,
    zeta,
    zeta_prime,
)
from moblike.errors import (
    CancelledZeroError,
    CapacityError,
    PoleAtOneError,
    PoleOfFError,
    PoleOfPError,
)
from moblike.sieve import _h_tables, sieve_segment

mp.mp.dps = 30

# frozen from two agreeing oracles (library zero tables and an independent
# bisection of the rotated critical-line function at high precision)
GAMMA_1 = 14.134725141734693790


class TestZeta:
    def test_closed_forms(self):
        assert abs(zeta(2) - math.pi**2 / 6) < 1e-10
        assert abs(zeta(0) + 0.5) < 1e-10

    def test_first_zero_is_small(self):
        assert abs(zeta(0.5 + 14.134725j)) < 1e-4

    @pytest.mark.parametrize(
        "s",
        [2 + 0j, 0.5 + 30j, -1.5 + 20j, 3 + 99j, 0.25 - 77j, 1.0001 + 0j],
    )
    def test_relative_accuracy_low_heights(self, s):
        ref = complex(mp.zeta(mp.mpc(s.real, s.imag)))
        assert abs(zeta(s) - ref) / abs(ref) < 1e-10

    @pytest.mark.parametrize("t", [1000.0, 10000.0, 100000.0])
    def test_relative_accuracy_high_heights(self, t):
        s = 0.6 + 1j * t
        ref = complex(mp.zeta(mp.mpc(s.real, s.imag)))
        assert abs(zeta(s) - ref) / abs(ref) < 1e-8

    def test_pole_and_envelope_guards(self):
        with pytest.raises(PoleAtOneError):
            zeta(1)
        with pytest.raises(CapacityError):
            zeta(0.5 + 2e5j)


class TestZetaPrime:
    def test_closed_form_at_zero(self):
        assert abs(zeta_prime(0) + 0.5 * math.log(2 * math.pi)) < 1e-10

    def test_series_value_at_two(self):
        # high-precision series oracle: sum of -log(n)/n^2
        ref = complex(mp.zeta(2, derivative=1))
        assert abs(ref - (-0.9375482543158437537)) < 1e-15
        assert abs(zeta_prime(2) - ref) / abs(ref) < 1e-6

    def test_matches_plain_central_difference(self):
        # definition check: the extrapolated value agrees with a straight
        # central difference as the step shrinks
        for h in (1e-3, 1e-4, 1e-5):
            plain = (zeta(3 + h) - zeta(3 - h)) / (2 * h)
            assert abs(plain - zeta_prime(3)) < 5 * h**2

    def test_independent_difference_at_random_points(self):
        rng = np.random.default_rng(99)
        for _ in range(20):
            s = complex(rng.uniform(1.5, 3.0), rng.uniform(-40, 40))
            indep = (zeta(s + 1e-5) - zeta(s - 1e-5)) / 2e-5
            zp = zeta_prime(s)
            assert abs(zp - indep) / abs(zp) < 1e-5


class TestGamma:
    def test_lanczos_provenance_values(self):
        assert abs(gamma(0.5) - math.sqrt(math.pi)) < 1e-12
        for n in range(1, 10):
            assert abs(gamma(n) - math.factorial(n - 1)) <= 1e-10 * math.factorial(n - 1)

    def test_reflection_identity_grid(self):
        sigmas = np.linspace(-1.97, 2.91, 10)
        ts = np.linspace(-49.3, 49.7, 10)
        worst = max(reflection_residual(complex(sg, t)) for sg in sigmas for t in ts)
        assert worst < 1e-8


class TestDirichletL:
    def test_classical_values(self, chi3, chi4):
        assert abs(dirichlet_l(chi3, 1) - math.pi / (3 * math.sqrt(3))) < 1e-8
        assert abs(dirichlet_l(chi4, 1) - math.pi / 4) < 1e-8

    def test_golden_value_at_two(self, chi3):
        # oracle: group the series in pairs 1/(3k+1)^2 - 1/(3k+2)^2, whose
        # terms are O(k^-3); the partial sum to K=2*10^5 is within 1e-11
        oracle = sum(1 / (3 * k + 1) ** 2 - 1 / (3 * k + 2) ** 2 for k in range(200000))
        golden = 0.781302412896486
        assert abs(oracle - golden) < 1e-9
        assert abs(dirichlet_l(chi3, 2) - golden) < 1e-9

    def test_entire_near_one(self, chi3):
        # values straddling s = 1 vary smoothly through the special case
        a = dirichlet_l(chi3, 0.999)
        b = dirichlet_l(chi3, 1)
        c = dirichlet_l(chi3, 1.001)
        assert abs(a + c - 2 * b) < 1e-5

    def test_complex_point_against_hurwitz_oracle(self, chi3):
        s = 0.25 + 7.0673625j
        ref = complex(
            mp.mpc(3) ** -mp.mpc(s.real, s.imag)
            * (mp.zeta(mp.mpc(s.real, s.imag), mp.mpf(1) / 3)
               - mp.zeta(mp.mpc(s.real, s.imag), mp.mpf(2) / 3))
        )
        assert abs(dirichlet_l(chi3, s) - ref) < 1e-10


class TestPFactor:
    def test_closed_values(self):
        assert abs(p_factor(3, 2) - 1.125) < 1e-14
        assert abs(p_factor(6, 1) - 3) < 1e-12

    @pytest.mark.parametrize("q", [3, 4, 6])
    def test_poles_on_imaginary_axis(self, q):
        primes = {3: [3], 4: [2], 6: [2, 3]}[q]
        for p in primes:
            for j in (-3, -2, -1, 0, 1, 2, 3):
                s = 2j * math.pi * j / math.log(p)
                with pytest.raises(PoleOfPError):
                    p_factor(q, s)
        # a point safely between poles is regular
        assert p_factor(q, 1j) != 0

    @pytest.mark.parametrize("q,om", [(3, 1), (4, 1), (6, 2)])
    def test_origin_pole_order(self, q, om):
        # |P| ~ |s|^-omega(q) approaching 0 along the reals
        sig = np.array([1e-3, 1e-4, 1e-5, 1e-6])
        vals = np.array([abs(p_factor(q, s)) for s in sig])
        slope = np.polyfit(np.log(sig), np.log(vals), 1)[0]
        assert abs(slope + om) < 0.05


class TestFSeries:
    def test_through_component_product(self, chi3):
        expected = dirichlet_l(chi3, 2) * p_factor(3, 2) / zeta(4)
        assert abs(f_series(chi3, 2) - expected) < 1e-14

    def test_against_truncated_series_at_two(self, chi3):
        vals = sieve_segment("f", 1, 10**6 + 1, chi=chi3).values.astype(np.float64)
        ns = np.arange(1, 10**6 + 1, dtype=np.float64)
        truncated = float(np.dot(vals, ns**-2.0))
        assert abs(f_series(chi3, 2).real - truncated) < 1e-6

    def test_against_truncated_series_slow_convergence(self, chi3):
        total = 0.0
        step = 1 << 22
        for a in range(1, 10**7 + 1, step):
            b = min(a + step, 10**7 + 1)
            vals = sieve_segment("f", a, b, chi=chi3).values.astype(np.float64)
            ns = np.arange(a, b, dtype=np.float64)
            total += float(np.dot(vals, ns**-1.5))
        assert abs(f_series(chi3, 1.5).real - total) < 1e-3

    def test_random_points_within_tail_bound(self, chi4):
        n_max = 10**5
        vals = sieve_segment("f", 1, n_max + 1, chi=chi4).values.astype(np.float64)
        ns = np.arange(1, n_max + 1, dtype=np.float64)
        rng = np.random.default_rng(4)
        for _ in range(20):
            s = complex(rng.uniform(1.5, 3.0), rng.uniform(-30, 30))
            truncated = complex(np.sum(vals * np.exp(-s * np.log(ns))))
            bound = n_max ** (1 - s.real) / (s.real - 1)
            assert abs(f_series(chi4, s) - truncated) <= bound + 1e-9

    def test_tends_to_one_far_right(self, chi3):
        assert abs(f_series(chi3, 40) - 1) < 1e-10

    def test_pole_where_zeta_2s_vanishes(self, chi3):
        with pytest.raises(PoleOfFError):
            f_series(chi3, 0.25 + 0.5j * GAMMA_1)

    def test_zero_at_one_half(self, chi3):
        assert f_series(chi3, 0.5) == 0


class TestTail:
    def test_tail_spec_validation(self):
        with pytest.raises(ValueError):
            TailSpec(3, 100, 0.4 + 0j)
        with pytest.raises(ValueError):
            TailSpec(3, 0, 1.5 + 0j)
        with pytest.raises(CapacityError):
            TailSpec(3, 10**8 + 1, 1.5 + 0j)

    def test_golden_value(self):
        z = z_m_tail(TailSpec(3, 1000, 1.2 + 0j))
        # frozen after agreeing with the direct tail summed to 1e8
        assert abs(z - (-0.000140291719875)) < 1e-12

    def test_agrees_with_direct_tail_for_sigma_above_one(self):
        ns, hs, _, _ = _h_tables(3, 10**8)
        for s in (1.1 + 0j, 1.2 + 0j, 1.5 + 5j):
            sel = ns > 1000
            direct = complex(
                np.sum(hs[sel] * np.exp(-s * np.log(ns[sel].astype(np.float64))))
            )
            assert abs(z_m_tail(TailSpec(3, 1000, s)) - direct) < 1e-6

    def test_vanishing_tail_at_sigma_three_halves(self):
        # |Z| falls to zero along M = 2^k; the decrease is not strictly
        # monotone step-by-step (sign cancellations), but it is monotone at
        # three-octave spacing and the endpoint is tiny
        vals = [abs(z_m_tail(TailSpec(3, 2**k, 1.5 + 0j))) for k in range(4, 16)]
        for i in range(len(vals) - 3):
            assert vals[i + 3] < vals[i]
        assert vals[-1] < 1e-7 < vals[0]

    def test_doubling_ratio_near_quarter_minus_sigma(self):
        # measured-decay form at sigma = 0.75: eight doublings average to
        # 2^(1/4 - sigma) within +-0.2
        vals = [abs(z_m_tail(TailSpec(3, 2**k, 0.75 + 0j))) for k in range(10, 19)]
        ratios = [math.log2(b / a) for a, b in zip(vals, vals[1:])]
        avg = sum(ratios) / len(ratios)
        assert abs(avg - (0.25 - 0.75)) <= 0.2

    @pytest.mark.parametrize("sigma", [0.75, 1.0, 1.25])
    def test_decay_invariant_window(self, sigma):
        vals = [abs(z_m_tail(TailSpec(3, 2**k, sigma + 0j))) for k in range(10, 19)]
        ratios = [math.log2(b / a) for a, b in zip(vals, vals[1:])]
        avg = sum(ratios) / len(ratios)
        assert abs(avg - (0.25 - sigma)) <= 0.25


class TestZeroScan:
    def test_first_zero_to_six_decimals(self):
        zeros = find_critical_zeros(10)
        assert len(zeros) == 1
        g, simple = zeros[0]
        assert abs(g - GAMMA_1) < 1e-6
        assert simple

    def test_count_below_forty(self):
        # frozen after the scan agreed with library zero ordinates: exactly
        # six zeros have ordinate <= 40
        zeros = find_critical_zeros(20)
        assert len(zeros) == 6
        for k, (g, simple) in enumerate(zeros, 1):
            assert abs(g - float(mp.zetazero(k).imag)) < 1e-9
            assert simple
        assert abs(len(zeros) - zero_count_estimate(40)) <= 2

    def test_empty_below_first_zero(self):
        assert find_critical_zeros(0.1) == []

    def test_hardy_z_is_real_rotation(self):
        for t in (3.7, 14.0, 29.5):
            z = cmath.exp(1j * 0) * hardy_z(t)  # already the real part
            full = abs(zeta(0.5 + 1j * t))
            assert abs(abs(z) - full) < 1e-9  # rotation preserves modulus

    def test_capacity_guard(self):
        with pytest.raises(CapacityError):
            find_critical_zeros(5001)

    def test_parallel_scan_deterministic(self):
        a = find_critical_zeros(15, threads=1)
        b = find_critical_zeros(15, threads=4)
        assert a == b


class TestNoncancelled:
    def test_q3_first_zero_record(self, chi3):
        records = noncancelled_zeros(chi3, 10)
        assert len(records) == 1
        r = records[0]
        assert r.simple and r.noncancelled
        assert abs(zeta(0.5 + 1j * r.gamma)) < 1e-8
        assert abs(r.zeta_prime) > 1e-4
        assert r.omega_constant > 0
        assert abs(r.rho - (0.25 + 0.5j * r.gamma)) == 0

    def test_infinite_threshold_cancels_everything(self, chi3):
        records = noncancelled_zeros(chi3, 10, threshold=float("inf"))
        assert records and all(not r.noncancelled for r in records)

    def test_q4_all_noncancelled_to_forty(self, chi4):
        records = noncancelled_zeros(chi4, 20)
        assert len(records) == 6  # frozen with the scan count
        assert all(r.noncancelled and r.simple for r in records)

    def test_threshold_must_be_positive(self, chi3):
        with pytest.raises(ValueError):
            noncancelled_zeros(chi3, 5, threshold=0)


class TestOmegaConstant:
    def test_homogeneity_in_l(self, chi3):
        r = noncancelled_zeros(chi3, 10)[0]
        doubled = ZeroRecord(
            gamma=r.gamma,
            simple=r.simple,
            l_value=2 * r.l_value,
            p_value=r.p_value,
            zeta_prime=r.zeta_prime,
            omega_constant=abs(2 * r.l_value * r.p_value / (4 * r.rho * r.zeta_prime)),
            noncancelled=True,
        )
        assert omega_constant(doubled) == pytest.approx(2 * omega_constant(r), rel=1e-12)

    def test_golden_value_and_step_stability(self, chi3):
        r = noncancelled_zeros(chi3, 10)[0]
        assert omega_constant(r) == pytest.approx(0.0485278508924, abs=1e-9)
        r_half = noncancelled_zeros(chi3, 10, fd_step=5e-5, refine_tol=5e-13)[0]
        rel = abs(omega_constant(r_half) - omega_constant(r)) / omega_constant(r)
        assert rel < 1e-6

    def test_rejects_unusable_records(self, chi3):
        r = noncancelled_zeros(chi3, 10, threshold=float("inf"))[0]
        with pytest.raises(CancelledZeroError):
            omega_constant(r)
        r2 = noncancelled_zeros(chi3, 10)[0]
        r2.simple = False
        with pytest.raises(CancelledZeroError):
            omega_constant(r2)


class TestMellin:
    def test_residual_small_at_two(self, chi3):
        assert mellin_check(chi3, 2, 10**6) < 1e-2

    def test_residual_smaller_at_three(self, chi3):
        assert mellin_check(chi3, 3, 10**6) < 1e-4

    def test_documented_tail_bound(self, chi3):
        # C from the monitored growth |M_f(x)| <= C x^(1/4+eps) on the range
        eps = 0.05
        vals = sieve_segment("f", 1, 10**5 + 1, chi=chi3).values
        cs = np.cumsum(vals, dtype=np.int64)
        xs = np.arange(1, 10**5 + 1, dtype=np.float64)
        c_monitored = float(np.max(np.abs(cs) / xs ** (0.25 + eps)))
        for s in (2.0, 3.0):
            bound = (
                abs(s)
                * c_monitored
                / (s - 0.25 - eps)
                * (10**5) ** (0.25 + eps - s)
            )
            assert mellin_check(chi3, s, 10**5) <= bound

    def test_degenerate_range_returns_f_modulus(self, chi3):
        assert mellin_check(chi3, 2, 1) == pytest.approx(abs(f_series(chi3, 2)), rel=1e-14)

    def test_region_guard(self, chi3):
        with pytest.raises(ValueError):
            mellin_check(chi3, 1.1, 100)
        with pytest.raises(CapacityError):
            mellin_check(chi3, 2, 10**8 + 1)

    def test_segment_size_does_not_change_result(self, chi3):
        a = mellin_check(chi3, 2, 50000, segment_size=1 << 22)
        b = mellin_check(chi3, 2, 50000, segment_size=1234)
        assert abs(a - b) < 1e-12
