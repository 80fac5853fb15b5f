import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from randpoled import (RandomSource, StructureSpec, avg_f2_rps,
                       avg_f2_rps_asymptotic, avg_f2_weak, complex_erf,
                       f_boundary_sum, f_chirp, f_exact, gen_chirped,
                       gen_ideal, xcorr_chirp, xcorr_rps, xcorr_weak)
from randpoled.phasematch import (PhasematchError, _dirichlet, _geom_sum,
                                  characteristic_g, h_factor)

L0 = 9.489154805833549e-06
DK0 = np.pi / L0


class TestFExact:
    # oracle: 30-digit quadrature of the chi(2)-weighted plane-wave
    # integral over each domain of a 6-domain equidistant structure
    # with entrance face at -6 l0
    ORACLE = {
        331071.915: -3.1645643850207112e-14 + 3.624590143806067e-05j,
        3.5e5: 1.6709100127452332e-05 + 2.7948810275507301e-05j,
        1e5: -8.6738740346699078e-07 + 2.8560830802092166e-06j,
    }

    def test_against_quadrature_oracle(self):
        s = gen_ideal(6, L0)
        for dk, want in self.ORACLE.items():
            val = f_exact(s, dk)
            assert val == pytest.approx(want, rel=1e-11, abs=1e-16)

    def test_zero_mismatch_limit(self):
        # alternating-sign integral of equal domains cancels pairwise;
        # odd domain count leaves exactly one domain
        assert abs(f_exact(gen_ideal(6, L0), 0.0)) < 1e-20
        assert f_exact(gen_ideal(7, L0), 0.0) == pytest.approx(L0, rel=1e-12)

    def test_tiny_branch_continuous(self):
        s = gen_ideal(101, L0)
        dk_switch = 1e-6 / s.length
        lo = f_exact(s, dk_switch * 0.99)
        hi = f_exact(s, dk_switch * 1.01)
        assert lo == pytest.approx(hi, rel=1e-6)

    def test_array_shape(self):
        s = gen_ideal(10, L0)
        dk = np.linspace(-1e5, 1e5, 7).reshape(7, 1)
        assert f_exact(s, dk).shape == (7, 1)

    def test_boundary_sum_close_to_exact(self):
        s = gen_ideal(700, L0)
        dk = np.linspace(0.8 * DK0, 1.2 * DK0, 11)
        fe = f_exact(s, dk)
        fb = f_boundary_sum(s, dk)
        # differs only by the two half-weighted end-face boundary terms,
        # each of magnitude 1/dk: small relative to the 2 N_L/dk peak
        assert np.max(np.abs(fb - fe)) < 3.0 / (0.8 * DK0)

    def test_boundary_sum_rejects_zero(self):
        with pytest.raises(PhasematchError):
            f_boundary_sum(gen_ideal(4, L0), 0.0)


class TestEnsembleMeans:
    def test_ordered_limit_maximum(self):
        # sigma = 0, delta_k = 0: mean reduces to 4 (N_L + 1)^2 / dk0^2
        n = 700
        val = avg_f2_rps(0.0, n, L0, 0.0, DK0)
        assert val == pytest.approx(4.0 * (n + 1) ** 2 / DK0 ** 2, rel=1e-8)
        assert avg_f2_weak(0.0, n, L0, 0.0, DK0) == pytest.approx(val, rel=1e-8)

    def test_rps_frozen_values(self):
        assert avg_f2_rps(0.0, 700, L0, 2.1e-6, DK0) == pytest.approx(
            4.189126194858169e-07, rel=1e-10)
        assert avg_f2_rps(5e4, 700, L0, 2.1e-6, DK0) == pytest.approx(
            2.535834693772302e-08, rel=1e-10)
        assert avg_f2_rps(-1.3e5, 700, L0, 2.1e-6, DK0) == pytest.approx(
            4.7619412727445975e-09, rel=1e-10)

    def test_weak_frozen_values(self):
        assert avg_f2_weak(0.0, 700, L0, 1.0e-6, DK0) == pytest.approx(
            1.6979285325820253e-05, rel=1e-10)
        assert avg_f2_weak(5e4, 700, L0, 1.0e-6, DK0) == pytest.approx(
            1.3685085260942837e-09, rel=1e-10)

    def test_rps_fallback_branch_continuous(self):
        # at sigma=0 the geometric denominator degenerates as delta_k -> 0;
        # the exact lag sum must join the closed form smoothly across the
        # branch switch at |delta_k| l0 ~ 1e-6
        switch = 1e-6 / L0
        lo = avg_f2_rps(switch * 0.99, 300, L0, 0.0, DK0)
        hi = avg_f2_rps(switch * 1.01, 300, L0, 0.0, DK0)
        assert lo == pytest.approx(hi, rel=1e-6)

    def test_weak_large_sigma_diagonal_limit(self):
        # fully dephased boundaries: mean -> 4 (N_L + 1) / dk_tot^2
        n = 500
        val = avg_f2_weak(0.0, n, L0, 40e-6, DK0)
        assert val == pytest.approx(4.0 * (n + 1) / DK0 ** 2, rel=1e-6)

    def test_asymptotic_frozen_and_validity(self):
        val, validity = avg_f2_rps_asymptotic(5e4, 700, L0, 2.0e-6, DK0)
        assert val == pytest.approx(2.3250902369788674e-08, rel=1e-10)
        assert validity == pytest.approx(153.45205809090473, rel=1e-10)

    def test_asymptotic_matches_exact_when_valid(self):
        dk = np.linspace(-3e5, 3e5, 301)
        exact = avg_f2_rps(dk, 700, L0, 2.0e-6, DK0)
        approx, validity = avg_f2_rps_asymptotic(dk, 700, L0, 2.0e-6, DK0)
        assert validity > 100
        # peak-normalized deviation; the pointwise error grows only at
        # the small-mismatch band edge where dephasing locally vanishes
        assert np.max(np.abs(approx - exact)) / exact.max() < 0.02
        mask = dk > -1e5
        assert np.max(np.abs(approx[mask] / exact[mask] - 1.0)) < 0.03

    def test_rps_mc_agreement(self):
        # analytic mean vs 400 explicit realizations at 6 detunings
        n, sigma, reals = 200, 1.0e-6, 400
        dk = np.linspace(-2e5, 2e5, 6)
        spec = StructureSpec("rps", n, L0, sigma=sigma)
        samples = np.empty((reals, dk.size))
        for i in range(reals):
            s = spec.generate(RandomSource(1234, i))
            samples[i] = np.abs(f_boundary_sum(s, DK0 + dk)) ** 2
        mean = samples.mean(axis=0)
        se = samples.std(axis=0, ddof=1) / np.sqrt(reals)
        ana = avg_f2_rps(dk, n, L0, sigma, DK0)
        assert np.all(np.abs(mean - ana) < 5.0 * se)

    def test_weak_mc_agreement(self):
        n, sigma, reals = 200, 1.0e-6, 400
        dk = np.linspace(-2e5, 2e5, 6)
        spec = StructureSpec("weakly-random", n, L0, sigma=sigma)
        samples = np.empty((reals, dk.size))
        for i in range(reals):
            s = spec.generate(RandomSource(99, i))
            samples[i] = np.abs(f_boundary_sum(s, DK0 + dk)) ** 2
        mean = samples.mean(axis=0)
        se = samples.std(axis=0, ddof=1) / np.sqrt(reals)
        ana = avg_f2_weak(dk, n, L0, sigma, DK0)
        assert np.all(np.abs(mean - ana) < 5.0 * se)


class TestChirp:
    def test_frozen_value(self):
        val = f_chirp(2e4, 700, L0, 2.5e6 / DK0, DK0)
        assert val == pytest.approx(
            0.00016871649645698334 - 6.824485696357057e-05j, rel=1e-10)

    def test_matches_direct_sum(self):
        # the chirp sweeps local mismatch over +- zeta N_L l0 ~ 1.7e4 1/m;
        # compare across the central 80% of that emission plateau
        s = gen_chirped(700, L0, 2.5e6)
        half_span = 2.5e6 * 700 * L0 / 2
        dk = np.linspace(-0.8 * half_span, 0.8 * half_span, 41)
        direct = np.abs(f_exact(s, DK0 + dk)) ** 2
        closed = np.abs(f_chirp(dk, 700, L0, 2.5e6 / DK0, DK0)) ** 2
        assert np.max(np.abs(closed / direct - 1.0)) < 0.02

    def test_zero_chirp_rejected(self):
        with pytest.raises(PhasematchError):
            f_chirp(0.0, 700, L0, 0.0, DK0)

    def test_plateau_height_scales_inverse_chirp(self):
        # stationary-phase plateau: |F|^2 proportional to 1/zeta' on
        # average (pointwise values ripple)
        dk = np.linspace(-1e4, 1e4, 400)
        v1 = np.mean(np.abs(f_chirp(dk, 700, L0, 2.5e6 / DK0, DK0)) ** 2)
        v2 = np.mean(np.abs(f_chirp(dk, 700, L0, 5.0e6 / DK0, DK0)) ** 2)
        assert v1 / v2 == pytest.approx(2.0, rel=0.15)


class TestComplexErf:
    # oracle: mpmath.erf at 30 digits
    ORACLE = {
        1 + 0j: 0.8427007929497149 + 0.0j,
        0.5 + 1.2j: 1.737238382004892 + 1.290472981831509j,
        -2 + 3j: 20.82946142761457 + 8.687318271470163j,
        4 - 4j: 0.9785492330760819 - 0.09733969063083187j,
        10 + 9.9j: 1.003585986617351 - 0.004144419783771208j,
    }

    def test_against_oracle(self):
        for z, want in self.ORACLE.items():
            got = complex_erf(z)
            assert got == pytest.approx(want, rel=1e-10)

    def test_overflow_guard(self):
        with pytest.raises(PhasematchError):
            complex_erf(30j)

    def test_ray_arguments_allowed(self):
        # arguments on the arg z = -pi/4 ray stay bounded at any size
        z = 100.0 * np.exp(-1j * np.pi / 4)
        assert abs(complex_erf(z)) < 2.0

    def test_mpmath_cross_check(self):
        mp = pytest.importorskip("mpmath")
        rng = np.random.default_rng(0)
        for _ in range(20):
            z = complex(rng.uniform(-5, 5), rng.uniform(-5, 5))
            want = complex(mp.erf(mp.mpc(z)))
            assert complex_erf(z) == pytest.approx(want, rel=1e-10)


class TestCrossCorrelators:
    def test_diagonal_matches_mean(self):
        dk = np.linspace(-2e5, 2e5, 9)
        diag = xcorr_rps(dk, dk, 700, L0, 2.1e-6, DK0)
        assert np.max(np.abs(diag.imag)) < 1e-18
        assert np.allclose(diag.real, avg_f2_rps(dk, 700, L0, 2.1e-6, DK0),
                           rtol=1e-10)
        diag_w = xcorr_weak(dk, dk, 700, L0, 1e-6, DK0)
        assert np.allclose(diag_w.real, avg_f2_weak(dk, 700, L0, 1e-6, DK0),
                           rtol=1e-10)

    def test_hermitian(self):
        a = xcorr_rps(5e4, -3e4, 700, L0, 2.1e-6, DK0)
        b = xcorr_rps(-3e4, 5e4, 700, L0, 2.1e-6, DK0)
        assert a == pytest.approx(np.conj(b), rel=1e-12)

    def test_frozen_values(self):
        assert xcorr_rps(5e4, -3e4, 700, L0, 2.1e-6, DK0) == pytest.approx(
            9.038688728746031e-11 - 2.3191694185772467e-10j, rel=1e-10)
        assert xcorr_weak(5e4, -3e4, 700, L0, 1e-6, DK0) == pytest.approx(
            3.417092918976038e-11 + 1.2349842179681629e-10j, rel=1e-10)

    def test_fallback_branch_continuous(self):
        # sigma = 0 makes |1 - H| degenerate below |delta_k| l0 ~ 1e-6;
        # the exact lag sum must join the closed form across the switch
        switch = 1e-6 / L0
        near = xcorr_rps(switch * 0.99, 4e4, 300, L0, 0.0, DK0)
        off = xcorr_rps(switch * 1.01, 4e4, 300, L0, 0.0, DK0)
        assert near == pytest.approx(off, rel=1e-5)

    def test_rps_mc_agreement_offdiagonal(self):
        n, sigma, reals = 200, 1.5e-6, 500
        pairs = [(3e4, -2e4), (8e4, 8e4 + 5e3), (-1e5, 5e4)]
        spec = StructureSpec("rps", n, L0, sigma=sigma)
        fs = np.empty((reals, 6), dtype=complex)
        dks = np.array([p[0] for p in pairs] + [p[1] for p in pairs])
        for i in range(reals):
            s = spec.generate(RandomSource(777, i))
            fs[i] = f_boundary_sum(s, DK0 + dks)
        for j, (a, b) in enumerate(pairs):
            prod = fs[:, j] * np.conj(fs[:, j + 3])
            mean = prod.mean()
            se = prod.std(ddof=1) / np.sqrt(reals)
            ana = xcorr_rps(a, b, n, L0, sigma, DK0)
            assert abs(mean - ana) < 5.0 * se

    def test_chirp_correlator_is_product(self):
        zp = 2.5e6 / DK0
        val = xcorr_chirp(2e4, -1e4, 700, L0, zp, DK0)
        want = f_chirp(2e4, 700, L0, zp, DK0) * np.conj(
            f_chirp(-1e4, 700, L0, zp, DK0))
        assert val == pytest.approx(want, rel=1e-12)


class TestHelpers:
    def test_characteristic_g(self):
        assert characteristic_g(0.0, 2e-6) == 1.0
        dk = 3e5
        assert characteristic_g(dk, 2e-6) == pytest.approx(
            np.exp(-(2e-6) ** 2 * dk ** 2 / 4.0), rel=1e-14)

    def test_h_factor_magnitude(self):
        h = h_factor(5e4, L0, 2e-6, DK0)
        assert abs(h) == pytest.approx(characteristic_g(DK0 + 5e4, 2e-6),
                                       rel=1e-14)

    def test_geom_sum_branches(self):
        m = 57
        q = 1.0 + 5e-7  # series branch
        brute = np.sum(q ** np.arange(m))
        assert _geom_sum(q, m) == pytest.approx(brute, rel=1e-12)
        q = 0.9 + 0.1j
        brute = np.sum(q ** np.arange(m))
        assert _geom_sum(q, m) == pytest.approx(brute, rel=1e-12)

    def test_dirichlet_periods(self):
        m = 41
        for k in (0, 1, 2, 3):
            x = 2.0 * np.pi * k + 1e-9
            brute = np.sum(np.exp(1j * np.arange(m) * (2.0 * np.pi * k + 1e-9)))
            assert _dirichlet(x, m) == pytest.approx(brute, rel=1e-6)
        x = 0.37
        brute = np.sum(np.exp(1j * np.arange(m) * x))
        assert _dirichlet(x, m) == pytest.approx(brute, rel=1e-12)


@given(dk=st.floats(-3e5, 3e5), sigma_um=st.floats(0.0, 3.0))
@settings(max_examples=60, deadline=None)
def test_ensemble_means_nonnegative(dk, sigma_um):
    sigma = sigma_um * 1e-6
    assert avg_f2_rps(dk, 300, L0, sigma, DK0) >= 0.0
    assert avg_f2_weak(dk, 300, L0, sigma, DK0) >= 0.0


@given(dk=st.floats(-3e5, 3e5))
@settings(max_examples=30, deadline=None)
def test_disorder_never_raises_peak(dk):
    # disorder redistributes, never exceeds the ordered-structure bound
    bound = 4.0 * 301 ** 2 / (DK0 + dk) ** 2
    assert avg_f2_rps(dk, 300, L0, 2e-6, DK0) <= bound * (1 + 1e-9)
