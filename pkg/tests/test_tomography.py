import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from optomech.evolution import propagate
from optomech.model import Coherent, Custom, SystemParams, initial_state
from optomech.observables import reduced_rho_field
from optomech.tomography import (
    GAUSS_ENTROPY,
    Tomogram,
    default_theta_axis,
    default_x_axis,
    eur_margin,
    hermite_function,
    hermite_functions,
    mixed_state_tomogram,
    operator_quadrature_moments,
    pure_state_tomogram,
    quadrature_moment,
    quadrature_variance,
    squeezing_flags,
    state_tomogram,
    tomogram_slice,
    tomographic_entropy,
)


def _mp_hermite_function(n, x):
    mpmath.mp.dps = 50
    x = mpmath.mpf(x)
    val = mpmath.hermite(n, x) * mpmath.exp(-x * x / 2) / mpmath.sqrt(2**n * mpmath.factorial(n) * mpmath.sqrt(mpmath.pi))
    return float(val)


class TestHermite:
    @pytest.mark.parametrize("n,x", [(0, 0.0), (1, 0.5), (25, 1.3), (60, -4.2), (200, 15.0)])
    def test_against_mpmath(self, n, x):
        assert hermite_function(n, x) == pytest.approx(_mp_hermite_function(n, x), rel=1e-10, abs=1e-300)

    def test_extreme_argument_underflows_cleanly(self):
        v = hermite_functions(10, np.array([60.0]))
        assert np.all(np.isfinite(v))

    def test_orthonormal(self):
        x = np.linspace(-12, 12, 4001)
        psi = hermite_functions(20, x)
        gram = integrate.simpson(psi[:, None, :] * psi[None, :, :], x=x, axis=-1)
        np.testing.assert_allclose(gram, np.eye(21), atol=1e-10)


class TestTomograms:
    def test_vacuum_is_gaussian(self):
        x = np.linspace(-3, 3, 13)
        ref = np.exp(-x**2) / math.sqrt(math.pi)
        np.testing.assert_allclose(pure_state_tomogram([1.0], x, 0.7), ref, atol=1e-14)

    def test_coherent_mean_rotates(self):
        n = np.arange(40)
        alpha = 2.0
        c = np.exp(-alpha**2 / 2) * alpha**n / np.array([math.sqrt(math.factorial(k)) for k in n])
        x = np.linspace(-10, 10, 4001)
        for theta in (0.0, math.pi / 3, math.pi / 2):
            w = pure_state_tomogram(c, x, theta)
            assert quadrature_moment(w, x, 1) == pytest.approx(math.sqrt(2) * alpha * math.cos(theta), abs=1e-8)
            assert quadrature_variance(w, x) == pytest.approx(0.5, abs=1e-8)

    def test_pure_and_mixed_agree(self):
        rng = np.random.default_rng(2)
        c = rng.normal(size=8) + 1j * rng.normal(size=8)
        c /= np.linalg.norm(c)
        x = np.linspace(-5, 5, 51)
        np.testing.assert_allclose(
            mixed_state_tomogram(np.outer(c, c.conj()), x, 1.1), pure_state_tomogram(c, x, 1.1), atol=1e-13
        )

    def test_mixed_rejects_non_psd(self):
        with pytest.raises(ValueError):
            mixed_state_tomogram(np.diag([-0.5, 1.5]), np.linspace(-1, 1, 5), 0.0)

    def test_state_tomogram_matches_density_matrix(self):
        p = SystemParams(phi=0.9)
        s = propagate(initial_state(p, Coherent(1.5)), 3.0, p)
        x = default_x_axis(1.5, 201)
        th = default_theta_axis(6)
        tomo = state_tomogram(s, x, th)
        rho = reduced_rho_field(s)
        for i, t in enumerate(th):
            np.testing.assert_allclose(tomo.values[i], mixed_state_tomogram(rho, x, t), atol=1e-12)
        assert tomo.source_tau == 3.0

    def test_slice_reflection(self):
        p = SystemParams()
        s = propagate(initial_state(p, Coherent(1.0 + 0.5j)), 2.0, p)
        x = np.linspace(-6, 6, 121)
        tomo = state_tomogram(s, x, default_theta_axis(4))
        t = math.pi / 4
        np.testing.assert_allclose(tomo.slice_at(t + math.pi), tomogram_slice(s, x, t + math.pi), atol=1e-12)
        with pytest.raises(KeyError):
            tomo.slice_at(0.1)

    def test_default_axes(self):
        th = default_theta_axis(181)
        assert th[0] == 0 and th[-1] < math.pi
        x = default_x_axis(5.0)
        assert x.size == 2001 and x[-1] == pytest.approx(math.sqrt(2) * 5 + 6)


class TestEntropy:
    def test_coherent_entropy(self):
        n = np.arange(60)
        alpha = 3.0 - 1.0j
        c = np.exp(-abs(alpha) ** 2 / 2) * alpha**n / np.array([math.sqrt(math.factorial(k)) for k in n])
        x = default_x_axis(abs(alpha))
        for theta in (0.0, 1.0, 2.5):
            w = pure_state_tomogram(c, x, theta)
            assert tomographic_entropy(w, x) == pytest.approx(GAUSS_ENTROPY, abs=1e-6)

    def test_vacuum_saturates_eur(self):
        x = default_x_axis(0.0)
        w = pure_state_tomogram([1.0], x, 0.0)
        s0 = tomographic_entropy(w, x)
        assert abs(eur_margin(s0, s0)) < 1e-9

    def test_unnormalised_slice(self):
        x = np.linspace(-5, 5, 101)
        with pytest.raises(ValueError):
            tomographic_entropy(0.5 * np.exp(-x**2) / math.sqrt(math.pi), x)

    def test_fock_entropy_above_vacuum(self):
        x = default_x_axis(3.0)
        w = pure_state_tomogram([0, 0, 0, 1.0], x, 0.0)
        assert tomographic_entropy(w, x) > GAUSS_ENTROPY


class TestMoments:
    def test_moment_order(self):
        with pytest.raises(ValueError):
            quadrature_moment(np.ones(3), np.arange(3.0), 0)

    @settings(max_examples=15, deadline=None)
    @given(tau=st.floats(0, 10), theta=st.floats(0, math.pi), phi=st.floats(0, math.pi))
    def test_tomogram_vs_operator_variance(self, tau, theta, phi):
        p = SystemParams(phi=phi)
        s = propagate(initial_state(p, Coherent(1.0)), tau, p)
        x = default_x_axis(1.0, 2001)
        w = tomogram_slice(s, x, theta)
        m1, m2 = operator_quadrature_moments(reduced_rho_field(s), theta)
        assert quadrature_variance(w, x) == pytest.approx(m2 - m1 * m1, abs=1e-6)

    def test_operator_moments_fock(self):
        rho = np.diag([0, 0, 1.0])
        m1, m2 = operator_quadrature_moments(rho, 0.3)
        assert m1 == pytest.approx(0.0)
        assert m2 == pytest.approx(2.5)

    def test_squeezed_vacuum_flags(self):
        # squeezed vacuum amplitudes for r = 0.5
        r = 0.5
        n = np.arange(0, 60, 2)
        c = np.zeros(60)
        log_mag = [0.5 * math.lgamma(k + 1) - (k // 2) * math.log(2) - math.lgamma(k // 2 + 1) for k in n]
        c[n] = (-np.tanh(r)) ** (n // 2) * np.exp(log_mag) / math.sqrt(math.cosh(r))
        x = default_x_axis(0.0, 2001)
        w = pure_state_tomogram(c, x, 0.0)
        var = quadrature_variance(w, x)
        assert var == pytest.approx(0.5 * math.exp(-2 * r), abs=1e-8)
        assert squeezing_flags(tomographic_entropy(w, x), var) == (True, True)
        assert squeezing_flags(GAUSS_ENTROPY, 0.5) == (False, False)


def test_per_theta_normalisation_of_evolved_state():
    p = SystemParams()
    s = propagate(initial_state(p, Coherent(5.0)), 5.0, p)
    x = default_x_axis(5.0)
    tomo = state_tomogram(s, x, default_theta_axis(12))
    for row in tomo.values:
        assert integrate.simpson(row, x=x) == pytest.approx(1.0, abs=1e-8)
    assert isinstance(tomo, Tomogram)


def test_custom_state_tomogram_nonnegative():
    s = initial_state(SystemParams(), Custom((1.0, -1.0, 0.5j)))
    tomo = state_tomogram(s, np.linspace(-5, 5, 101), default_theta_axis(8))
    assert np.all(tomo.values >= 0)


class TestReferenceExamples:
    def test_hermite_trivial(self):
        assert hermite_function(0, 0.0) == pytest.approx(math.pi ** -0.25)
        assert hermite_function(1, 0.0) == 0.0

    def test_hermite_bounded_no_overflow(self):
        x = np.linspace(-150, 150, 301)
        v = hermite_functions(10_000, x)
        assert np.all(np.isfinite(v))
        assert np.max(np.abs(v)) <= 1.0

    def test_hermite_recurrence_consistency(self):
        x = np.linspace(-3, 3, 7)
        v = hermite_functions(30, x)
        for n in range(1, 30):
            lhs = v[n + 1]
            rhs = math.sqrt(2 / (n + 1)) * x * v[n] - math.sqrt(n / (n + 1)) * v[n - 1]
            np.testing.assert_allclose(lhs, rhs, atol=1e-14)

    def test_theta_shift_covariance(self):
        rng = np.random.default_rng(8)
        c = rng.normal(size=10) + 1j * rng.normal(size=10)
        c /= np.linalg.norm(c)
        x = np.linspace(-4, 4, 33)
        n = np.arange(10)
        for t0 in rng.uniform(0, 2 * math.pi, 5):
            shifted = c * np.exp(-1j * n * t0)
            np.testing.assert_allclose(pure_state_tomogram(shifted, x, 0.3), pure_state_tomogram(c, x, 0.3 + t0), atol=1e-13)

    def test_reflection_symmetry(self):
        rng = np.random.default_rng(9)
        c = rng.normal(size=8) + 1j * rng.normal(size=8)
        c /= np.linalg.norm(c)
        x = np.linspace(-4, 4, 41)
        np.testing.assert_allclose(pure_state_tomogram(c, x, 0.5 + math.pi), pure_state_tomogram(c, -x, 0.5), atol=1e-12)

    def test_maximally_mixed_qubit(self):
        x = np.linspace(-3, 3, 13)
        psi = hermite_functions(1, x)
        for t in (0.0, 1.0):
            np.testing.assert_allclose(mixed_state_tomogram(np.eye(2) / 2, x, t), 0.5 * (psi[0] ** 2 + psi[1] ** 2), atol=1e-14)

    def test_fock_one_zero_at_origin(self):
        assert pure_state_tomogram([0, 1.0], 0.0, 0.4) == 0.0

    def test_fock_one_entropy_against_refined_grid(self):
        # Richardson extrapolation of Simpson on successively refined grids
        def ent(points):
            x = np.linspace(-12, 12, points)
            return tomographic_entropy(pure_state_tomogram([0, 1.0], x, 0.0), x)

        e1, e2 = ent(8001), ent(16001)
        ref = e2 + (e2 - e1) / 15
        x = default_x_axis(1.0)
        assert tomographic_entropy(pure_state_tomogram([0, 1.0], x, 0.0), x) == pytest.approx(ref, abs=1e-5)

    def test_coherent_eur_saturated(self):
        s = initial_state(SystemParams(), Coherent(2.0 - 1.0j))
        x = default_x_axis(math.sqrt(5))
        for t in (0.0, 0.9):
            a = tomographic_entropy(tomogram_slice(s, x, t), x)
            b = tomographic_entropy(tomogram_slice(s, x, t + math.pi / 2), x)
            assert abs(eur_margin(a, b)) < 1e-9

    def test_moment_examples(self):
        x = default_x_axis(0.0)
        w = pure_state_tomogram([1.0], x, 0.0)
        assert quadrature_moment(w, x, 2) == pytest.approx(0.5, abs=1e-10)
        s = initial_state(SystemParams(), Coherent(5.0))
        x5 = default_x_axis(5.0)
        assert quadrature_moment(tomogram_slice(s, x5, 0.0), x5, 1) == pytest.approx(math.sqrt(2) * 5, abs=1e-8)

    def test_variance_along_squeezing_run(self):
        p = SystemParams(phi=math.pi / 4)
        s = propagate(initial_state(p, Coherent(5.0)), 1.0, p)
        x = default_x_axis(5.0)
        m1, m2 = operator_quadrature_moments(reduced_rho_field(s), 0.0)
        assert quadrature_variance(tomogram_slice(s, x, 0.0), x) == pytest.approx(m2 - m1 * m1, abs=1e-6)

    def test_flag_examples(self):
        x = default_x_axis(0.0)
        w = pure_state_tomogram([1.0], x, 0.0)
        assert squeezing_flags(tomographic_entropy(w, x), quadrature_variance(w, x)) == (False, False)
        var = 0.3
        g = np.exp(-x**2 / (2 * var)) / math.sqrt(2 * math.pi * var)
        assert squeezing_flags(tomographic_entropy(g, x), quadrature_variance(g, x)) == (True, True)
        s = initial_state(SystemParams(), Coherent(5.0))
        x5 = default_x_axis(5.0)
        w5 = tomogram_slice(s, x5, 0.0)
        assert squeezing_flags(tomographic_entropy(w5, x5), quadrature_variance(w5, x5)) == (False, False)
        assert squeezing_flags(GAUSS_ENTROPY - 1e-13, 0.5, floor=0.0) == (True, False)
