import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from optomech.evolution import (
    NegativeRadicandWarning,
    block_arrays,
    build_block,
    closed_form_coeffs,
    closed_form_parameters,
    heff_operator_terms,
    ode_oracle,
    propagate,
    propagate_series,
)
from optomech.model import Coherent, CouplingKind, Custom, EffOrder, SystemParams, eval_coupling, initial_state

KINDS = [
    CouplingKind.constant(),
    CouplingKind.sqrt_n(),
    CouplingKind.inv_sqrt_n(),
    CouplingKind.kappa_deformed(0.5),
]
ORDERS = [EffOrder.FIRST_ORDER, EffOrder.FULL]


def _idx(n_mirror, n, k, atom):
    return (n * n_mirror + k) * 2 + (0 if atom == "e" else 1)


@pytest.mark.parametrize("kind", KINDS, ids=lambda k: k.variant.value)
@pytest.mark.parametrize("order", ORDERS, ids=lambda o: o.value)
def test_support_closure(kind, order):
    """H maps each family state of index n <= 20 back into its own block."""
    n_field, n_mirror = 24, 3
    p = SystemParams(coupling=kind, eff_order=order)
    h = sum(m for _, m in heff_operator_terms(p, n_field, n_mirror))
    for n in range(21):
        allowed = {_idx(n_mirror, n, 0, "e"), _idx(n_mirror, n, 0, "g")}
        if n >= 1:
            allowed.add(_idx(n_mirror, n - 1, 1, "e"))
        e_vec = h[:, _idx(n_mirror, n, 0, "e")]
        assert set(np.flatnonzero(np.abs(e_vec) > 0)) <= {_idx(n_mirror, n, 0, "e")}
        for col in allowed:
            out = np.flatnonzero(np.abs(h[:, col]) > 0)
            assert set(out) <= allowed, (n, col)


@pytest.mark.parametrize("kind", KINDS, ids=lambda k: k.variant.value)
@pytest.mark.parametrize("order", ORDERS, ids=lambda o: o.value)
def test_block_arrays_match_operator_strings(kind, order):
    p = SystemParams(coupling=kind, eff_order=order)
    arr = block_arrays(p, 20)
    for n in range(21):
        blk = build_block(p, n)
        assert arr.E_e[n] == pytest.approx(blk.e_block, rel=1e-13, abs=1e-9)
        assert arr.E_g[n] == pytest.approx(blk.gc_block[0, 0].real, rel=1e-13, abs=1e-9)
        if n:
            assert arr.E_c[n] == pytest.approx(blk.gc_block[1, 1].real, rel=1e-13, abs=1e-9)
            assert arr.s[n] == pytest.approx(blk.coupling.real, rel=1e-13)
            assert blk.gc_block[0, 1] == pytest.approx(blk.gc_block[1, 0])


def test_first_order_energies_frozen():
    # Omega = G = 1e6, omega_m = 1e9: x = k = 1e3 Hz
    arr = block_arrays(SystemParams(), 3)
    np.testing.assert_allclose(arr.E_e, [1e3, -1e3, -5e3, -11e3])
    np.testing.assert_allclose(arr.E_g, [0.0, 0.0, -2e3, -6e3])
    np.testing.assert_allclose(arr.E_c[1:], [1e3, -1e3, -5e3])
    np.testing.assert_allclose(arr.s, [0, 1e3, 1e3 * math.sqrt(2), 1e3 * math.sqrt(3)])


def test_propagate_matches_dense_expm():
    p = SystemParams(coupling=CouplingKind.sqrt_n(), phi=0.7)
    n_max = 16
    s0 = initial_state(p, Coherent(1.2), n_max=n_max)
    n_field, n_mirror = n_max + 3, 3
    h = sum(m for _, m in heff_operator_terms(p, n_field, n_mirror))
    psi0 = np.zeros(h.shape[0], dtype=complex)
    t0 = s0.as_tensor()
    for n in range(n_max + 1):
        for k in range(2):
            for a in range(2):
                psi0[(n * n_mirror + k) * 2 + a] = t0[n, k, a]
    tau = 3.3
    psi = expm(-1j * h * p.seconds(tau)) @ psi0
    t1 = propagate(s0, tau, p).as_tensor()
    for n in range(n_max + 1):
        for k in range(2):
            for a in range(2):
                assert abs(psi[(n * n_mirror + k) * 2 + a] - t1[n, k, a]) < 1e-11


@pytest.mark.parametrize("kind", KINDS, ids=lambda k: k.variant.value)
def test_unitarity_and_composition(kind):
    p = SystemParams(coupling=kind, phi=math.pi / 4)
    s0 = initial_state(p, Coherent(5.0))
    for s in propagate_series(s0, np.linspace(0, 10, 21), p):
        assert abs(s.norm() - 1) < 1e-12
    direct = propagate(s0, 7.0, p)
    composed = propagate(propagate(s0, 3.0, p), 7.0, p)
    np.testing.assert_allclose(composed.B, direct.B, atol=1e-11)
    np.testing.assert_allclose(composed.C, direct.C, atol=1e-11)
    back = propagate(direct, 0.0, p)
    np.testing.assert_allclose(back.A, s0.A, atol=1e-11)
    np.testing.assert_allclose(back.C, 0, atol=1e-11)


def test_zero_time_is_identity():
    p = SystemParams()
    s0 = initial_state(p, Coherent(1.0))
    assert propagate(s0, 0.0, p) is s0


def test_decoupled_when_omega_zero():
    p = SystemParams(Omega=0.0)
    s = propagate(initial_state(p, Coherent(2.0)), 4.0, p)
    assert np.all(s.C == 0)
    np.testing.assert_allclose(np.abs(s.B), 1.0, atol=1e-14)


@settings(max_examples=25, deadline=None)
@given(amps=st.lists(st.complex_numbers(max_magnitude=1, allow_nan=False, allow_infinity=False), min_size=2, max_size=12),
       tau=st.floats(0, 20), phi=st.floats(0, math.pi))
def test_norm_property(amps, tau, phi):
    if sum(abs(a) for a in amps) < 1e-3:
        return
    p = SystemParams(phi=phi, coupling=CouplingKind.kappa_deformed(0.3))
    s = propagate(initial_state(p, Custom(tuple(amps))), tau, p)
    assert abs(s.norm() - 1) < 1e-12


class TestClosedForm:
    @pytest.mark.parametrize("kind", KINDS, ids=lambda k: k.variant.value)
    @pytest.mark.parametrize("order", ORDERS, ids=lambda o: o.value)
    def test_rederived_matches_propagation(self, kind, order):
        p = SystemParams(coupling=kind, eff_order=order, phi=0.9)
        s0 = initial_state(p, Coherent(2.0))
        tau = 4.7
        s = propagate(s0, tau, p)
        for n in range(s0.n_max + 1):
            A, B, C = closed_form_coeffs(p, n, p.seconds(tau))
            assert abs(A - s.A[n]) < 1e-10
            assert abs(B - s.B[n]) < 1e-10
            assert abs(C - s.C[n]) < 1e-10

    def test_printed_form_rates_agree_with_full_order(self):
        # at f = 1 the printed frequencies coincide with the full-order block
        p = SystemParams(eff_order=EffOrder.FULL)
        for n in (1, 3, 10):
            a = closed_form_parameters(p, n, "as_printed")
            b = closed_form_parameters(p, n, "rederived")
            assert a.gamma1 == pytest.approx(b.gamma1)
            assert a.gamma2 == pytest.approx(b.gamma2)
            assert a.R == pytest.approx(b.R)
            assert a.Delta_c == pytest.approx(b.Delta_c)
            # the printed detuning term carries the opposite sign
            assert a.Delta_b == pytest.approx(-b.Delta_b)

    def test_printed_form_differs_only_in_b(self):
        p = SystemParams(eff_order=EffOrder.FULL)
        t = p.seconds(1.0)
        _, Bp, Cp = closed_form_coeffs(p, 3, t, "as_printed")
        _, Br, Cr = closed_form_coeffs(p, 3, t, "rederived")
        assert Cp == pytest.approx(Cr)
        assert abs(Bp - Br) > 1e-3
        # |B|^2 + |C|^2 still sums to sin^2(phi) since only the sign of a real
        # rotation component flips
        assert abs(Bp) ** 2 + abs(Cp) ** 2 == pytest.approx(1.0)

    @settings(max_examples=60, deadline=None)
    @given(g=st.floats(1e4, 1e7), om=st.floats(0, 1e7), n=st.integers(1, 200),
           kind=st.sampled_from(KINDS))
    def test_printed_radicand_is_a_sum_of_squares(self, g, om, n, kind):
        # (G^2 (n - 1/2) - Omega^2 n)^2 + G^2 Omega^2 n f(n)^2
        p = SystemParams(G=g, Omega=om, omega_m=1e9, coupling=kind)
        cf = closed_form_parameters(p, n, "as_printed")
        assert not cf.radicand_negative
        r_hz = cf.R.real * 1e9
        sf2 = 1.0 if kind.variant.value == "inv_sqrt" else n * eval_coupling(kind, n) ** 2
        ref = (g**2 * (n - 0.5) - om**2 * n) ** 2 + g**2 * om**2 * sf2
        # the printed expression subtracts large products, so it loses digits
        assert r_hz == pytest.approx(math.sqrt(ref), rel=1e-6)

    def test_negative_radicand_flag_warns(self, monkeypatch):
        import dataclasses
        import optomech.evolution as ev

        p = SystemParams()
        real = ev.closed_form_parameters
        monkeypatch.setattr(
            ev, "closed_form_parameters",
            lambda *a, **k: dataclasses.replace(real(*a, **k), radicand_negative=True),
        )
        with pytest.warns(NegativeRadicandWarning):
            closed_form_coeffs(p, 2, 1e-4, "as_printed")

    def test_n_zero(self):
        p = SystemParams(phi=0.4)
        A, B, C = closed_form_coeffs(p, 0, p.seconds(2.0))
        assert abs(A) == pytest.approx(math.cos(0.4))
        assert abs(B) == pytest.approx(math.sin(0.4))
        assert C == 0


class TestRK4Oracle:
    def test_agrees_with_propagation(self):
        p = SystemParams(coupling=CouplingKind.kappa_deformed(0.5))
        s0 = initial_state(p, Coherent(2.0))
        exact = propagate(s0, 2.0, p)
        rk = ode_oracle(s0, p, 2.0, 4000)
        for x, y in ((exact.A, rk.A), (exact.B, rk.B), (exact.C, rk.C)):
            assert np.max(np.abs(x - y)) < 1e-8

    def test_fourth_order_convergence(self):
        p = SystemParams()
        s0 = initial_state(p, Coherent(2.0))
        exact = propagate(s0, 2.0, p)

        def err(steps):
            rk = ode_oracle(s0, p, 2.0, steps)
            return max(np.max(np.abs(exact.B - rk.B)), np.max(np.abs(exact.C - rk.C)))

        ratio = err(200) / err(400)
        assert 14 < ratio < 18

    def test_rejects_bad_steps(self):
        p = SystemParams()
        s0 = initial_state(p, Coherent(1.0))
        with pytest.raises(ValueError):
            ode_oracle(s0, p, 1.0, 0)
