"""Exact evolution under the effective Hamiltonian.

The effective Hamiltonian conserves the excitation structure of the initial
product state: for each photon number ``n`` the state ``|n;0;e>`` only picks
up a phase, while ``|n;0;g>`` and ``|n-1;1;e>`` form a closed 2x2 block.
Propagation therefore reduces to a stack of 2x2 unitaries.
"""

from __future__ import annotations

import cmath
import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .model import (
    EffOrder,
    SystemParams,
    TripartiteState,
    coupling_product,
    coupling_squared,
    eval_coupling,
)


class ClosedFormMode(str, enum.Enum):
    AS_PRINTED = "as_printed"
    REDERIVED = "rederived"


class NegativeRadicandWarning(RuntimeWarning):
    """The literature-form Rabi frequency has a negative radicand for this sample."""


# ---------------------------------------------------------------------------
# operator-level construction
# ---------------------------------------------------------------------------


def _ladder(dim):
    return np.diag(np.sqrt(np.arange(1, dim)), 1)


def heff_operator_terms(params: SystemParams, n_field: int, n_mirror: int = 3):
    """Operator strings of the effective Hamiltonian on a truncated product space.

    Space ordering is field (``n_field`` levels) x mirror (``n_mirror``) x atom
    (e, g). Returns a list of ``(label, matrix)`` with the prefactors applied;
    their sum is the Hamiltonian in Hz.
    """
    a = _ladder(n_field)
    b = _ladder(n_mirror)
    num = np.diag(np.arange(n_field, dtype=float))
    fdiag = np.zeros(n_field)
    ns = np.arange(n_field)
    if params.coupling.variant.value == "inv_sqrt":
        fdiag[1:] = eval_coupling(params.coupling, ns[1:])
    else:
        fdiag[:] = eval_coupling(params.coupling, ns)
    f = np.diag(fdiag)
    f2 = np.diag(coupling_squared(params.coupling, ns))
    sp = np.array([[0.0, 1.0], [0.0, 0.0]])  # |e><g|
    sm = sp.T
    sz = np.diag([1.0, -1.0])
    see = sp @ sm
    one_f, one_m, one_a = np.eye(n_field), np.eye(n_mirror), np.eye(2)

    def op(x, y, z):
        return np.kron(np.kron(x, y), z)

    gw, ow, wm = params.G, params.Omega, params.omega_m
    terms = [
        ("f(N) a+ b s-", gw * ow / wm * op(f @ a.T, b, sm)),
        ("a f(N) b+ s+", gw * ow / wm * op(a @ f, b.T, sp)),
        ("kerr", -gw**2 / wm * op(num @ num, one_m, one_a)),
    ]
    if params.eff_order is EffOrder.FIRST_ORDER:
        terms += [
            ("N sz", -ow**2 / wm * op(num, one_m, sz)),
            ("s+ s-", ow**2 / wm * op(one_f, one_m, see)),
        ]
    else:
        # a f^2 a+ on |n> needs level n+1: callers size n_field accordingly
        terms += [
            ("N f2 sz", -ow**2 / wm * op(num @ f2, one_m, sz)),
            ("(a f2 a+ - N f2) s+ s-", -ow**2 / wm * op(a @ f2 @ a.T - num @ f2, one_m, see)),
        ]
    return terms


def _basis_index(n_field, n_mirror, n, k, atom):
    return (n * n_mirror + k) * 2 + (0 if atom == "e" else 1)


@dataclass(frozen=True)
class BlockHamiltonian:
    """Matrix elements of the effective Hamiltonian for photon index ``n`` (Hz).

    ``gc_block`` acts on ``(|n;0;g>, |n-1;1;e>)``; for ``n = 0`` it is the 1x1
    energy of ``|0;0;g>``.
    """

    n: int
    e_block: float
    gc_block: np.ndarray

    @property
    def coupling(self) -> complex:
        return complex(self.gc_block[1, 0]) if self.n > 0 else 0.0


def build_block(params: SystemParams, n: int) -> BlockHamiltonian:
    """Apply every operator string to the three basis states of index ``n``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    n_field, n_mirror = n + 3, 3
    h = sum(m for _, m in heff_operator_terms(params, n_field, n_mirror))
    ie = _basis_index(n_field, n_mirror, n, 0, "e")
    ig = _basis_index(n_field, n_mirror, n, 0, "g")
    e_block = float(h[ie, ie].real)
    if n == 0:
        return BlockHamiltonian(0, e_block, np.array([[h[ig, ig].real]]))
    ic = _basis_index(n_field, n_mirror, n - 1, 1, "e")
    idx = [ig, ic]
    return BlockHamiltonian(n, e_block, np.array(h[np.ix_(idx, idx)], dtype=complex))


@dataclass(frozen=True)
class BlockArrays:
    """Block matrix elements for ``n = 0..n_max`` in Hz."""

    E_e: np.ndarray
    E_g: np.ndarray
    E_c: np.ndarray  # energy of |n-1;1;e>; entry 0 unused
    s: np.ndarray  # <n-1;1;e|H|n;0;g>; entry 0 is 0


def block_arrays(params: SystemParams, n_max: int) -> BlockArrays:
    n = np.arange(n_max + 1, dtype=float)
    gw, ow, wm = params.G, params.Omega, params.omega_m
    kerr = gw**2 / wm
    x = ow**2 / wm
    if params.eff_order is EffOrder.FIRST_ORDER:
        E_e = -x * (n - 1) - kerr * n**2
        E_g = x * n - kerr * n**2
        E_c = -x * (n - 2) - kerr * (n - 1) ** 2
    else:
        nf2 = n * coupling_squared(params.coupling, n)
        n1f2 = (n + 1) * coupling_squared(params.coupling, n + 1)
        E_e = -x * n1f2 - kerr * n**2
        E_g = x * nf2 - kerr * n**2
        E_c = -x * nf2 - kerr * (n - 1) ** 2
    s = gw * ow / wm * coupling_product(params.coupling, n.astype(int))
    E_c = E_c.copy()
    E_c[0] = 0.0
    return BlockArrays(E_e, E_g, E_c, np.asarray(s, dtype=float))


def block_propagators(blocks: BlockArrays, t: float):
    """Phases of the decoupled family and stacked 2x2 unitaries ``exp(-i H t)``.

    The mean diagonal is removed before the Hermitian eigendecomposition and
    restored as a global phase, which keeps large Kerr energies from eating
    into the accuracy of the mixing angle.
    """
    phase_e = np.exp(-1j * blocks.E_e * t)
    n1 = blocks.E_e.size
    mu = 0.5 * (blocks.E_g + blocks.E_c)
    mu[0] = blocks.E_g[0]
    h = np.zeros((n1, 2, 2))
    h[:, 0, 0] = blocks.E_g - mu
    h[:, 1, 1] = blocks.E_c - mu
    h[:, 0, 1] = h[:, 1, 0] = blocks.s
    h[0] = 0.0
    w, v = np.linalg.eigh(h)
    u = np.einsum("nij,nj,nkj->nik", v, np.exp(-1j * w * t), v.conj())
    u *= np.exp(-1j * mu * t)[:, None, None]
    u[0] = np.diag([np.exp(-1j * blocks.E_g[0] * t), 1.0])
    return phase_e, u


def propagate(state: TripartiteState, tau_target: float, params: SystemParams) -> TripartiteState:
    """Evolve ``state`` from ``state.tau`` to dimensionless time ``tau_target``."""
    dt = (tau_target - state.tau) * params.t_unit
    if dt == 0:
        return state
    blocks = block_arrays(params, state.n_max)
    phase_e, u = block_propagators(blocks, dt)
    A = state.A * phase_e
    B = u[:, 0, 0] * state.B + u[:, 0, 1] * state.C
    C = u[:, 1, 0] * state.B + u[:, 1, 1] * state.C
    C[0] = 0.0
    return TripartiteState(state.l, A, B, C, tau=float(tau_target))


def propagate_series(state: TripartiteState, taus, params: SystemParams):
    """States at each of ``taus`` (each evolved directly from ``state``)."""
    return [propagate(state, float(t), params) for t in taus]


# ---------------------------------------------------------------------------
# closed-form amplitudes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClosedFormCoeffs:
    """Parameters of ``A = cos(phi) e^{i g1 t}``,
    ``B = sin(phi) [cos Rt + Db sin Rt] e^{i g2 t}``, ``C = sin(phi) Dc sin(Rt) e^{i g2 t}``."""

    gamma1: float
    gamma2: float
    R: complex
    Delta_b: complex
    Delta_c: complex
    mode: ClosedFormMode
    radicand_negative: bool = False


def printed_rate_coefficients(params: SystemParams, n: int):
    """Rates ``(p, q, r, s)`` of the coupled amplitude equations in their literature form.

    Kept for comparison only; they do not follow from the effective
    Hamiltonian (see module tests).
    """
    gw, ow, wm = params.G, params.Omega, params.omega_m
    p = 1j * (gw * ow * n**2 + ow**2 * (n + 1)) / wm
    q = 1j * (gw * ow * (n - 1) ** 2 + ow**2 * n) / wm
    r = 1j * (gw**2 * n**2 - ow**2 * n) / wm
    s = -1j * gw * ow * coupling_product(params.coupling, n) / wm
    return p, q, r, s


def closed_form_parameters(params: SystemParams, n: int, mode=ClosedFormMode.REDERIVED) -> ClosedFormCoeffs:
    mode = ClosedFormMode(mode)
    if n < 1:
        raise ValueError("closed-form block parameters need n >= 1")
    gw, ow, wm = params.G, params.Omega, params.omega_m
    if mode is ClosedFormMode.AS_PRINTED:
        sf = coupling_product(params.coupling, n)  # sqrt(n) f(n)
        gamma1 = (gw**2 * n**2 + (n + 1) * ow**2) / wm
        gamma2 = gw**2 * (n**2 - n + 0.5) / wm
        rad = (
            0.25 * gw**4 * (2 * n**2 - 2 * n + 1) ** 2
            + gw**2 * ow**2 * sf**2
            - (gw**2 * (n - 1) ** 2 + ow**2 * n) * (gw**2 * n**2 - ow**2 * n)
        )
        R = cmath.sqrt(rad) / wm
        if R == 0:
            db = dc = complex("nan")
        else:
            db = -1j * (gw**2 * (n - 0.5) - ow**2 * n) / (R * wm)
            dc = -1j * gw * ow * sf / (R * wm)
        return ClosedFormCoeffs(gamma1, gamma2, R, db, dc, mode, rad < 0)

    blk = block_arrays(params, n)
    mu = 0.5 * (blk.E_g[n] + blk.E_c[n])
    delta = 0.5 * (blk.E_g[n] - blk.E_c[n])
    s = blk.s[n]
    R = math.hypot(delta, s)
    if R == 0:
        db = dc = 0.0
    else:
        db = -1j * delta / R
        dc = -1j * s / R
    return ClosedFormCoeffs(-blk.E_e[n], -mu, complex(R), complex(db), complex(dc), mode)


def _sin_over(R, t):
    # sin(R t) / R with the R -> 0 limit
    return t if R == 0 else cmath.sin(R * t) / R


def closed_form_coeffs(params: SystemParams, n: int, t: float, mode=ClosedFormMode.REDERIVED):
    """Amplitudes ``(A_n, B_n, C_n)`` at time ``t`` in seconds.

    ``as_printed`` mode warns with :class:`NegativeRadicandWarning` when the
    literature-form Rabi frequency is imaginary for this ``n``.
    """
    mode = ClosedFormMode(mode)
    cphi, sphi = math.cos(params.phi), math.sin(params.phi)
    if n == 0:
        blk = block_arrays(params, 0)
        return (cphi * cmath.exp(-1j * blk.E_e[0] * t), sphi * cmath.exp(-1j * blk.E_g[0] * t), 0j)
    cf = closed_form_parameters(params, n, mode)
    if cf.radicand_negative:
        warnings.warn(f"negative radicand in R for n={n}; using imaginary R", NegativeRadicandWarning, stacklevel=2)
    A = cphi * cmath.exp(1j * cf.gamma1 * t)
    g2 = cmath.exp(1j * cf.gamma2 * t)
    if cf.R == 0:
        return A, sphi * g2, 0j
    # Delta * sin(Rt) written through sin(Rt)/R so that R -> 0 stays finite
    B = sphi * (cmath.cos(cf.R * t) + cf.Delta_b * cf.R * _sin_over(cf.R, t)) * g2
    C = sphi * cf.Delta_c * cf.R * _sin_over(cf.R, t) * g2
    return A, B, C


# ---------------------------------------------------------------------------
# RK4 oracle
# ---------------------------------------------------------------------------


def _rk4_blocks(E_e, E_g, E_c, s, y0, h, steps):
    """Fixed-step RK4 for ``dy/dx = -i H y`` in a frame rotating at the block mean.

    ``y0`` has shape (3, n): rows A, B, C. Energies and ``h`` share units.
    Works on concatenated blocks of several runs at once.
    """
    mu = 0.5 * (E_g + E_c)
    de, dg, dc = E_e - mu, E_g - mu, E_c - mu
    a, b, c = (np.array(r, dtype=complex) for r in y0)

    def rhs(a, b, c):
        return -1j * de * a, -1j * (dg * b + s * c), -1j * (s * b + dc * c)

    half = 0.5 * h
    for _ in range(steps):
        k1 = rhs(a, b, c)
        k2 = rhs(a + half * k1[0], b + half * k1[1], c + half * k1[2])
        k3 = rhs(a + half * k2[0], b + half * k2[1], c + half * k2[2])
        k4 = rhs(a + h * k3[0], b + h * k3[1], c + h * k3[2])
        a = a + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        b = b + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        c = c + h / 6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
    x = h * steps
    rot = np.exp(-1j * mu * x)
    return a * rot, b * rot, c * rot


def _oracle_inputs(state: TripartiteState, params: SystemParams):
    blk = block_arrays(params, state.n_max)
    scale = params.G**2 / params.omega_m
    E_g, E_c = blk.E_g / scale, blk.E_c / scale
    E_c = E_c.copy()
    E_c[0] = E_g[0]  # the n = 0 block is 1x1; C_0 stays 0 because s_0 = 0
    return blk.E_e / scale, E_g, E_c, blk.s / scale


def ode_oracle(state0: TripartiteState, params: SystemParams, tau_target: float, steps: int) -> TripartiteState:
    """Integrate the coupled amplitude equations with classical RK4.

    Independent of :func:`propagate` in method (no exponentials of the block
    Hamiltonian); global error scales as ``steps**-4``. Time is integrated in
    dimensionless units.
    """
    return ode_oracle_batch([state0], [params], tau_target, steps)[0]


def ode_oracle_batch(states, params_list, tau_target: float, steps: int):
    """:func:`ode_oracle` on several (state, params) pairs integrated together.

    All states must share the same start time.
    """
    tau0 = {s.tau for s in states}
    if len(tau0) != 1:
        raise ValueError("batched states must share their start time")
    traj = ode_oracle_trajectory(states, params_list, [tau0.pop(), tau_target], steps)
    return traj[-1]


def ode_oracle_trajectory(states, params_list, taus, steps_per_interval: int):
    """RK4 states at every entry of ``taus`` (increasing, starting at the common start time).

    Each interval between consecutive samples is covered by
    ``steps_per_interval`` fixed steps, so for a uniform ``taus`` grid the
    step size is uniform too. Returns one list of states per sample.
    """
    if steps_per_interval < 1:
        raise ValueError("steps must be >= 1")
    taus = [float(t) for t in taus]
    if len({s.tau for s in states}) != 1 or states[0].tau != taus[0]:
        raise ValueError("batched states must share their start time, equal to taus[0]")
    parts = [_oracle_inputs(s, p) for s, p in zip(states, params_list)]
    E_e, E_g, E_c, sc = (np.concatenate([p[i] for p in parts]) for i in range(4))
    y = np.array([np.concatenate([getattr(s, k) for s in states]) for k in "ABC"])

    def split(y, tau):
        out, i = [], 0
        for s in states:
            j = i + s.n_max + 1
            cc = y[2][i:j].copy()
            cc[0] = 0.0
            out.append(TripartiteState(s.l, y[0][i:j], y[1][i:j], cc, tau=tau))
            i = j
        return out

    result = [list(states)]
    for t0, t1 in zip(taus[:-1], taus[1:]):
        y = np.array(_rk4_blocks(E_e, E_g, E_c, sc, y, (t1 - t0) / steps_per_interval, steps_per_interval))
        result.append(split(y, t1))
    return result
