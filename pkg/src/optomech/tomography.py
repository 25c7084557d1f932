"""Optical tomograms of the field and the squeezing diagnostics built on them.

The homodyne quadrature is ``X_theta = (a e^{-i theta} + a^+ e^{i theta}) / sqrt(2)``;
the vacuum has variance 1/2 and tomographic entropy ``ln(pi e) / 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .model import DensityMatrix, TripartiteState
from .observables import field_vectors

GAUSS_ENTROPY = 0.5 * math.log(math.pi * math.e)
VACUUM_VARIANCE = 0.5
SQUEEZE_FLOOR = 1e-12
_RESCALE = 1e150


def hermite_functions(n_max: int, x) -> np.ndarray:
    """Normalised Hermite functions ``psi_0 .. psi_{n_max}`` at ``x``.

    ``psi_n(x) = H_n(x) exp(-x^2/2) / sqrt(2^n n! sqrt(pi))``, computed with the
    three-term recurrence on a mantissa/log-scale pair so that neither the
    Gaussian nor the polynomial factor can under- or overflow on its own.
    Returns shape ``(n_max + 1,) + x.shape``.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    log_scale = -0.5 * x**2 - 0.25 * math.log(math.pi)
    prev = np.zeros(x.shape)
    cur = np.ones(x.shape)
    out[0] = np.exp(log_scale)
    for n in range(n_max):
        prev, cur = cur, math.sqrt(2.0 / (n + 1)) * x * cur - math.sqrt(n / (n + 1)) * prev
        big = np.abs(cur) > _RESCALE
        if big.any():
            cur = np.where(big, cur / _RESCALE, cur)
            prev = np.where(big, prev / _RESCALE, prev)
            log_scale = np.where(big, log_scale + math.log(_RESCALE), log_scale)
        with np.errstate(divide="ignore"):
            out[n + 1] = np.sign(cur) * np.exp(np.log(np.abs(cur)) + log_scale)
    return out


def hermite_function(n: int, x) -> np.ndarray | float:
    val = hermite_functions(n, x)[n]
    return float(val) if val.ndim == 0 else val


def _theta_weighted(psi: np.ndarray, theta: float) -> np.ndarray:
    n = np.arange(psi.shape[0]).reshape((-1,) + (1,) * (psi.ndim - 1))
    return psi * np.exp(-1j * n * theta)


def pure_state_tomogram(c, X, theta: float):
    """``omega(X, theta) = |sum_n c_n e^{-i n theta} psi_n(X)|^2``."""
    c = np.asarray(c, dtype=complex)
    psi = hermite_functions(c.size - 1, X)
    amp = np.tensordot(c, _theta_weighted(psi, theta), axes=1)
    return np.abs(amp) ** 2


def mixed_state_tomogram(rho_f, X, theta: float):
    """``<X, theta|rho|X, theta>`` for a field density matrix."""
    rho = rho_f.entries if isinstance(rho_f, DensityMatrix) else np.asarray(rho_f, dtype=complex)
    u = _theta_weighted(hermite_functions(rho.shape[0] - 1, X), theta)
    val = np.einsum("n...,nm,m...->...", u, rho, u.conj())
    if np.any(np.abs(val.imag) > 1e-9):
        raise ValueError("tomogram has a non-negligible imaginary part; rho is not Hermitian")
    val = val.real
    if np.any(val < -1e-6):
        raise ValueError("tomogram is negative; rho is not positive semidefinite")
    val = np.maximum(val, 0.0)
    return float(val) if val.ndim == 0 else val


@dataclass(frozen=True, eq=False)
class Tomogram:
    theta_axis: np.ndarray
    X_axis: np.ndarray
    values: np.ndarray  # shape (len(theta_axis), len(X_axis))
    source_tau: float = 0.0

    def slice_at(self, theta: float) -> np.ndarray:
        """Slice for any theta, reflecting ``omega(X, theta + pi) = omega(-X, theta)``."""
        k = theta // math.pi
        base = theta - k * math.pi
        i = int(np.argmin(np.abs(self.theta_axis - base)))
        if abs(self.theta_axis[i] - base) > 1e-12:
            raise KeyError(f"theta={theta} is not on the tomogram axis")
        row = self.values[i]
        if int(k) % 2:
            if not np.allclose(self.X_axis, -self.X_axis[::-1]):
                raise ValueError("reflection needs an X axis symmetric about 0")
            row = row[::-1]
        return row


def default_x_axis(alpha_abs: float, points: int = 2001) -> np.ndarray:
    half = math.sqrt(2.0) * abs(alpha_abs) + 6.0
    return np.linspace(-half, half, points)


def default_theta_axis(points: int = 181) -> np.ndarray:
    return np.linspace(0.0, math.pi, points, endpoint=False)


def state_tomogram(state: TripartiteState, X_axis, theta_axis) -> Tomogram:
    """Tomogram of the field of ``state`` using its rank-3 decomposition."""
    X_axis = np.asarray(X_axis, dtype=float)
    theta_axis = np.asarray(theta_axis, dtype=float)
    vecs = field_vectors(state)
    psi = hermite_functions(state.n_max, X_axis)
    n = np.arange(state.n_max + 1)
    ph = np.exp(-1j * np.outer(theta_axis, n))
    vals = np.zeros((theta_axis.size, X_axis.size))
    for v in vecs:
        vals += np.abs((ph * v) @ psi) ** 2
    return Tomogram(theta_axis, X_axis, vals, source_tau=state.tau)


def tomogram_slice(state: TripartiteState, X_axis, theta: float) -> np.ndarray:
    return state_tomogram(state, X_axis, [theta]).values[0]


def _simpson(y, x):
    return float(integrate.simpson(y, x=x))


def tomographic_entropy(slice_values, X_axis, norm_tol: float = 1e-6) -> float:
    """``-int omega ln omega dX`` by composite Simpson on the sample grid."""
    w = np.asarray(slice_values, dtype=float)
    x = np.asarray(X_axis, dtype=float)
    total = _simpson(w, x)
    if abs(total - 1.0) > norm_tol:
        raise ValueError(f"tomogram slice integrates to {total:.9f}, not 1")
    integrand = np.zeros_like(w)
    pos = w > 1e-300
    integrand[pos] = -w[pos] * np.log(w[pos])
    return _simpson(integrand, x)


def eur_margin(S_theta: float, S_theta_perp: float) -> float:
    """Excess over the entropic uncertainty bound ``S(t) + S(t + pi/2) >= ln(pi e)``."""
    return S_theta + S_theta_perp - math.log(math.pi * math.e)


def quadrature_moment(slice_values, X_axis, k: int) -> float:
    if k < 1:
        raise ValueError("moment order must be >= 1")
    x = np.asarray(X_axis, dtype=float)
    return _simpson(x**k * np.asarray(slice_values, dtype=float), x)


def quadrature_variance(slice_values, X_axis) -> float:
    """``m2 - m1^2``, evaluated as the centred moment to avoid cancellation."""
    x = np.asarray(X_axis, dtype=float)
    w = np.asarray(slice_values, dtype=float)
    m1 = quadrature_moment(w, x, 1)
    return _simpson((x - m1) ** 2 * w, x)


def operator_quadrature_moments(rho_f, theta: float):
    """``(<X_theta>, <X_theta^2>)`` from ladder-operator matrix elements."""
    rho = rho_f.entries if isinstance(rho_f, DensityMatrix) else np.asarray(rho_f, dtype=complex)
    dim = rho.shape[0]
    a = np.diag(np.sqrt(np.arange(1, dim)), 1)
    ea = np.exp(-1j * theta) * a
    # keep X^2 exact on the truncated space: a a^+ needs the level above the cutoff
    big = np.zeros((dim + 1, dim + 1), dtype=complex)
    big[:dim, :dim] = rho
    ab = np.diag(np.sqrt(np.arange(1, dim + 1)), 1) * np.exp(-1j * theta)
    xb = (ab + ab.conj().T) / math.sqrt(2.0)
    x = (ea + ea.conj().T) / math.sqrt(2.0)
    m1 = np.trace(rho @ x).real
    m2 = np.trace(big @ xb @ xb).real
    return float(m1), float(m2)


def squeezing_flags(S_theta: float, variance: float, floor: float = SQUEEZE_FLOOR):
    """``(entropic, quadrature)`` squeezing indicators, strict inequalities.

    ``floor`` lowers both reference lines by the quadrature round-off level so
    that minimum-uncertainty states are not flagged by noise; ``floor=0``
    gives the bare thresholds.
    """
    return bool(S_theta < GAUSS_ENTROPY - floor), bool(variance < VACUUM_VARIANCE - floor)
