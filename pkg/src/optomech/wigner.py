"""Wigner function of the field.

Phase-space convention: ``alpha = alpha1 + i alpha2`` with
``W(alpha) = (2/pi) sum_n (-1)^n <n;alpha|rho|n;alpha>``, so that the vacuum
is ``(2/pi) exp(-2|alpha|^2)`` and ``W`` integrates to one over
``d alpha1 d alpha2``. Position and momentum are ``q = sqrt(2) alpha1``,
``p = sqrt(2) alpha2``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.interpolate import RectBivariateSpline

from .model import DensityMatrix, TripartiteState
from .observables import reduced_rho_field

W_BOUND = 2.0 / math.pi
SERIES_TOL = 1e-12
DEFAULT_SPACING = 0.05


class WignerConsistencyError(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# displacement operator matrix elements
# ---------------------------------------------------------------------------


def _scaled_laguerre(m: int, k: int, x: float):
    """``L_m^k(x)`` as ``(value, log_scale)`` with ``L = value * exp(log_scale)``."""
    scale = 0.0
    prev, cur = 0.0, 1.0
    for j in range(m):
        prev, cur = cur, ((2 * j + 1 + k - x) * cur - (j + k) * prev) / (j + 1)
        big = abs(cur)
        if big > 1e200:
            prev /= big
            cur /= big
            scale += math.log(big)
    return cur, scale


def displaced_number_element(n: int, m: int, alpha: complex) -> complex:
    """``<n|D(alpha)|m>`` from the associated-Laguerre closed form."""
    if n < 0 or m < 0:
        raise ValueError("Fock indices must be non-negative")
    alpha = complex(alpha)
    x = abs(alpha) ** 2
    if n >= m:
        lo, d, z = m, n - m, alpha
    else:
        lo, d, z = n, m - n, -alpha.conjugate()
    lag, scale = _scaled_laguerre(lo, d, x)
    if lag == 0.0:
        return 0j
    if d > 0 and z == 0:
        return 0j
    log_mag = -0.5 * x + 0.5 * (math.lgamma(lo + 1) - math.lgamma(lo + d + 1)) + scale + math.log(abs(lag))
    if d > 0:
        log_mag += d * math.log(abs(z))
    phase = (z / abs(z)) ** d if d > 0 else 1.0
    return math.copysign(1.0, lag) * math.exp(log_mag) * phase


def _lower_diagonals(beta, size):
    """Yield diagonals ``d`` of the lower triangle of ``<n|D(beta)|m>``.

    Diagonal ``d`` holds ``<m+d|D|m>`` for ``m = 0 .. size-d-1`` and has shape
    ``(size - d,) + beta.shape``. The Laguerre recurrence in degree is run on
    the fully normalised matrix elements, which are bounded by one in
    modulus, so no intermediate can overflow.
    """
    beta = np.asarray(beta, dtype=complex)
    x = np.abs(beta) ** 2
    first = np.exp(-0.5 * x)  # <d|D|0> for d = 0
    for d in range(size):
        if d > 0:
            first = first * beta / math.sqrt(d)
        diag = np.empty((size - d,) + beta.shape, dtype=complex)
        diag[0] = first
        if size - d > 1:
            diag[1] = first * (1 + d - x) / math.sqrt(1 + d)
        for m in range(1, size - d - 1):
            diag[m + 1] = ((2 * m + 1 + d - x) * diag[m] - math.sqrt(m * (m + d)) * diag[m - 1]) / math.sqrt(
                (m + 1) * (m + 1 + d)
            )
        yield diag


def displacement_matrix(beta: complex, n_rows: int, n_cols: int) -> np.ndarray:
    """Block ``<n|D(beta)|m>`` for ``n < n_rows``, ``m < n_cols``."""
    size = max(n_rows, n_cols)
    full = np.zeros((size, size), dtype=complex)
    idx = np.arange(size)
    for d, diag in enumerate(_lower_diagonals(complex(beta), size)):
        full[idx[d:], idx[: size - d]] = diag
    d = np.arange(size)
    sign = (-1.0) ** (d[None, :] - d[:, None])
    upper = np.triu(sign * full.T.conj(), 1)
    full = np.tril(full) + upper
    return full[:n_rows, :n_cols]


# ---------------------------------------------------------------------------
# pointwise Wigner function
# ---------------------------------------------------------------------------


def _field_input(obj):
    if isinstance(obj, TripartiteState):
        return reduced_rho_field(obj).entries
    if isinstance(obj, DensityMatrix):
        return obj.entries
    return np.asarray(obj, dtype=complex)


def series_cap(n_max: int, alpha: complex) -> int:
    """Hard cap on the alternating series.

    ``4 n_max`` suffices near the state; far from it the displaced vectors
    reach up to roughly ``(|alpha| + sqrt(n_max))^2`` quanta, so the cap grows
    with the distance from the origin.
    """
    reach = (abs(alpha) + math.sqrt(n_max) + 6.0) ** 2
    return max(4 * max(n_max, 1), int(math.ceil(reach)))


def wigner_at(state, alpha: complex, cutoff: int | None = None) -> float:
    """Wigner function at one phase-space point by the displaced-number series.

    ``state`` is a :class:`TripartiteState` or a field density matrix. The
    alternating sum runs at least to the Fock cutoff of the state, then stops
    once two successive partial sums differ by less than ``1e-12``;
    ``cutoff`` caps it (default :func:`series_cap`).
    """
    rho = _field_input(state)
    n_max = rho.shape[0] - 1
    if cutoff is None:
        cutoff = series_cap(n_max, alpha)
    if cutoff < n_max:
        raise ValueError("series cutoff must be at least the Fock cutoff")
    m = displacement_matrix(-complex(alpha), cutoff + 1, n_max + 1)
    total = 0.0 + 0.0j
    converged = False
    for n in range(cutoff + 1):
        row = m[n]
        term = (-1) ** n * (row @ rho @ row.conj())
        total += term
        if n >= n_max and abs(term) < SERIES_TOL:
            converged = True
            break
    if not converged:
        warnings.warn(f"Wigner series not converged at cutoff {cutoff}", RuntimeWarning, stacklevel=2)
    w = 2.0 / math.pi * total
    if abs(w.imag) > 1e-6:
        raise WignerConsistencyError(f"Wigner value has imaginary residue {w.imag:.3e}")
    return float(w.real)


def _trim(rho: np.ndarray, tail: float = 1e-26) -> np.ndarray:
    # drop trailing Fock levels whose total population is negligible
    pop = np.cumsum(np.abs(np.diagonal(rho))[::-1])[::-1]
    keep = int(np.count_nonzero(pop > tail))
    keep = max(keep, 1)
    return rho[:keep, :keep]


def wigner_values(state, alpha, chunk: int = 40000) -> np.ndarray:
    """Wigner function on an array of points.

    Uses ``D(a) P D(a)^+ = D(2a) P`` with ``P`` the photon-number parity,
    which turns the infinite alternating series into a finite trace over the
    Fock cutoff of the state. Agrees with :func:`wigner_at` to rounding.
    """
    rho = _trim(_field_input(state))
    alpha = np.asarray(alpha, dtype=complex)
    flat = alpha.ravel()
    out = np.empty(flat.size)
    for start in range(0, flat.size, chunk):
        out[start : start + chunk] = _parity_trace(rho, 2.0 * flat[start : start + chunk])
    return out.reshape(alpha.shape)


def _parity_trace(rho, beta):
    """``(2/pi) Tr[rho D(beta) P]`` for an array of ``beta``.

    Along diagonal ``d`` the elements ``<m+d|D|m>`` factor into
    ``beta^d e^{-x/2} / sqrt(d!)`` times a real Laguerre-type sequence in ``m``
    (``x = |beta|^2``); the exponential is split between the two factors so
    that neither leaves the double range for ``|beta|`` up to about 50.
    """
    size = rho.shape[0]
    x = np.abs(beta) ** 2
    quarter = np.exp(-0.25 * x)
    first = quarter.astype(complex)
    acc = np.zeros(beta.shape)
    for d in range(size):
        if d > 0:
            first = first * beta / math.sqrt(d)
        coef = (-1.0) ** np.arange(size - d) * np.diagonal(rho, offset=d)
        prev = quarter
        sum_re = coef[0].real * prev
        sum_im = coef[0].imag * prev
        if size - d > 1:
            cur = quarter * ((1 + d) - x) / math.sqrt(1 + d)
            sum_re = sum_re + coef[1].real * cur
            sum_im = sum_im + coef[1].imag * cur
            for m in range(1, size - d - 1):
                a = 1.0 / math.sqrt((m + 1) * (m + 1 + d))
                prev, cur = cur, ((2 * m + 1 + d) * a - a * x) * cur - (math.sqrt(m * (m + d)) * a) * prev
                sum_re += coef[m + 1].real * cur
                sum_im += coef[m + 1].imag * cur
        term = first.real * sum_re - first.imag * sum_im
        acc += term if d == 0 else 2.0 * term
    return 2.0 / math.pi * acc


@dataclass(frozen=True, eq=False)
class WignerGrid:
    alpha1_axis: np.ndarray
    alpha2_axis: np.ndarray
    values: np.ndarray  # shape (len(alpha2_axis), len(alpha1_axis))
    series_cutoff: int

    def integral(self) -> float:
        return float(integrate.trapezoid(integrate.trapezoid(self.values, self.alpha1_axis, axis=1), self.alpha2_axis))

    @property
    def spacing(self) -> float:
        return float(self.alpha1_axis[1] - self.alpha1_axis[0])


def default_axis(alpha_abs: float, spacing: float = DEFAULT_SPACING) -> np.ndarray:
    """Symmetric axis with exact ``spacing`` covering at least ``|alpha| + 5``."""
    k = int(math.ceil((abs(alpha_abs) + 5.0) / spacing - 1e-9))
    return spacing * np.arange(-k, k + 1)


def wigner_grid(state, alpha1_axis=None, alpha2_axis=None, alpha_abs: float | None = None) -> WignerGrid:
    """Sample the Wigner function on a rectangular grid (rows follow ``alpha2``)."""
    rho = _field_input(state)
    if alpha1_axis is None or alpha2_axis is None:
        if alpha_abs is None:
            n = np.arange(rho.shape[0])
            alpha_abs = math.sqrt(max(float(np.real(np.trace(rho * n))), 0.0))
        axis = default_axis(alpha_abs)
        alpha1_axis = axis if alpha1_axis is None else alpha1_axis
        alpha2_axis = axis if alpha2_axis is None else alpha2_axis
    a1 = np.asarray(alpha1_axis, dtype=float)
    a2 = np.asarray(alpha2_axis, dtype=float)
    pts = a1[None, :] + 1j * a2[:, None]
    return WignerGrid(a1, a2, wigner_values(rho, pts), rho.shape[0] - 1)


def negativity_volume(grid: WignerGrid) -> float:
    neg = np.maximum(0.0, -grid.values)
    return float(integrate.trapezoid(integrate.trapezoid(neg, grid.alpha1_axis, axis=1), grid.alpha2_axis))


# ---------------------------------------------------------------------------
# oracles and the Radon transform
# ---------------------------------------------------------------------------


def wigner_direct_oracle(rho_f, p: float, q: float, limit: float | None = None) -> float:
    """Wigner function from the position-representation integral.

    Evaluates ``(1/pi) int <q+y|rho|q-y> exp(-2ipy) dy`` by adaptive quadrature
    and rescales to the ``alpha`` convention (``alpha = (q + ip)/sqrt(2)``).
    Slow; meant for tests.
    """
    from .tomography import hermite_functions

    rho = _field_input(rho_f)
    n_max = rho.shape[0] - 1
    if limit is None:
        limit = math.sqrt(2 * n_max + 1) + 8.0 + abs(q)

    def kernel(y):
        u = hermite_functions(n_max, np.array([q + y, q - y]))
        return (u[:, 0] @ rho @ u[:, 1]) * np.exp(-2j * p * y)

    opts = dict(limit=400, epsabs=1e-13, epsrel=1e-12, full_output=1)
    re = integrate.quad(lambda y: kernel(y).real, -limit, limit, **opts)
    im = integrate.quad(lambda y: kernel(y).imag, -limit, limit, **opts)
    for res in (re, im):
        if len(res) > 3 and res[1] > 1e-8:
            raise ArithmeticError(f"quadrature did not converge: {res[3]}")
    w_qp = (re[0] + 1j * im[0]) / math.pi
    if abs(w_qp.imag) > 1e-6:
        raise WignerConsistencyError("direct Wigner integral is not real")
    return 2.0 * w_qp.real


def radon_slice(grid: WignerGrid, theta: float, X_values) -> np.ndarray:
    """Homodyne distribution ``omega(X, theta)`` as line integrals of the grid.

    Integrates ``W`` along ``q cos(theta) + p sin(theta) = X`` using a bicubic
    spline of the sampled values; the grid must cover the support of ``W``.
    """
    X = np.atleast_1d(np.asarray(X_values, dtype=float))
    a1, a2 = grid.alpha1_axis, grid.alpha2_axis
    spline = RectBivariateSpline(a2, a1, grid.values, kx=3, ky=3)
    c, s = math.cos(theta), math.sin(theta)
    h = grid.spacing
    reach = math.hypot(max(abs(a1[0]), abs(a1[-1])), max(abs(a2[0]), abs(a2[-1])))
    u = np.arange(-reach, reach + h / 2, h)
    out = np.empty(X.size)
    for i, x in enumerate(X):
        r = x / math.sqrt(2.0)
        x1 = r * c - u * s
        x2 = r * s + u * c
        inside = (x1 >= a1[0]) & (x1 <= a1[-1]) & (x2 >= a2[0]) & (x2 <= a2[-1])
        if not inside.any() or not (a1[0] <= r * c <= a1[-1] and a2[0] <= r * s <= a2[-1]):
            raise ValueError(f"X={x} lies outside the Wigner grid support")
        vals = np.zeros(u.size)
        vals[inside] = spline.ev(x2[inside], x1[inside])
        out[i] = integrate.trapezoid(vals, u) / math.sqrt(2.0)
    return out
