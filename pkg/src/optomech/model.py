"""Domain types for the atom-field-mirror system.

Basis conventions used throughout the package:

* field Fock index ``n`` (photon number), mirror phonon number (0 or 1 on the
  reachable manifold) and atom level ``e``/``g``;
* the dynamics only ever couples the three families ``|n;0;e>``,
  ``|n;0;g>`` and ``|n-1;1;e>``, so a state is stored as the initial field
  weights ``l_n`` together with one complex amplitude per family and ``n``.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import pdtrc


class CouplingVariant(str, enum.Enum):
    CONSTANT = "constant"
    SQRT_N = "sqrt"
    INV_SQRT_N = "inv_sqrt"
    KAPPA = "kappa"


class EffOrder(str, enum.Enum):
    FIRST_ORDER = "first_order"
    FULL = "full"


class ParameterRegimeWarning(UserWarning):
    """The dispersive condition omega_m >> G, Omega is only weakly satisfied."""


@dataclass(frozen=True)
class CouplingKind:
    """Intensity-dependent coupling ``f(N)``."""

    variant: CouplingVariant = CouplingVariant.CONSTANT
    kappa: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "variant", CouplingVariant(self.variant))
        if not 0.0 <= self.kappa <= 1.0:
            raise ValueError(f"kappa must lie in [0, 1], got {self.kappa}")

    @classmethod
    def constant(cls):
        return cls(CouplingVariant.CONSTANT)

    @classmethod
    def sqrt_n(cls):
        return cls(CouplingVariant.SQRT_N)

    @classmethod
    def inv_sqrt_n(cls):
        return cls(CouplingVariant.INV_SQRT_N)

    @classmethod
    def kappa_deformed(cls, kappa):
        return cls(CouplingVariant.KAPPA, float(kappa))


def eval_coupling(kind: CouplingKind, n) -> np.ndarray | float:
    """Evaluate ``f(n)``; accepts a scalar or an integer array.

    ``InvSqrtN`` is undefined at ``n = 0``; callers that need the
    combination ``sqrt(n) f(n)`` should use :func:`coupling_product`.
    """
    n_arr = np.asarray(n)
    if np.any(n_arr < 0):
        raise ValueError("photon number must be non-negative")
    v = kind.variant
    if v is CouplingVariant.CONSTANT:
        out = np.ones(n_arr.shape)
    elif v is CouplingVariant.SQRT_N:
        out = np.sqrt(n_arr.astype(float))
    elif v is CouplingVariant.INV_SQRT_N:
        if np.any(n_arr == 0):
            raise ValueError("f(N) = N^(-1/2) is undefined at n = 0; use coupling_product")
        out = 1.0 / np.sqrt(n_arr.astype(float))
    else:
        if kind.kappa == 0.0:
            out = np.ones(n_arr.shape)
        else:
            out = np.sqrt(1.0 + kind.kappa * n_arr.astype(float))
    return float(out) if out.ndim == 0 else out


def coupling_product(kind: CouplingKind, n) -> np.ndarray | float:
    """``sqrt(n) f(n)``, finite for every coupling kind and zero at ``n = 0``."""
    n_arr = np.asarray(n)
    if kind.variant is CouplingVariant.INV_SQRT_N:
        out = (n_arr > 0).astype(float)
    else:
        out = np.sqrt(n_arr.astype(float)) * eval_coupling(kind, n_arr)
    return float(out) if np.ndim(out) == 0 else out


def coupling_squared(kind: CouplingKind, n) -> np.ndarray:
    """``f(n)^2`` with the n = 0 value of ``InvSqrtN`` set to 0.

    Only used where it is multiplied by ``n``, so the n = 0 entry never
    contributes.
    """
    n_arr = np.asarray(n, dtype=float)
    if kind.variant is CouplingVariant.INV_SQRT_N:
        with np.errstate(divide="ignore"):
            return np.where(n_arr > 0, 1.0 / np.where(n_arr > 0, n_arr, 1.0), 0.0)
    f = eval_coupling(kind, n_arr.astype(int))
    return np.asarray(f, dtype=float) ** 2


@dataclass(frozen=True)
class SystemParams:
    """Physical constants of the effective model (angular frequencies in Hz)."""

    omega_m: float = 1e9
    G: float = 1e6
    Omega: float = 1e6
    coupling: CouplingKind = field(default_factory=CouplingKind)
    phi: float = math.pi / 2
    eff_order: EffOrder = EffOrder.FIRST_ORDER

    def __post_init__(self):
        object.__setattr__(self, "eff_order", EffOrder(self.eff_order))
        if not self.omega_m > 0:
            raise ValueError("omega_m must be positive")
        if self.G < 0 or self.Omega < 0:
            raise ValueError("G and Omega must be non-negative")
        if self.omega_m < 10 * max(self.G, self.Omega):
            warnings.warn(
                f"omega_m={self.omega_m:g} is not much larger than max(G, Omega)="
                f"{max(self.G, self.Omega):g}; the effective Hamiltonian may be inaccurate",
                ParameterRegimeWarning,
                stacklevel=2,
            )

    @property
    def t_unit(self) -> float:
        """Seconds per unit of dimensionless time (``tau = t / t_unit``)."""
        if self.G <= 0:
            raise ValueError("dimensionless time requires G > 0")
        return self.omega_m / self.G**2

    def seconds(self, tau):
        return np.asarray(tau, dtype=float) * self.t_unit


# ---------------------------------------------------------------------------
# initial field states
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Coherent:
    alpha: complex


@dataclass(frozen=True)
class PhotonAdded:
    alpha: complex
    m: int

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("number of added photons must be non-negative")


@dataclass(frozen=True)
class Custom:
    amplitudes: tuple

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", tuple(complex(a) for a in self.amplitudes))


FieldInitialState = Coherent | PhotonAdded | Custom

DEFAULT_EPS_TRUNC = 1e-12
MIN_TRUNCATION = 16
TRUNCATION_MARGIN = 10


class TruncationError(ValueError):
    pass


def choose_truncation(alpha_abs: float, m_added: int = 0, epsilon_trunc: float = DEFAULT_EPS_TRUNC) -> int:
    """Smallest Fock cutoff whose Poisson tail mass is below ``epsilon_trunc``.

    The cutoff is shifted by ``m_added`` (photon-added states) and padded by a
    fixed safety margin, and never smaller than ``MIN_TRUNCATION``.
    """
    if not 0.0 < epsilon_trunc < 1.0:
        raise ValueError("epsilon_trunc must lie in (0, 1)")
    lam = float(alpha_abs) ** 2
    n = 0
    if lam > 0:
        # pdtrc(k, lam) = P(X > k)
        n = int(max(0.0, lam - 1))
        while pdtrc(n, lam) >= epsilon_trunc:
            n += 1
    return max(MIN_TRUNCATION, n + int(m_added) + TRUNCATION_MARGIN)


def coherent_weights(alpha: complex, n_max: int) -> np.ndarray:
    """Unnormalised coherent-state amplitudes ``l_0 .. l_{n_max}`` (log-domain)."""
    alpha = complex(alpha)
    n = np.arange(n_max + 1)
    out = np.zeros(n_max + 1, dtype=complex)
    r = abs(alpha)
    if r == 0.0:
        out[0] = 1.0
        return out
    log_mag = -0.5 * r * r + n * math.log(r) - 0.5 * np.array([math.lgamma(k + 1) for k in n])
    return np.exp(log_mag) * np.exp(1j * n * np.angle(alpha))


def _tail_mass(vec: np.ndarray, n_max: int) -> float:
    p = np.abs(vec) ** 2
    total = p.sum()
    if total == 0:
        return 0.0
    return float(p[n_max + 1 :].sum() / total)


def build_initial_weights(init, n_max: int, epsilon_trunc: float = DEFAULT_EPS_TRUNC) -> np.ndarray:
    """Normalised field weights ``l_n`` truncated at ``n_max``.

    Photon-added coherent states are built by applying the raising operator
    ``m`` times to a coherent vector and renormalising.
    """
    if isinstance(init, Coherent):
        lam = abs(complex(init.alpha)) ** 2
        tail = float(pdtrc(n_max, lam)) if lam > 0 else 0.0
        vec = coherent_weights(init.alpha, n_max)
    elif isinstance(init, PhotonAdded):
        # extended vector so that the tail beyond n_max can be measured
        n_ext = n_max + init.m + TRUNCATION_MARGIN + int(10 * (abs(init.alpha) + 1))
        vec = coherent_weights(init.alpha, n_ext)
        for _ in range(init.m):
            raised = np.zeros_like(vec)
            raised[1:] = np.sqrt(np.arange(1, n_ext + 1)) * vec[:-1]
            vec = raised
        tail = _tail_mass(vec, n_max)
        vec = vec[: n_max + 1]
    elif isinstance(init, Custom):
        vec = np.asarray(init.amplitudes, dtype=complex)
        if vec.size == 0 or not np.any(vec):
            raise ValueError("custom field amplitudes have zero norm")
        tail = _tail_mass(vec, n_max)
        if vec.size < n_max + 1:
            vec = np.concatenate([vec, np.zeros(n_max + 1 - vec.size, dtype=complex)])
        vec = vec[: n_max + 1]
    else:
        raise TypeError(f"unsupported field initial state {init!r}")

    if tail > epsilon_trunc:
        raise TruncationError(
            f"probability mass {tail:.3e} beyond n_max={n_max} exceeds "
            f"epsilon_trunc={epsilon_trunc:.1e}; increase n_max"
        )
    norm = np.linalg.norm(vec)
    if norm == 0:
        raise ValueError("truncated field state has zero norm")
    return vec / norm


def truncation_for(init, epsilon_trunc: float = DEFAULT_EPS_TRUNC) -> int:
    """Default cutoff for a field initial state."""
    if isinstance(init, Coherent):
        return choose_truncation(abs(complex(init.alpha)), 0, epsilon_trunc)
    if isinstance(init, PhotonAdded):
        return choose_truncation(abs(complex(init.alpha)), init.m, epsilon_trunc)
    return max(MIN_TRUNCATION, len(init.amplitudes) - 1)


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TripartiteState:
    """Wavefunction ``sum_n l_n (A_n|n;0;e> + B_n|n;0;g> + C_n|n-1;1;e>)``.

    ``C`` has length ``n_max + 1`` like ``A`` and ``B``; ``C[0]`` is always 0.
    """

    l: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    tau: float = 0.0

    def __post_init__(self):
        for name in ("l", "A", "B", "C"):
            arr = np.array(getattr(self, name), dtype=complex)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not (self.l.shape == self.A.shape == self.B.shape == self.C.shape) or self.l.ndim != 1:
            raise ValueError("l, A, B, C must be 1-d arrays of equal length")
        if self.C[0] != 0:
            raise ValueError("C_0 must vanish: |-1;1;e> does not exist")

    @property
    def n_max(self) -> int:
        return self.l.size - 1

    def populations(self):
        """Weights of the three families, each indexed by ``n``."""
        w = np.abs(self.l) ** 2
        return w * np.abs(self.A) ** 2, w * np.abs(self.B) ** 2, w * np.abs(self.C) ** 2

    def norm(self) -> float:
        return float(math.sqrt(sum(p.sum() for p in self.populations())))

    def components(self):
        """Wavefunction components ``(l A, l B, l C)``."""
        return self.l * self.A, self.l * self.B, self.l * self.C

    def as_tensor(self) -> np.ndarray:
        """Explicit wavefunction with axes (field, mirror, atom); atom order (e, g)."""
        n1 = self.n_max + 1
        psi = np.zeros((n1, 2, 2), dtype=complex)
        a, b, c = self.components()
        psi[:, 0, 0] = a
        psi[:, 0, 1] = b
        psi[:-1, 1, 0] = c[1:]
        return psi


def initial_state(params: SystemParams, init, n_max: int | None = None,
                  epsilon_trunc: float = DEFAULT_EPS_TRUNC) -> TripartiteState:
    """Product state: field ``init``, mirror ground state, atom ``cos(phi)|e> + sin(phi)|g>``."""
    if n_max is None:
        n_max = truncation_for(init, epsilon_trunc)
    l = build_initial_weights(init, n_max, epsilon_trunc)
    ones = np.ones(n_max + 1)
    return TripartiteState(
        l=l,
        A=math.cos(params.phi) * ones,
        B=math.sin(params.phi) * ones,
        C=np.zeros(n_max + 1),
        tau=0.0,
    )


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace matrix."""

    entries: np.ndarray

    HERMITIAN_TOL = 1e-12
    TRACE_TOL = 1e-10
    EIG_TOL = 1e-10

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("density matrix must be square")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def check(self) -> None:
        """Raise ``ValueError`` if any density-matrix invariant is violated."""
        m = self.entries
        if np.max(np.abs(m - m.conj().T), initial=0.0) > self.HERMITIAN_TOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1) > self.TRACE_TOL:
            raise ValueError(f"density matrix trace {np.trace(m).real:.12f} != 1")
        if self.eigenvalues().min() < -self.EIG_TOL:
            raise ValueError("density matrix has negative eigenvalues")

    @classmethod
    def pure(cls, vec) -> "DensityMatrix":
        v = np.asarray(vec, dtype=complex)
        return cls(np.outer(v, v.conj()))
