"""Reduced density matrices, entropies and photon statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import DensityMatrix, TripartiteState

LN2 = math.log(2.0)


def reduced_rho_atom(state: TripartiteState) -> DensityMatrix:
    """Atom state in the basis (e, g)."""
    pa, pb, pc = state.populations()
    w = np.abs(state.l) ** 2
    coh = np.sum(w * state.A * state.B.conj())
    ee = pa.sum() + pc.sum()
    return DensityMatrix(np.array([[ee, coh], [coh.conjugate(), pb.sum()]]))


def reduced_rho_mirror(state: TripartiteState) -> DensityMatrix:
    """Mirror state in the phonon basis (0, 1)."""
    pa, pb, pc = state.populations()
    a, _, c = state.components()
    # |n;0;e> pairs with |n;1;e>, which is the C_{n+1} family
    coh = np.sum(a[:-1] * c[1:].conj())
    return DensityMatrix(np.array([[pa.sum() + pb.sum(), coh], [np.conj(coh), pc.sum()]]))


def field_vectors(state: TripartiteState):
    """Three field vectors whose outer products sum to the field density matrix."""
    a, b, c = state.components()
    shifted = np.zeros_like(c)
    shifted[:-1] = c[1:]
    return a, b, shifted


def reduced_rho_field(state: TripartiteState) -> DensityMatrix:
    m = sum(np.outer(v, v.conj()) for v in field_vectors(state))
    return DensityMatrix(m)


def svne(rho: DensityMatrix | np.ndarray, base: str = "nat") -> float:
    """Von Neumann entropy ``-Tr rho ln rho`` (``base='two'`` for bits)."""
    m = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho)
    lam = np.linalg.eigvalsh(m)
    if lam.min() < -1e-8:
        raise ValueError(f"invalid density matrix: eigenvalue {lam.min():.3e}")
    lam = np.clip(lam, 0.0, 1.0)
    lam = lam[lam > DensityMatrix.EIG_TOL]
    # the mirror image of dropping tiny eigenvalues: a pure state gives exactly 0
    lam = np.where(lam > 1.0 - DensityMatrix.EIG_TOL, 1.0, lam)
    s = float(-np.sum(lam * np.log(lam)))
    s = max(s, 0.0)
    if base == "nat":
        return s
    if base == "two":
        return s / LN2
    raise ValueError(f"unknown entropy base {base!r}")


@dataclass(frozen=True)
class PhotonStats:
    mean_n: float
    var_n: float
    mandel_q: float
    inversion: float


def photon_distribution(state: TripartiteState) -> np.ndarray:
    pa, pb, pc = state.populations()
    p = pa + pb
    p[:-1] += pc[1:]
    return p


def photon_stats(state: TripartiteState) -> PhotonStats:
    p = photon_distribution(state)
    n = np.arange(p.size)
    mean = float(np.sum(n * p))
    var = float(np.sum((n - mean) ** 2 * p))
    q = var / mean - 1.0 if mean > 0 else 0.0
    pa, pb, pc = state.populations()
    inversion = float(pa.sum() + pc.sum() - pb.sum())
    return PhotonStats(mean, var, q, inversion)
