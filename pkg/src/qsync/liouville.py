"""Vectorized Liouvillians for finite-dimensional open systems.

Density matrices are stacked row-major, ``|i><j|  ->  index i*d + j``, so that
``vec(A rho B) = (A kron B^T) vec(rho)`` and the Hilbert-Schmidt inner product
``<<tau|rho>> = Tr(tau^+ rho)`` is the ordinary conjugated dot product.  The
dissipator follows the convention ``2 L rho L^+ - rho L^+L - L^+L rho``, with
rates absorbed into the jump operators.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
import scipy.linalg as sla

from .errors import (
    DefectiveSpectrum,
    DimensionMismatch,
    NoDecayingModes,
)
from .integrators import validate_uniform_grid

STATIONARY_TOL = 1e-8


def vectorize(rho: np.ndarray) -> np.ndarray:
    """Row-major stacking of a square matrix into a length-d^2 vector."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionMismatch("only square matrices can be vectorized")
    return rho.reshape(-1)


def devectorize(vec: np.ndarray) -> np.ndarray:
    """Inverse of :func:`vectorize`."""
    vec = np.asarray(vec)
    d = int(round(np.sqrt(vec.size)))
    if d * d != vec.size:
        raise DimensionMismatch("vector length is not a perfect square")
    return vec.reshape(d, d)


@dataclass(frozen=True)
class OpenSystem:
    """Hamiltonian plus jump operators of a d-dimensional open system."""

    H: np.ndarray
    jumps: tuple[np.ndarray, ...] = ()

    def __post_init__(self):
        H = np.asarray(self.H, dtype=complex)
        if H.ndim != 2 or H.shape[0] != H.shape[1]:
            raise DimensionMismatch("Hamiltonian must be square")
        if np.max(np.abs(H - H.conj().T), initial=0.0) > 1e-12:
            raise DimensionMismatch("Hamiltonian must be Hermitian")
        jumps = tuple(np.asarray(L, dtype=complex) for L in self.jumps)
        for L in jumps:
            if L.shape != H.shape:
                raise DimensionMismatch("jump operators must match the Hamiltonian")
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "jumps", jumps)

    @property
    def dim(self) -> int:
        return self.H.shape[0]


@dataclass(frozen=True)
class Superoperator:
    """A d^2 x d^2 Liouvillian matrix; must annihilate <<I| (trace preservation)."""

    mat: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=complex)
        d = int(round(np.sqrt(mat.shape[0])))
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or d * d != mat.shape[0]:
            raise DimensionMismatch("superoperator must be d^2 x d^2")
        bra_id = vectorize(np.eye(d)).conj()
        scale = max(1.0, float(np.max(np.abs(mat), initial=0.0)))
        if np.max(np.abs(bra_id @ mat)) > 1e-10 * scale:
            raise DimensionMismatch("superoperator does not preserve the trace")
        object.__setattr__(self, "mat", mat)

    @property
    def dim(self) -> int:
        return int(round(np.sqrt(self.mat.shape[0])))


def build_liouvillian(system: OpenSystem) -> Superoperator:
    """Assemble the Liouvillian matrix of a Lindblad generator.

    ``L = -i (H kron I - I kron H^T)
         + sum_mu [2 L kron L*  -  L^+L kron I  -  I kron (L^+L)^T]``.
    """
    d = system.dim
    Id = np.eye(d, dtype=complex)
    H = system.H
    mat = -1j * (np.kron(H, Id) - np.kron(Id, H.T))
    for L in system.jumps:
        LdL = L.conj().T @ L
        mat += 2 * np.kron(L, L.conj()) - np.kron(LdL, Id) - np.kron(Id, LdL.T)
    return Superoperator(mat)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Biorthogonal eigensystem of a Liouvillian.

    ``right[:, i]`` are the right eigenvectors; ``left[i, :]`` are the
    corresponding bra vectors (already conjugated) normalized so that
    ``left @ right = I``, i.e. ``<<tau-bar_i | tau_j>> = delta_ij``.
    """

    eigenvalues: np.ndarray
    right: np.ndarray
    left: np.ndarray

    @property
    def dim(self) -> int:
        return int(round(np.sqrt(self.eigenvalues.size)))

    def overlaps(self, rho0: np.ndarray) -> np.ndarray:
        """Initial-state coefficients p_0i = <<tau-bar_i|rho_0>>."""
        return self.left @ vectorize(rho0)


@dataclass(frozen=True)
class GapReport:
    """Time-scale separation diagnostics of a Liouvillian spectrum.

    ``slow_rate`` is the smallest decay rate among decaying modes,
    ``next_rate`` the smallest strictly larger rate (equal to ``slow_rate``
    when no faster mode exists), and ``degenerate_frequencies`` flags several
    slowest modes (rates within 5%) oscillating at different |Im| frequencies,
    in which case a gap alone does not guarantee synchronization.
    """

    slow_index: int
    slow_rate: float
    next_rate: float
    gap_ratio: float
    degenerate_frequencies: bool


def spectral_decompose(L: Superoperator, cluster_tol: float | None = None) -> SpectralDecomposition:
    """Full non-Hermitian eigensystem with biorthogonal normalization.

    Eigenvalues are clustered within ``cluster_tol`` (default ``1e-8 * |L|``)
    and the left/right overlap is inverted cluster by cluster, which fixes the
    pairing ambiguity of (near-)degenerate subspaces.  Raises
    :class:`DefectiveSpectrum` when an overlap is numerically singular
    (exceptional point) or the reconstruction residual exceeds
    ``1e-8 * |L|``; callers then fall back to direct propagation.
    """
    mat = L.mat
    norm = float(np.linalg.norm(mat, 2))
    if cluster_tol is None:
        cluster_tol = 1e-8 * max(1.0, norm)
    w, vl, vr = sla.eig(mat, left=True, right=True)

    scale = max(1.0, float(np.max(np.abs(w), initial=0.0)))
    if np.max(w.real) > 1e-10 * scale:
        raise DimensionMismatch(
            "spectrum has a positive real part; not a Lindblad generator"
        )

    order = np.lexsort((w.imag, w.real))
    w, vl, vr = w[order], vl[:, order], vr[:, order]

    left = np.empty_like(vr.T)
    start = 0
    n = w.size
    while start < n:
        stop = start + 1
        while stop < n and abs(w[stop] - w[start]) <= cluster_tol:
            stop += 1
        block_l = vl[:, start:stop]
        block_r = vr[:, start:stop]
        overlap = block_l.conj().T @ block_r
        diag_overlap = np.min(np.abs(np.diag(overlap)))
        if diag_overlap < 1e-12 or np.linalg.cond(overlap) > 1e12:
            raise DefectiveSpectrum(
                f"left/right overlap singular near eigenvalue {w[start]:.6g}"
            )
        left[start:stop] = np.linalg.solve(overlap, block_l.conj().T)
        start = stop

    residual = np.linalg.norm((vr * w) @ left - mat, 2)
    if residual > 1e-8 * max(1.0, norm):
        raise DefectiveSpectrum(
            f"spectral reconstruction residual {residual:.3e} too large"
        )
    return SpectralDecomposition(w, vr, left)


def _validate_density_matrix(rho0: np.ndarray, d: int) -> np.ndarray:
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (d, d):
        raise DimensionMismatch("initial state has the wrong dimension")
    if np.max(np.abs(rho0 - rho0.conj().T)) > 1e-10:
        raise DimensionMismatch("initial state must be Hermitian")
    if abs(np.trace(rho0) - 1.0) > 1e-10:
        raise DimensionMismatch("initial state must have unit trace")
    if np.min(np.linalg.eigvalsh(rho0)) < -1e-10:
        raise DimensionMismatch("initial state must be positive semidefinite")
    return rho0


@dataclass
class LiouvilleTrajectory:
    """Spectral (or stepped) evolution samples and expectation-value series."""

    times: np.ndarray
    rho: np.ndarray                                 # (T, d, d)
    expectations: dict[str, np.ndarray] = field(default_factory=dict)


def _expectation_rows(observables: Mapping[str, np.ndarray], d: int) -> tuple[list[str], np.ndarray]:
    names = list(observables)
    rows = np.empty((len(names), d * d), dtype=complex)
    for k, name in enumerate(names):
        O = np.asarray(observables[name], dtype=complex)
        if O.shape != (d, d):
            raise DimensionMismatch(f"observable {name!r} has the wrong dimension")
        # Tr(O rho) = vec(O^T) . vec(rho) in row-major stacking.
        rows[k] = O.T.reshape(-1)
    return names, rows


def evolve_spectral(
    dec: SpectralDecomposition,
    rho0: np.ndarray,
    times: np.ndarray,
    observables: Mapping[str, np.ndarray] | None = None,
) -> LiouvilleTrajectory:
    """Evolve ``rho_t = sum_i p_0i tau_i exp(lambda_i t)`` on a time grid."""
    d = dec.dim
    rho0 = _validate_density_matrix(rho0, d)
    times = np.asarray(times, dtype=float)
    p0 = dec.overlaps(rho0)
    phases = np.exp(np.outer(dec.eigenvalues, times))      # (d^2, T)
    vec_t = dec.right @ (p0[:, None] * phases)
    return _package(vec_t, times, observables, d)


def _package(vec_t, times, observables, d) -> LiouvilleTrajectory:
    rho_t = vec_t.T.reshape(times.size, d, d)
    expectations: dict[str, np.ndarray] = {}
    if observables:
        names, rows = _expectation_rows(observables, d)
        values = rows @ vec_t
        for k, name in enumerate(names):
            expectations[name] = values[k]
    return LiouvilleTrajectory(times, rho_t, expectations)


def evolve_expm(
    L: Superoperator,
    rho0: np.ndarray,
    times: np.ndarray,
    observables: Mapping[str, np.ndarray] | None = None,
) -> LiouvilleTrajectory:
    """Direct matrix-exponential stepping; oracle and exceptional-point fallback."""
    d = L.dim
    rho0 = _validate_density_matrix(rho0, d)
    times = np.asarray(times, dtype=float)
    vec_t = np.empty((d * d, times.size), dtype=complex)
    if times.size >= 2:
        try:
            dt = validate_uniform_grid(times)
        except DimensionMismatch:
            dt = None
        if dt is not None:
            P = sla.expm(L.mat * dt)
            v = sla.expm(L.mat * float(times[0])) @ vectorize(rho0)
            for k in range(times.size):
                vec_t[:, k] = v
                if k + 1 < times.size:
                    v = P @ v
            return _package(vec_t, times, observables, d)
    for k, t in enumerate(times):
        vec_t[:, k] = sla.expm(L.mat * float(t)) @ vectorize(rho0)
    return _package(vec_t, times, observables, d)


def evolve(
    system: OpenSystem,
    rho0: np.ndarray,
    times: np.ndarray,
    observables: Mapping[str, np.ndarray] | None = None,
) -> LiouvilleTrajectory:
    """Spectral evolution with automatic fallback to expm stepping at
    exceptional points."""
    L = build_liouvillian(system)
    try:
        dec = spectral_decompose(L)
    except DefectiveSpectrum as exc:
        warnings.warn(f"{exc}; falling back to matrix-exponential stepping")
        return evolve_expm(L, rho0, times, observables)
    return evolve_spectral(dec, rho0, times, observables)


def gap_from_eigenvalues(
    eigenvalues: np.ndarray,
    tol_freq: float = 1e-6,
    rate_tol: float = STATIONARY_TOL,
) -> GapReport:
    """Gap diagnostics from a bare eigenvalue list.

    Stationary modes (|lambda| < ``rate_tol``) and non-decaying oscillating
    modes (|Re lambda| < ``rate_tol``) are excluded.  ``next_rate`` is the
    smallest rate strictly above the slowest one; exactly tied rates (the
    conjugate partner in particular) stay within the slow group.
    """
    w = np.asarray(eigenvalues, dtype=complex)
    rates = -w.real
    decaying = rates > rate_tol
    if not np.any(decaying):
        raise NoDecayingModes("no decaying modes in the spectrum")
    slow_rate = float(np.min(rates[decaying]))
    slow_index = int(np.nonzero(decaying & (rates <= slow_rate * (1 + 1e-12)))[0][0])
    tie = slow_rate * (1 + 1e-9) + 1e-12
    faster = rates[decaying & (rates > tie)]
    next_rate = float(np.min(faster)) if faster.size else slow_rate
    cluster = decaying & (rates <= slow_rate * 1.05)
    freqs = np.abs(w.imag[cluster])
    degenerate = bool(freqs.size >= 2 and (freqs.max() - freqs.min()) > tol_freq)
    return GapReport(slow_index, slow_rate, next_rate, next_rate / slow_rate, degenerate)


def timescale_gap(dec: SpectralDecomposition, tol_freq: float = 1e-6) -> GapReport:
    """Gap diagnostics of a spectral decomposition."""
    return gap_from_eigenvalues(dec.eigenvalues, tol_freq)
