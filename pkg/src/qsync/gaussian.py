"""Gaussian dynamics of dissipative harmonic-oscillator networks.

The network Hamiltonian is ``H = (p^T p + x^T V x) / 2`` with potential matrix
``V`` carrying the squared frequencies on the diagonal and the bilinear
couplings off it.  Diagonalizing ``V`` yields normal modes whose damping and
diffusion coefficients depend on the bath geometry (separate, common, or
local); the first and second moments of a Gaussian state then obey a closed
linear ODE which is integrated with a fixed-step RK4 propagator.

Units: hbar = k_B = m = 1 and all frequencies, rates and times are expressed
in units of the first oscillator frequency.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, NonPositiveDefinite, UnstableIntegration
from .integrators import propagate_affine, validate_uniform_grid

SEPARATE = "separate"
COMMON = "common"
LOCAL = "local"

_BATH_KINDS = (SEPARATE, COMMON, LOCAL)


def thermal_coth(omega: np.ndarray, temperature: float) -> np.ndarray:
    """``coth(omega / 2T)`` with the zero-temperature limit taken analytically."""
    omega = np.asarray(omega, dtype=float)
    if temperature == 0.0:
        return np.ones_like(omega)
    return 1.0 / np.tanh(omega / (2.0 * temperature))


def symplectic_form(n: int) -> np.ndarray:
    """Symplectic matrix J for the ordering (x_1..x_n, p_1..p_n)."""
    J = np.zeros((2 * n, 2 * n))
    J[:n, n:] = np.eye(n)
    J[n:, :n] = -np.eye(n)
    return J


def symplectic_eigenvalues(cov: np.ndarray) -> np.ndarray:
    """Positive symplectic spectrum of a covariance matrix, sorted ascending."""
    n = cov.shape[0] // 2
    ev = np.linalg.eigvals(1j * symplectic_form(n) @ cov)
    nu = np.sort(np.abs(ev.real))
    return nu[n:]


@dataclass(frozen=True)
class HarmonicNetwork:
    """N coupled oscillators: frequencies ``omega_i`` and couplings ``lam_ij``.

    The potential matrix ``diag(omega_i^2) + lam`` must be positive definite,
    otherwise the network is unstable and construction fails.
    """

    frequencies: np.ndarray
    couplings: np.ndarray

    def __post_init__(self):
        freq = np.atleast_1d(np.asarray(self.frequencies, dtype=float))
        lam = np.asarray(self.couplings, dtype=float)
        n = freq.size
        if lam.shape != (n, n):
            raise DimensionMismatch(
                f"couplings must be ({n}, {n}), got {lam.shape}"
            )
        if np.any(freq <= 0):
            raise NonPositiveDefinite("oscillator frequencies must be positive")
        if np.max(np.abs(lam - lam.T), initial=0.0) > 1e-12:
            raise DimensionMismatch("couplings matrix must be symmetric")
        if np.max(np.abs(np.diag(lam)), initial=0.0) != 0.0:
            raise DimensionMismatch("couplings matrix must have zero diagonal")
        object.__setattr__(self, "frequencies", freq)
        object.__setattr__(self, "couplings", lam)
        if np.any(np.linalg.eigvalsh(self.potential_matrix()) <= 0):
            raise NonPositiveDefinite(
                "potential matrix is not positive definite (unstable network)"
            )

    @property
    def n(self) -> int:
        return self.frequencies.size

    def potential_matrix(self) -> np.ndarray:
        return np.diag(self.frequencies**2) + self.couplings

    @classmethod
    def pair(cls, omega2: float, coupling: float, omega1: float = 1.0) -> "HarmonicNetwork":
        """Two oscillators with a single bilinear coupling."""
        lam = np.array([[0.0, coupling], [coupling, 0.0]])
        return cls(np.array([omega1, omega2]), lam)

    @classmethod
    def spring_pair(cls, omega2: float, spring: float, omega1: float = 1.0) -> "HarmonicNetwork":
        """Two oscillators joined by a spring ``spring * (x1 - x2)^2 / 2``.

        The spring shifts both diagonal entries of the potential matrix by
        ``spring`` and contributes ``-spring`` off-diagonal, so the network
        is stable for any positive spring constant.
        """
        freqs = np.sqrt(np.array([omega1**2 + spring, omega2**2 + spring]))
        lam = np.array([[0.0, -spring], [-spring, 0.0]])
        return cls(freqs, lam)


@dataclass(frozen=True)
class NormalModes:
    """Eigenmode decomposition: ``X = F^T x`` with mode frequencies ``Omega``.

    ``F`` is orthogonal, its columns sorted by ascending ``Omega`` and signed
    so that each column's largest-magnitude entry is positive.
    """

    F: np.ndarray
    Omega: np.ndarray

    def __post_init__(self):
        F = np.asarray(self.F, dtype=float)
        Om = np.asarray(self.Omega, dtype=float)
        n = Om.size
        if F.shape != (n, n):
            raise DimensionMismatch("mode matrix must be square and match Omega")
        if np.max(np.abs(F.T @ F - np.eye(n))) > 1e-12:
            raise DimensionMismatch("mode matrix is not orthogonal")
        if np.any(np.diff(Om) < -1e-12):
            raise DimensionMismatch("mode frequencies must be sorted ascending")
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "Omega", Om)

    @property
    def n(self) -> int:
        return self.Omega.size


@dataclass(frozen=True)
class BathConfig:
    """Bath geometry and parameters: one bath per site, a common bath coupled
    to the center of mass, or a single bath on one node."""

    kind: str
    gamma: float
    temperature: float = 0.0
    node: int | None = None

    def __post_init__(self):
        if self.kind not in _BATH_KINDS:
            raise DimensionMismatch(f"bath kind must be one of {_BATH_KINDS}")
        if self.gamma <= 0:
            raise DimensionMismatch("gamma must be positive")
        if self.temperature < 0:
            raise DimensionMismatch("temperature must be non-negative")
        if self.kind == LOCAL and (self.node is None or self.node < 0):
            raise DimensionMismatch("local bath requires a node index")

    @classmethod
    def separate(cls, gamma: float, temperature: float = 0.0) -> "BathConfig":
        return cls(SEPARATE, gamma, temperature)

    @classmethod
    def common(cls, gamma: float, temperature: float = 0.0) -> "BathConfig":
        return cls(COMMON, gamma, temperature)

    @classmethod
    def local(cls, node: int, gamma: float, temperature: float = 0.0) -> "BathConfig":
        return cls(LOCAL, gamma, temperature, node)


@dataclass(frozen=True)
class ModeDissipation:
    """Per-mode effective couplings kappa, decay rates Gamma and diffusions D."""

    kappa: np.ndarray       # (modes, baths)
    Gamma: np.ndarray       # (modes,)
    D: np.ndarray           # (modes,)

    def __post_init__(self):
        if np.any(self.Gamma < 0) or np.any(self.D < 0):
            raise DimensionMismatch("decay and diffusion coefficients must be >= 0")


@dataclass(frozen=True)
class MomentState:
    """First and second moments of a Gaussian state.

    ``mean`` is (⟨x⟩, ⟨p⟩) of length 2N; ``cov`` is the symmetrized covariance
    matrix, which must satisfy ``cov + iJ/2 >= 0`` up to ``tol``.
    """

    mean: np.ndarray
    cov: np.ndarray
    tol: float = 1e-8

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.cov, dtype=float)
        if cov.shape != (mean.size, mean.size) or mean.size % 2:
            raise DimensionMismatch("cov must be 2N x 2N matching the mean vector")
        if np.max(np.abs(cov - cov.T), initial=0.0) > 1e-12:
            raise DimensionMismatch("covariance matrix must be symmetric")
        n = mean.size // 2
        herm = cov + 0.5j * symplectic_form(n)
        if np.min(np.linalg.eigvalsh(herm)) < -self.tol:
            raise UnstableIntegration(
                "covariance matrix violates the uncertainty bound cov + iJ/2 >= 0"
            )
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def n(self) -> int:
        return self.mean.size // 2


def squeezed_vacuum(network: HarmonicNetwork, squeezing: Sequence[float]) -> MomentState:
    """Separable vacuum squeezed state in the site basis.

    Each site starts with ``⟨x_n^2⟩ = e^{-2 r_n} / (2 omega_n)`` and
    ``⟨p_n^2⟩ = omega_n e^{2 r_n} / 2``; all other moments vanish.
    """
    r = np.asarray(squeezing, dtype=float)
    if r.size != network.n:
        raise DimensionMismatch("one squeezing parameter per oscillator required")
    w = network.frequencies
    cov = np.diag(np.concatenate([np.exp(-2 * r) / (2 * w), w * np.exp(2 * r) / 2]))
    return MomentState(np.zeros(2 * network.n), cov)


@dataclass
class MomentTrajectory:
    """Moment dynamics over a uniform grid, in site and normal-mode bases.

    ``observables`` maps names like ``x_sq_1`` (second moment of x of site 1,
    1-based) to sample arrays.
    """

    times: np.ndarray
    mean_site: np.ndarray      # (T, 2N)
    cov_site: np.ndarray       # (T, 2N, 2N)
    mean_mode: np.ndarray
    cov_mode: np.ndarray
    modes: NormalModes
    observables: dict[str, np.ndarray] = field(default_factory=dict)

    def state_at(self, k: int, basis: str = "site") -> MomentState:
        if basis == "site":
            return MomentState(self.mean_site[k], self.cov_site[k])
        if basis == "mode":
            return MomentState(self.mean_mode[k], self.cov_mode[k])
        raise DimensionMismatch("basis must be 'site' or 'mode'")


def diagonalize(network: HarmonicNetwork) -> NormalModes:
    """Eigenmode decomposition of the network potential.

    Returns the orthogonal mode matrix ``F`` (columns are eigenmodes sorted by
    ascending mode frequency, sign-fixed so the largest-magnitude entry of
    each column is positive) and ``Omega_m = sqrt(eig_m)``.
    """
    V = network.potential_matrix()
    ev, F = np.linalg.eigh(V)
    if np.any(ev <= 0):
        raise NonPositiveDefinite(
            "potential matrix is not positive definite (unstable network)"
        )
    F = F.copy()
    for m in range(F.shape[1]):
        lead = np.argmax(np.abs(F[:, m]))
        if F[lead, m] < 0:
            F[:, m] = -F[:, m]
    return NormalModes(F, np.sqrt(ev))


def effective_couplings(modes: NormalModes, bath: BathConfig) -> np.ndarray:
    """Effective mode-bath couplings kappa as a (modes, baths) matrix.

    Common bath: single column ``kappa_m = sum_n F_nm``.  Local bath on node
    M: single column ``kappa_m = F_Mm``.  Separate baths: ``K = F^T``.
    """
    F = modes.F
    if bath.kind == COMMON:
        return F.sum(axis=0)[:, None]
    if bath.kind == LOCAL:
        if bath.node >= modes.n:
            raise DimensionMismatch("local-bath node index out of range")
        return F[bath.node, :][:, None]
    return F.T.copy()


def lindblad_coefficients(
    modes: NormalModes, bath: BathConfig, kappa: np.ndarray
) -> ModeDissipation:
    """Per-mode decay rates and diffusion coefficients.

    ``Gamma_m = gamma * sum_b kappa_mb^2`` and
    ``D_m = Gamma_m * Omega_m * coth(Omega_m / 2T)``.  For separate baths the
    rows of ``F^T`` are unit vectors, so ``Gamma_m = gamma`` identically; for
    a common or local bath the single kappa column weights the rates.
    """
    kappa = np.asarray(kappa, dtype=float)
    if kappa.ndim != 2 or kappa.shape[0] != modes.n:
        raise DimensionMismatch("kappa must be a (modes, baths) matrix")
    Gamma = bath.gamma * np.sum(kappa**2, axis=1)
    D = Gamma * modes.Omega * thermal_coth(modes.Omega, bath.temperature)
    return ModeDissipation(kappa, Gamma, D)


def detect_noiseless_modes(diss: ModeDissipation, tol: float = 1e-10) -> list[int]:
    """Indices of modes decoupled from every bath (all |kappa| below
    ``tol`` relative to the largest coupling)."""
    if tol <= 0:
        raise DimensionMismatch("tolerance must be positive")
    scale = np.max(np.abs(diss.kappa), initial=0.0)
    if scale == 0.0:
        return list(range(diss.kappa.shape[0]))
    row_max = np.max(np.abs(diss.kappa), axis=1)
    return [int(m) for m in np.nonzero(row_max < tol * scale)[0]]


def _drift_matrix(modes: NormalModes, diss: ModeDissipation) -> np.ndarray:
    n = modes.n
    half = np.diag(diss.Gamma / 2)
    A = np.zeros((2 * n, 2 * n))
    A[:n, :n] = -half
    A[:n, n:] = np.eye(n)
    A[n:, :n] = -np.diag(modes.Omega**2)
    A[n:, n:] = -half
    return A


def _diffusion_matrix(modes: NormalModes, diss: ModeDissipation) -> np.ndarray:
    # Stationary point: ⟨X_m^2⟩ = coth(Omega_m/2T) / (2 Omega_m).
    return np.diag(np.concatenate([diss.D / (2 * modes.Omega**2), diss.D / 2]))


def evolve_moments(
    state0: MomentState,
    modes: NormalModes,
    diss: ModeDissipation,
    times: np.ndarray,
    max_step: float | None = None,
    physicality_tol: float = 1e-6,
) -> MomentTrajectory:
    """Integrate the moment ODEs over a uniform time grid.

    The state is given in the site basis and propagated in the normal-mode
    basis, where the master equation damps each quadrature pair at
    ``Gamma_m`` (second moments; means at ``Gamma_m / 2``), rotates it at
    ``Omega_m``, and injects ``D_m / 2`` into the momentum variance and
    ``D_m / (2 Omega_m^2)`` into the position variance.  Cross-mode
    covariances decay at ``(Gamma_m + Gamma_m') / 2``.

    Parameters
    ----------
    state0:
        Initial moments in the site basis.
    max_step:
        Internal RK4 substep; defaults to ``0.01 / max(Omega)``.
    physicality_tol:
        The trajectory must satisfy ``cov + iJ/2 >= -tol`` at every sample,
        else :class:`UnstableIntegration` is raised.
    """
    n = modes.n
    if state0.n != n:
        raise DimensionMismatch("state dimension does not match the mode count")
    times = np.asarray(times, dtype=float)
    validate_uniform_grid(times)
    if max_step is None:
        max_step = 0.01 / float(np.max(modes.Omega))

    R = np.zeros((2 * n, 2 * n))
    R[:n, :n] = modes.F.T
    R[n:, n:] = modes.F.T
    mean0 = R @ state0.mean
    cov0 = R @ state0.cov @ R.T

    A = _drift_matrix(modes, diss)
    Dm = _diffusion_matrix(modes, diss)
    m = 2 * n
    # Augmented generator over z = (mean, vec cov, 1):
    #   d mean / dt = A mean;  d vec cov / dt = (A (x) I + I (x) A) vec cov + vec D.
    dim = m + m * m + 1
    G = np.zeros((dim, dim))
    G[:m, :m] = A
    G[m:-1, m:-1] = np.kron(A, np.eye(m)) + np.kron(np.eye(m), A)
    G[m:-1, -1] = Dm.ravel()
    z0 = np.concatenate([mean0, cov0.ravel(), [1.0]])

    zs = propagate_affine(G, z0, times, max_step)
    mean_mode = zs[:, :m]
    cov_mode = zs[:, m:-1].reshape(-1, m, m)
    cov_mode = 0.5 * (cov_mode + np.transpose(cov_mode, (0, 2, 1)))

    herm = cov_mode + 0.5j * symplectic_form(n)
    min_eig = float(np.min(np.linalg.eigvalsh(herm)))
    if min_eig < -physicality_tol:
        raise UnstableIntegration(
            f"physicality violated by {-min_eig:.3e}; reduce the step size"
        )

    mean_site = mean_mode @ R            # R^T applied from the left
    cov_site = np.einsum("ij,tjk,lk->til", R.T, cov_mode, R.T)

    obs: dict[str, np.ndarray] = {}
    for i in range(n):
        obs[f"x_sq_{i + 1}"] = cov_site[:, i, i] + mean_site[:, i] ** 2
        obs[f"p_sq_{i + 1}"] = cov_site[:, n + i, n + i] + mean_site[:, n + i] ** 2
    return MomentTrajectory(times, mean_site, cov_site, mean_mode, cov_mode, modes, obs)
