"""Concrete two-spin models: the XX-coupled pair dissipating through a single
local bath, and the non-interacting pair under common dissipative and
dephasing baths.

The XX pair ``H = w1/2 sz_1 + w2/2 sz_2 + lam sx_1 sx_2`` is diagonalized by a
Jordan-Wigner / Bogoliubov transformation into two fermionic modes eta_1,2
with energies E_1,2; the local coupling ``sx_1`` then splits into the two
modes with weights cos(Theta), sin(Theta), which determines the imbalanced
mode decay rates for an Ohmic bath at zero temperature.

The dephasing pair is handled through its 4x4 single-flip coherence block,
whose generator (for qubit gaps 2*w_i) is returned verbatim by
:func:`dephasing_block`; the matching full master equation for the engine
uses ``H = w1 sz_1 + w2 sz_2 + s(flip-flop)`` with collective jump operators
``sqrt(gamma) (sm_1 + sm_2)`` and ``sqrt(gamma_z) (sz_1 + sz_2)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NegativeFrequency, NonPSDRateMatrixWarning
from .liouville import OpenSystem

SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)
SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)
SIGMA_PLUS = SIGMA_MINUS.conj().T
SIGMA_X = SIGMA_PLUS + SIGMA_MINUS
SIGMA_Y = 1j * (SIGMA_MINUS - SIGMA_PLUS)
IDENTITY_2 = np.eye(2, dtype=complex)


def site_operator(op: np.ndarray, site: int, n: int = 2) -> np.ndarray:
    """Embed a single-qubit operator at ``site`` (0-based) in an n-qubit space."""
    out = np.array([[1.0 + 0j]])
    for k in range(n):
        out = np.kron(out, op if k == site else IDENTITY_2)
    return out


@dataclass(frozen=True)
class SpinPairModel:
    """JW normal modes of the XX-coupled pair.

    ``theta_plus`` and ``theta_minus`` are the principal-branch mixing angles
    ``arcsin(2 lam / sqrt(4 lam^2 + (w1 +- w2)^2)) / 2``; ``mixing_angle`` is
    the signed combination ``theta_plus + sign(w1 - w2) theta_minus`` that
    weights ``sx_1 = cos(mix)(eta1 + eta1^+) + sin(mix)(eta2 + eta2^+)``.
    Mode 1 is the one with the larger overlap on spin 1 as ``lam -> 0``.
    """

    omega1: float
    omega2: float
    coupling: float
    theta_plus: float
    theta_minus: float
    mixing_angle: float
    E1: float
    E2: float
    eta1: np.ndarray
    eta2: np.ndarray

    @property
    def hamiltonian(self) -> np.ndarray:
        return (
            0.5 * self.omega1 * site_operator(SIGMA_Z, 0)
            + 0.5 * self.omega2 * site_operator(SIGMA_Z, 1)
            + self.coupling * site_operator(SIGMA_X, 0) @ site_operator(SIGMA_X, 1)
        )


def jw_modes(omega1: float, omega2: float, coupling: float) -> SpinPairModel:
    """Jordan-Wigner / Bogoliubov modes of the XX-coupled pair.

    The four energy eigenstates are built in closed form from the two mixing
    angles; the fermionic annihilation operators follow as 4x4 matrices
    satisfying ``{eta_i, eta_j^+} = delta_ij``, ``{eta_i, eta_j} = 0`` and
    ``[H, eta_i^+] = E_i eta_i^+``.
    """
    if omega1 <= 0 or omega2 <= 0:
        raise DimensionMismatch("qubit frequencies must be positive")
    s_plus = float(np.hypot(2 * coupling, omega1 + omega2))
    s_minus = float(np.hypot(2 * coupling, omega1 - omega2))
    theta_plus = 0.5 * np.arcsin(2 * coupling / s_plus)
    if s_minus > 0:
        theta_minus = 0.5 * np.arcsin(2 * coupling / s_minus)
    else:
        theta_minus = 0.0
    sign = 1.0 if omega1 >= omega2 else -1.0
    tms = sign * theta_minus
    E1 = 0.5 * (s_plus + sign * s_minus)
    E2 = 0.5 * (s_plus - sign * s_minus)

    # Basis |ee>, |eg>, |ge>, |gg>; the theta_plus rotation acts on the
    # even-parity pair {|ee>, |gg>}, the theta_minus one on {|eg>, |ge>}.
    ee, eg, ge, gg = np.eye(4)
    ground = np.cos(theta_plus) * gg - np.sin(theta_plus) * ee
    top = np.cos(theta_plus) * ee + np.sin(theta_plus) * gg
    exc1 = np.cos(tms) * eg + np.sin(tms) * ge
    exc2 = -np.sin(tms) * eg + np.cos(tms) * ge

    eta1 = np.outer(ground, exc1) + np.outer(exc2, top)
    eta2 = -(np.outer(ground, exc2) - np.outer(exc1, top))
    return SpinPairModel(
        omega1, omega2, coupling,
        float(theta_plus), float(theta_minus), float(theta_plus + tms),
        E1, E2, eta1.astype(complex), eta2.astype(complex),
    )


@dataclass(frozen=True)
class OhmicBath:
    """Ohmic spectral density with exponential cutoff, at zero temperature."""

    gamma0: float
    cutoff: float = 10.0

    def __post_init__(self):
        if self.gamma0 <= 0 or self.cutoff <= 0:
            raise DimensionMismatch("gamma0 and cutoff must be positive")


def ohmic_spectral_density(omega: float, bath: OhmicBath) -> float:
    """``J(omega) = gamma0 * omega * exp(-omega / cutoff)`` with J(0) = 0."""
    if omega < 0:
        raise NegativeFrequency("spectral density evaluated at a negative frequency")
    return bath.gamma0 * omega * np.exp(-omega / bath.cutoff)


@dataclass(frozen=True)
class LocalBathMaster:
    """Master-equation data for the locally-damped XX pair.

    ``gamma_tilde`` holds the two mode rates; in partial-secular mode the
    cross rates ``sqrt(g1 g2)`` complete a rank-one (hence PSD) rate matrix
    and the dissipator collapses to a single collective jump operator.
    """

    model: SpinPairModel
    bath: OhmicBath
    secular: str
    gamma_tilde: np.ndarray
    gamma_cross: np.ndarray
    system: OpenSystem


def local_bath_rates(model: SpinPairModel, bath: OhmicBath) -> tuple[float, float]:
    """Mode decay rates ``g1 = cos^2(mix) J(E1)`` and ``g2 = sin^2(mix) J(E2)``."""
    g1 = np.cos(model.mixing_angle) ** 2 * ohmic_spectral_density(model.E1, bath)
    g2 = np.sin(model.mixing_angle) ** 2 * ohmic_spectral_density(model.E2, bath)
    return float(g1), float(g2)


def build_local_bath_me(
    model: SpinPairModel, bath: OhmicBath, secular: str = "full"
) -> LocalBathMaster:
    """Open system for the locally-damped pair.

    ``secular="full"`` keeps the resonant jumps ``sqrt(g_i) eta_i`` only;
    ``secular="partial"`` adds the cross dissipator with weights
    ``sqrt(g_i g_j)``, equivalent to the single collective jump
    ``sqrt(g1) eta1 + sqrt(g2) eta2``.
    """
    if secular not in ("full", "partial"):
        raise DimensionMismatch("secular must be 'full' or 'partial'")
    g1, g2 = local_bath_rates(model, bath)
    rate_matrix = np.diag([g1, g2]).astype(float)
    if secular == "partial":
        cross = np.sqrt(g1 * g2)
        rate_matrix[0, 1] = rate_matrix[1, 0] = cross
        jumps = (np.sqrt(g1) * model.eta1 + np.sqrt(g2) * model.eta2,)
    else:
        jumps = (np.sqrt(g1) * model.eta1, np.sqrt(g2) * model.eta2)
    system = OpenSystem(model.hamiltonian, jumps)
    return LocalBathMaster(model, bath, secular, np.array([g1, g2]), rate_matrix, system)


def local_me_pair_system(
    omega1: float,
    omega2: float,
    coupling: float,
    gamma1: float,
    gamma2: float,
) -> OpenSystem:
    """Flip-flop coupled pair with phenomenological local dissipators.

    Comparison generator only: each spin damps through its own
    ``sqrt(gamma_i) sm_i`` regardless of the coupling, which is the local
    (small-coupling) approximation of the master equation.
    """
    H = (
        0.5 * omega1 * site_operator(SIGMA_Z, 0)
        + 0.5 * omega2 * site_operator(SIGMA_Z, 1)
        + coupling * (
            site_operator(SIGMA_PLUS, 0) @ site_operator(SIGMA_MINUS, 1)
            + site_operator(SIGMA_PLUS, 1) @ site_operator(SIGMA_MINUS, 0)
        )
    )
    jumps = (
        np.sqrt(gamma1) * site_operator(SIGMA_MINUS, 0),
        np.sqrt(gamma2) * site_operator(SIGMA_MINUS, 1),
    )
    return OpenSystem(H, jumps)


@dataclass(frozen=True)
class DephasingPairModel:
    """Non-interacting pair under common dissipation, dephasing and Lamb shift."""

    omega1: float
    omega2: float
    gamma: float
    gamma_z: float
    s: float

    def __post_init__(self):
        if self.gamma < 0 or self.gamma_z < 0:
            raise DimensionMismatch("gamma and gamma_z must be non-negative")

    @property
    def Lc(self) -> np.ndarray:
        """Generator of the single-flip coherence block."""
        g, s = self.gamma, self.s
        w1, w2 = self.omega1, self.omega2
        block = np.array(
            [
                [-3 * g - 2j * w2, -g + 1j * s, 0, 0],
                [-g + 1j * s, -3 * g - 2j * w1, 0, 0],
                [2 * g, 2 * g, -g - 2j * w1, -g - 1j * s],
                [2 * g, 2 * g, -g - 1j * s, -g - 2j * w2],
            ],
            dtype=complex,
        )
        return block - 4 * self.gamma_z * np.eye(4)

    @property
    def Lc_conjugate(self) -> np.ndarray:
        return self.Lc.conj()


def dephasing_block(
    omega1: float, omega2: float, gamma: float, gamma_z: float, s: float = 0.0
) -> DephasingPairModel:
    """Coherence-block model of the common-bath pair; pure dephasing enters
    only as the uniform shift ``-4 gamma_z`` of every eigenvalue."""
    return DephasingPairModel(omega1, omega2, gamma, gamma_z, s)


def dephasing_pair_system(model: DephasingPairModel) -> OpenSystem:
    """Full two-qubit master equation consistent with the coherence block.

    The block's phases correspond to qubit gaps ``2 omega_i``, so the
    Hamiltonian is ``omega1 sz_1 + omega2 sz_2 + s (sp_1 sm_2 + sp_2 sm_1)``;
    dissipation and dephasing are the collective jumps
    ``sqrt(gamma)(sm_1 + sm_2)`` and ``sqrt(gamma_z)(sz_1 + sz_2)``.
    """
    H = (
        model.omega1 * site_operator(SIGMA_Z, 0)
        + model.omega2 * site_operator(SIGMA_Z, 1)
        + model.s * (
            site_operator(SIGMA_PLUS, 0) @ site_operator(SIGMA_MINUS, 1)
            + site_operator(SIGMA_PLUS, 1) @ site_operator(SIGMA_MINUS, 0)
        )
    )
    jumps = []
    if model.gamma > 0:
        jumps.append(np.sqrt(model.gamma) * (site_operator(SIGMA_MINUS, 0) + site_operator(SIGMA_MINUS, 1)))
    if model.gamma_z > 0:
        jumps.append(np.sqrt(model.gamma_z) * (site_operator(SIGMA_Z, 0) + site_operator(SIGMA_Z, 1)))
    return OpenSystem(H, tuple(jumps))


def correlator_observables() -> dict[str, np.ndarray]:
    """The four two-spin correlators ``sp_i sm_j`` entering the intensity."""
    out = {}
    for i in range(2):
        for j in range(2):
            out[f"sp_sm_{i + 1}{j + 1}"] = (
                site_operator(SIGMA_PLUS, i) @ site_operator(SIGMA_MINUS, j)
            )
    return out


def radiated_intensity(correlators: np.ndarray, rates: np.ndarray) -> np.ndarray:
    """Emitted intensity ``I(t) = sum_ij rates_ij <sp_i(t) sm_j(t)>``.

    ``correlators`` has shape (T, 2, 2) with entry (t, i, j) holding
    ``<sp_i sm_j>`` at sample t.  A non-PSD rate matrix triggers a warning,
    not an error.
    """
    corr = np.asarray(correlators, dtype=complex)
    rates = np.asarray(rates, dtype=float)
    if corr.ndim != 3 or corr.shape[1:] != (2, 2) or rates.shape != (2, 2):
        raise DimensionMismatch("correlators must be (T, 2, 2) and rates (2, 2)")
    if np.min(np.linalg.eigvalsh(0.5 * (rates + rates.T))) < -1e-12:
        warnings.warn(
            "rate matrix is not positive semidefinite; intensity may be negative",
            NonPSDRateMatrixWarning,
        )
    series = np.einsum("ij,tij->t", rates, corr)
    return series.real
