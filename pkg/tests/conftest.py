"""Shared fixtures and independent oracles for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from qsync.liouville import OpenSystem


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def closed_form_sym2x2(a: float, b: float, c: float):
    """Eigendecomposition of [[a, c], [c, b]] by the quadratic formula.

    Returns (eigenvalues ascending, column eigenvectors), independently of
    any LAPACK path.
    """
    mean = 0.5 * (a + b)
    disc = np.hypot(0.5 * (a - b), c)
    lo, hi = mean - disc, mean + disc
    if c == 0.0:
        vecs = np.eye(2) if a <= b else np.array([[0.0, 1.0], [1.0, 0.0]])
        return np.array([min(a, b), max(a, b)]), vecs
    v_lo = np.array([c, lo - a])
    v_lo = v_lo / np.linalg.norm(v_lo)
    v_hi = np.array([c, hi - a])
    v_hi = v_hi / np.linalg.norm(v_hi)
    return np.array([lo, hi]), np.column_stack([v_lo, v_hi])


def random_density_matrix(rng, d: int) -> np.ndarray:
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = A @ A.conj().T
    return rho / np.trace(rho)


def random_open_system(rng, d: int, n_jumps: int = 2) -> OpenSystem:
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    H = 0.5 * (A + A.conj().T)
    jumps = []
    for _ in range(n_jumps):
        B = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        jumps.append(0.3 * B)
    return OpenSystem(H, tuple(jumps))


def lindblad_rhs(system: OpenSystem, rho: np.ndarray) -> np.ndarray:
    """Direct evaluation of the master equation right-hand side."""
    H = system.H
    out = -1j * (H @ rho - rho @ H)
    for L in system.jumps:
        LdL = L.conj().T @ L
        out += 2 * L @ rho @ L.conj().T - rho @ LdL - LdL @ rho
    return out
