"""Brute-force reference computations used only for validation.

Nothing here imports from :mod:`qbfcs.dynamics` or :mod:`qbfcs.fcs`: the
Hamiltonian, propagator, tilted trace and two-point-measurement statistics
are rebuilt from dense matrices so that agreement is a real cross-check.
Inputs are plain arrays (or objects exposing ``.matrix``).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ORACLE_TOL = 1e-9
MAX_ORACLE_CUTOFF = 160


def _mat(x) -> np.ndarray:
    return np.asarray(getattr(x, "matrix", x), dtype=complex)


def _energies(params, n_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Diagonals of H_qub (x) 1 and 1 (x) H_cav in the |q, n> basis, q in {e, g}."""
    d = n_max + 1
    e_qub = np.repeat([0.5 * params.omega_qub, -0.5 * params.omega_qub], d)
    e_cav = np.tile(params.omega_cav * np.arange(d, dtype=float), 2)
    return e_qub, e_cav


def dense_hamiltonian(params, n_max: int) -> np.ndarray:
    """omega_qub sigma_z/2 + omega_cav a_dag a + g (sigma_+ a + sigma_- a_dag)."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    d = n_max + 1
    a = np.diag(np.sqrt(np.arange(1, d, dtype=float)), 1)
    num = np.diag(np.arange(d, dtype=float))
    sz = np.diag([1.0, -1.0])
    sp = np.array([[0.0, 1.0], [0.0, 0.0]])  # |e><g|
    eye_q, eye_c = np.eye(2), np.eye(d)
    h = (
        0.5 * params.omega_qub * np.kron(sz, eye_c)
        + params.omega_cav * np.kron(eye_q, num)
        + params.g * (np.kron(sp, a) + np.kron(sp.T, a.T))
    )
    return h.astype(complex)


def excitation_number(n_max: int) -> np.ndarray:
    d = n_max + 1
    return np.kron(np.diag([0.5, -0.5]), np.eye(d)) + np.kron(np.eye(2), np.diag(np.arange(d, dtype=float)))


def dense_propagator(h: np.ndarray, tau: float) -> np.ndarray:
    """exp(-i H tau) by Hermitian eigendecomposition."""
    if np.max(np.abs(h - h.conj().T)) > 1e-12:
        raise ValueError("Hamiltonian is not Hermitian")
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * tau)) @ v.conj().T


def _check_cutoff(n_max: int) -> None:
    if n_max > MAX_ORACLE_CUTOFF:
        raise ValueError(f"oracle restricted to n_max <= {MAX_ORACLE_CUTOFF}, got {n_max}")


def dense_tilted_gf(rho0, params, tau: float, chi: tuple[float, float]) -> complex:
    """Tr[U_{chi/2} rho U_{-chi/2}^dagger] with dense diagonal tilting phases."""
    rho = _mat(rho0)
    n_max = rho.shape[0] // 2 - 1
    _check_cutoff(n_max)
    u = dense_propagator(dense_hamiltonian(params, n_max), tau)
    e_qub, e_cav = _energies(params, n_max)
    chi1, chi2 = chi

    def tilted(s):
        # e^{i s (chi1 H_qub - chi2 H_cav)} U e^{-i s (chi1 H_qub - chi2 H_cav)}
        ph = np.exp(1j * s * (chi1 * e_qub - chi2 * e_cav))
        return ph[:, None] * u * ph.conj()[None, :]

    return complex(np.trace(tilted(0.5) @ rho @ tilted(-0.5).conj().T))


def interaction_energy(rho0, params, tau: float) -> float:
    """<H_int(tau)> = g <sigma_+ a + sigma_- a_dag> in the evolved state."""
    rho = _mat(rho0)
    n_max = rho.shape[0] // 2 - 1
    _check_cutoff(n_max)
    h = dense_hamiltonian(params, n_max)
    e_qub, e_cav = _energies(params, n_max)
    h_int = h - np.diag(e_qub + e_cav)
    u = dense_propagator(h, tau)
    return float(np.trace(h_int @ u @ rho @ u.conj().T).real)


def evolved_state(rho0, params, tau: float) -> np.ndarray:
    rho = _mat(rho0)
    n_max = rho.shape[0] // 2 - 1
    u = dense_propagator(dense_hamiltonian(params, n_max), tau)
    return u @ rho @ u.conj().T


@dataclass(frozen=True)
class TpmDistribution:
    """Atoms (dU, Q, probability) of the joint two-point-measurement distribution."""

    atoms: tuple[tuple[float, float, float], ...]

    def moment(self, alpha: int, beta: int) -> float:
        return float(sum(p * du ** alpha * q ** beta for du, q, p in self.atoms))

    @property
    def total(self) -> float:
        return float(sum(p for _, _, p in self.atoms))


def tpm_distribution(rho_qub0, rho_cav0, params, tau: float, dust: float = 1e-12) -> TpmDistribution:
    """Enumerate initial/final energy eigenprojector pairs of H_qub + H_cav.

    Q counts energy released by the cavity, so that dU = Q + W at every
    outcome. Both initial states must be diagonal in their energy basis.
    """
    rq, rc = _mat(rho_qub0), _mat(rho_cav0)
    for name, m in (("qubit", rq), ("cavity", rc)):
        if np.max(np.abs(m - np.diag(np.diag(m))), initial=0.0) > 0:
            raise ValueError(f"TPM oracle needs a diagonal {name} state")
    n_max = rc.shape[0] - 1
    _check_cutoff(n_max)
    u = dense_propagator(dense_hamiltonian(params, n_max), tau)
    p0 = np.kron(np.diag(rq).real, np.diag(rc).real)
    trans = np.abs(u) ** 2  # trans[f, i] = |<f|U|i>|^2
    e_qub, e_cav = _energies(params, n_max)
    joint = trans * p0[None, :]
    du = e_qub[:, None] - e_qub[None, :]
    q = -(e_cav[:, None] - e_cav[None, :])
    bins: dict[tuple[float, float], float] = {}
    for f, i in zip(*np.nonzero(joint > 0)):
        key = (round(float(du[f, i]), 12), round(float(q[f, i]), 12))
        bins[key] = bins.get(key, 0.0) + float(joint[f, i])
    atoms = tuple(sorted((k[0], k[1], p) for k, p in bins.items() if p > dust))
    return TpmDistribution(atoms)


def finite_diff_moments(gf_evaluator, order: int, step: float) -> float:
    """Central finite-difference estimate of (-i)^n d^n G / d chi^n at chi = 0.

    ``gf_evaluator`` maps a real counting field to a complex value.
    """
    if order not in (1, 2):
        raise ValueError("finite differences implemented for order 1 and 2 only")
    if not step > 0:
        raise ValueError("step must be positive")
    gp, gm = gf_evaluator(step), gf_evaluator(-step)
    if order == 1:
        deriv = (gp - gm) / (2 * step)
        return float((-1j * deriv).real)
    deriv2 = (gp - 2 * gf_evaluator(0.0) + gm) / step ** 2
    return float((-deriv2).real)
