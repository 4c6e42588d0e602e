"""Analytic Jaynes-Cummings propagator and joint qubit-cavity evolution.

Joint operators use the block layout ``qubit (x) Fock`` with the qubit basis
ordered ``{|e>, |g>}``; index ``q * (n_max + 1) + n`` labels ``|q, n>``.
The propagator is a 2x2 matrix of cavity operators

    U = [[U00, U01 a], [U10 a_dag, U11]]

whose blocks are diagonal in the photon number, so they are stored as
vectors over ``n = 0..n_max``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConsistencyError

RWA_WARN_RATIO = 0.1


@dataclass(frozen=True)
class JCParams:
    """Qubit frequency, cavity frequency and coupling strength (hbar = 1)."""

    omega_qub: float
    omega_cav: float
    g: float

    def __post_init__(self):
        if not self.omega_qub > 0 or not self.omega_cav > 0:
            raise ValueError("omega_qub and omega_cav must be positive")
        if not self.g >= 0:
            raise ValueError(f"coupling g must be >= 0, got {self.g!r}")
        if self.g / self.omega_qub > RWA_WARN_RATIO:
            warnings.warn(
                f"g/omega_qub = {self.g / self.omega_qub:.3g} > {RWA_WARN_RATIO}: "
                "rotating-wave approximation is questionable",
                stacklevel=2,
            )

    @classmethod
    def from_ratios(cls, g_ratio: float, detuning_ratio: float, omega_qub: float = 1.0) -> "JCParams":
        """Build from ``g/omega_qub`` and ``(omega_qub - omega_cav)/omega_qub``."""
        return cls(omega_qub, omega_qub * (1.0 - detuning_ratio), omega_qub * g_ratio)

    @property
    def detuning(self) -> float:
        return self.omega_qub - self.omega_cav

    def rabi(self, n):
        """sqrt(g^2 n + (detuning/2)^2), the frequency argument sqrt(phi(n))."""
        return np.sqrt(self.g ** 2 * np.asarray(n, dtype=float) + (0.5 * self.detuning) ** 2)


def sine_function(tau: float, root_phi):
    """sin(tau*sqrt(phi))/sqrt(phi), finite (= tau) at phi = 0."""
    return tau * np.sinc(np.asarray(root_phi) * tau / np.pi)


def cosine_function(tau: float, root_phi):
    return np.cos(np.asarray(root_phi) * tau)


# -- qubit and joint states ---------------------------------------------------


def _validate(m: np.ndarray, what: str, check_psd: bool) -> None:
    if np.max(np.abs(m - m.conj().T)) > 1e-12:
        raise ConsistencyError(f"{what} is not Hermitian")
    if abs(np.trace(m) - 1.0) > 1e-10:
        raise ConsistencyError(f"{what} trace {np.trace(m).real!r} != 1")
    if check_psd and np.linalg.eigvalsh(m).min() < -1e-10:
        raise ConsistencyError(f"{what} is not positive semidefinite")


@dataclass(frozen=True)
class QubitDensity:
    """2x2 qubit density matrix in the basis ``{|e>, |g>}``."""

    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"qubit density must be 2x2, got {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        _validate(m, "qubit density", check_psd=True)

    @classmethod
    def excited(cls) -> "QubitDensity":
        return cls(np.array([[1, 0], [0, 0]]))

    @classmethod
    def ground(cls) -> "QubitDensity":
        return cls(np.array([[0, 0], [0, 1]]))

    @property
    def is_diagonal(self) -> bool:
        return self.matrix[0, 1] == 0


@dataclass(frozen=True)
class JointState:
    """Joint density matrix of side ``2 (n_max + 1)``.

    Hermiticity and unit trace are checked on construction; positivity is
    only checked by :meth:`check_psd`, which needs a full diagonalization.
    """

    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
            raise ValueError(f"joint state must be square with even side, got {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        _validate(m, "joint state", check_psd=False)

    @property
    def n_max(self) -> int:
        return self.matrix.shape[0] // 2 - 1

    def check_psd(self) -> None:
        _validate(self.matrix, "joint state", check_psd=True)


def product_state(rho_qub: QubitDensity, rho_cav) -> JointState:
    """Factorized initial state ``rho_qub (x) rho_cav``."""
    return JointState(np.kron(rho_qub.matrix, rho_cav.matrix))


def reduced_qubit(rho: JointState) -> QubitDensity:
    d = rho.n_max + 1
    r = rho.matrix.reshape(2, d, 2, d)
    return QubitDensity(np.einsum("injn->ij", r))


# -- propagator ---------------------------------------------------------------


@dataclass(frozen=True)
class PropagatorBlocks:
    """Fock-diagonal vectors of the four propagator blocks.

    ``U01 = diag(u01) @ a`` and ``U10 = diag(u10) @ a_dag``; ``u00`` and
    ``u11`` are plain diagonals.
    """

    n_max: int
    tau: float
    u00: np.ndarray = field(repr=False)
    u01: np.ndarray = field(repr=False)
    u10: np.ndarray = field(repr=False)
    u11: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.n_max + 1

    def assemble(self) -> np.ndarray:
        """Dense ``2(n_max+1)`` propagator matrix."""
        d = self.dim
        sq = np.sqrt(np.arange(1, d, dtype=float))
        u = np.zeros((2 * d, 2 * d), dtype=complex)
        idx = np.arange(d)
        u[idx, idx] = self.u00
        u[d + idx, d + idx] = self.u11
        # <e,n| U |g,n+1> = u01[n] sqrt(n+1);  <g,n+1| U |e,n> = u10[n+1] sqrt(n+1)
        u[idx[:-1], d + idx[1:]] = self.u01[:-1] * sq
        u[d + idx[1:], idx[:-1]] = self.u10[1:] * sq
        return u

    def apply_left(self, x: np.ndarray) -> np.ndarray:
        """``U @ x`` for a ``2(n_max+1)``-row array, without forming U."""
        d = self.dim
        sq = np.sqrt(np.arange(1, d, dtype=float))[:, None]
        top, bottom = x[:d], x[d:]
        a_bottom = np.zeros_like(bottom)
        a_bottom[:-1] = sq * bottom[1:]
        adag_top = np.zeros_like(top)
        adag_top[1:] = sq * top[:-1]
        out = np.empty_like(x, dtype=complex)
        out[:d] = self.u00[:, None] * top + self.u01[:, None] * a_bottom
        out[d:] = self.u10[:, None] * adag_top + self.u11[:, None] * bottom
        return out


def propagator_blocks(params: JCParams, tau: float, n_max: int) -> PropagatorBlocks:
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    if tau < 0:
        raise ValueError(f"interaction time must be >= 0, got {tau}")
    n = np.arange(n_max + 1, dtype=float)
    wc = params.omega_cav
    half_det = 0.5 * params.detuning
    free = np.exp(-1j * wc * n * tau)
    # blocks acting on |e,n> see phi + g^2, those acting on |g,n> see phi
    root_e = params.rabi(n + 1)
    root_g = params.rabi(n)
    s_e, c_e = sine_function(tau, root_e), cosine_function(tau, root_e)
    s_g, c_g = sine_function(tau, root_g), cosine_function(tau, root_g)
    lo = np.exp(-0.5j * wc * tau)
    hi = np.exp(+0.5j * wc * tau)
    u00 = lo * free * (c_e - 1j * half_det * s_e)
    u01 = -1j * params.g * lo * free * s_e
    u10 = -1j * params.g * hi * free * s_g
    u11 = hi * free * (c_g + 1j * half_det * s_g)
    return PropagatorBlocks(n_max, float(tau), u00, u01, u10, u11)


def evolve_joint(blocks: PropagatorBlocks, rho0: JointState) -> JointState:
    """``U rho U^dagger`` applied block-wise in O(n_max^2)."""
    if rho0.n_max != blocks.n_max:
        raise ValueError(f"dimension mismatch: state n_max={rho0.n_max}, propagator n_max={blocks.n_max}")
    half = blocks.apply_left(rho0.matrix)  # U rho
    out = blocks.apply_left(half.conj().T)  # U (U rho)^dagger = U rho U^dagger
    return JointState(0.5 * (out + out.conj().T))


def represented_indices(n_max: int) -> np.ndarray:
    """Joint indices whose excitation sector lies fully inside the cutoff.

    Only ``|e, n_max>`` is excluded: its partner ``|g, n_max+1>`` is cut off.
    """
    d = n_max + 1
    return np.delete(np.arange(2 * d), n_max)
