"""Truncated Fock-space representations of the charger (cavity) mode.

Four initial cavity states are supported: number (Fock) states, coherent
states, thermal states and squeezed coherent states ``S(zeta)|alpha~>``.
Every builder returns a :class:`CavityDensity` in the Fock basis, truncated
at ``n_max`` and renormalized.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply
from scipy.stats import poisson

from .errors import ConsistencyError, TruncationError

DEFAULT_TAIL_TOL = 1e-10
MAX_CUTOFF = 512
MAX_SQUEEZING = 3.0


@dataclass(frozen=True)
class TruncationPolicy:
    """Photon-number cutoff ``n_max`` (dimension ``n_max + 1``) and allowed tail mass."""

    n_max: int
    tail_tol: float = DEFAULT_TAIL_TOL

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValueError(f"n_max must be an integer >= 1, got {self.n_max!r}")
        if not 0.0 < self.tail_tol <= 1.0:
            raise ValueError(f"tail_tol must lie in (0, 1], got {self.tail_tol!r}")

    @property
    def dim(self) -> int:
        return self.n_max + 1


# -- state specifications -----------------------------------------------------


@dataclass(frozen=True)
class Fock:
    N: int
    kind = "fock"

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 0:
            raise ValueError(f"Fock photon number must be a non-negative integer, got {self.N!r}")

    @property
    def analytic_mean(self) -> float:
        return float(self.N)


@dataclass(frozen=True)
class Coherent:
    alpha: complex
    kind = "coherent"

    @property
    def analytic_mean(self) -> float:
        return abs(self.alpha) ** 2


@dataclass(frozen=True)
class Thermal:
    """Thermal state given either by ``nbar`` or by ``beta`` (with ``omega_cav``)."""

    nbar: float | None = None
    beta: float | None = None
    omega_cav: float = 1.0
    kind = "thermal"

    def __post_init__(self):
        if (self.nbar is None) == (self.beta is None):
            raise ValueError("Thermal needs exactly one of nbar or beta")
        if self.nbar is not None and not self.nbar >= 0:
            raise ValueError(f"nbar must be >= 0, got {self.nbar!r}")
        if self.beta is not None and not self.beta > 0:
            raise ValueError(f"beta must be > 0, got {self.beta!r}")
        if not self.omega_cav > 0:
            raise ValueError(f"omega_cav must be > 0, got {self.omega_cav!r}")

    @property
    def ratio(self) -> float:
        """Boltzmann ratio q = p(n+1)/p(n) = exp(-beta*hbar*omega_cav)."""
        if self.beta is not None:
            return float(np.exp(-self.beta * self.omega_cav))
        return self.nbar / (1.0 + self.nbar)

    @property
    def analytic_mean(self) -> float:
        if self.nbar is not None:
            return float(self.nbar)
        return float(1.0 / np.expm1(self.beta * self.omega_cav))


@dataclass(frozen=True)
class SqueezedCoherent:
    """``S(zeta)|alpha_tilde>``: squeezing applied after displacement."""

    zeta: complex
    alpha_tilde: complex
    kind = "squeezed_coherent"

    def __post_init__(self):
        if not abs(self.zeta) < MAX_SQUEEZING:
            raise ValueError(f"|zeta| must be < {MAX_SQUEEZING}, got {abs(self.zeta)!r}")

    @property
    def analytic_mean(self) -> float:
        r = abs(self.zeta)
        phase = np.exp(1j * np.angle(self.zeta)) if r > 0 else 1.0
        a = complex(self.alpha_tilde)
        shifted = a * np.cosh(r) - np.conj(a) * phase * np.sinh(r)
        return float(abs(shifted) ** 2 + np.sinh(r) ** 2)


CavityStateSpec = Union[Fock, Coherent, Thermal, SqueezedCoherent]


# -- operators and densities --------------------------------------------------


@dataclass(frozen=True)
class LadderOps:
    a: np.ndarray
    a_dag: np.ndarray
    n_op: np.ndarray


def ladder_ops(n_max: int) -> LadderOps:
    """Dense annihilation, creation and number operators on ``{|0>, ..., |n_max>}``."""
    a = np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), k=1).astype(complex)
    n_op = np.diag(np.arange(n_max + 1, dtype=float)).astype(complex)
    return LadderOps(a=a, a_dag=a.conj().T, n_op=n_op)


@dataclass(frozen=True)
class CavityDensity:
    """Fock-basis density matrix ``<m|rho|n>`` of the cavity mode."""

    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        _check_density(m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_max(self) -> int:
        return self.dim - 1

    @property
    def populations(self) -> np.ndarray:
        return self.matrix.diagonal().real.copy()

    def is_diagonal(self, atol: float = 1e-14) -> bool:
        off = self.matrix - np.diag(self.matrix.diagonal())
        return bool(np.max(np.abs(off), initial=0.0) <= atol)


def _check_density(m: np.ndarray) -> None:
    if np.max(np.abs(m - m.conj().T)) > 1e-12:
        raise ConsistencyError("density matrix is not Hermitian")
    if abs(np.trace(m) - 1.0) > 1e-10:
        raise ConsistencyError(f"density matrix trace {np.trace(m).real!r} != 1")
    if np.linalg.eigvalsh(m).min() < -1e-10:
        raise ConsistencyError("density matrix is not positive semidefinite")


def mean_photon(rho: CavityDensity) -> float:
    n = np.arange(rho.dim)
    return float(np.dot(n, rho.matrix.diagonal().real))


# -- amplitudes and tails -----------------------------------------------------


def _coherent_amplitudes(alpha: complex, n_max: int) -> np.ndarray:
    c = np.empty(n_max + 1, dtype=complex)
    c[0] = np.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, n_max + 1):
        c[n] = c[n - 1] * alpha / np.sqrt(n)
    return c


def _squeeze_generator(zeta: complex, dim: int) -> sp.csr_matrix:
    # (zeta* a^2 - zeta a_dag^2) / 2
    n = np.arange(dim - 2)
    a2 = np.sqrt((n + 1.0) * (n + 2.0))
    upper = sp.diags(0.5 * np.conj(zeta) * a2, offsets=2, shape=(dim, dim))
    lower = sp.diags(-0.5 * zeta * a2, offsets=-2, shape=(dim, dim))
    return (upper + lower).tocsr().astype(complex)


def _squeezed_amplitudes(zeta: complex, alpha: complex, dim: int) -> np.ndarray:
    seed = _coherent_amplitudes(alpha, dim - 1)
    return expm_multiply(_squeeze_generator(zeta, dim), seed)


def _reverse_tails(p: np.ndarray) -> np.ndarray:
    """tails[n] = sum_{k > n} p[k]."""
    tails = np.zeros_like(p)
    tails[:-1] = np.cumsum(p[::-1])[::-1][1:]
    return tails


def _squeezed_populations(spec: SqueezedCoherent, tail_tol: float, min_dim: int) -> np.ndarray:
    """Populations of S(zeta)|alpha~> on a grid large enough that the top is empty."""
    seed_mean = abs(spec.alpha_tilde) ** 2
    dim = max(64, min_dim)
    while dim <= 4 * MAX_CUTOFF:
        seed_ok = poisson.sf(dim - 1, seed_mean) <= 1e-3 * tail_tol
        psi = _squeezed_amplitudes(spec.zeta, spec.alpha_tilde, dim)
        p = np.abs(psi) ** 2
        if seed_ok and p[3 * dim // 4:].sum() <= 1e-3 * tail_tol:
            return p
        dim *= 2
    raise TruncationError(f"truncation infeasible for {spec!r}: squeezed tail never converged")


def tail_mass(spec: CavityStateSpec, n_max: int) -> float:
    """Population of the exact (untruncated) state above ``n_max``."""
    if isinstance(spec, Fock):
        return 0.0 if spec.N <= n_max else 1.0
    if isinstance(spec, Coherent):
        return float(poisson.sf(n_max, abs(spec.alpha) ** 2))
    if isinstance(spec, Thermal):
        return float(spec.ratio ** (n_max + 1))
    if isinstance(spec, SqueezedCoherent):
        if spec.zeta == 0:
            return float(poisson.sf(n_max, abs(spec.alpha_tilde) ** 2))
        p = _squeezed_populations(spec, DEFAULT_TAIL_TOL, 2 * (n_max + 1))
        return float(_reverse_tails(p)[n_max])
    raise TypeError(f"unknown cavity state spec {spec!r}")


def required_cutoff(spec: CavityStateSpec, tail_tol: float = DEFAULT_TAIL_TOL,
                    max_cutoff: int = MAX_CUTOFF) -> int:
    """Smallest ``n_max`` whose exact tail population is ``<= tail_tol``.

    Fock states return ``N + 1`` so that the excitation-conserving sector
    reached from ``|g, N>`` is fully represented.
    """
    if isinstance(spec, Fock):
        n = spec.N + 1
    elif isinstance(spec, SqueezedCoherent) and spec.zeta != 0:
        p = _squeezed_populations(spec, tail_tol, 2)
        tails = _reverse_tails(p)
        below = np.nonzero(tails <= tail_tol)[0]
        n = int(below[0]) if below.size else max_cutoff + 1
    else:
        n = 1
        while n <= max_cutoff and tail_mass(spec, n) > tail_tol:
            n += 1
    n = max(n, 1)
    if n > max_cutoff:
        raise TruncationError(f"truncation infeasible for {spec!r}: cutoff exceeds {max_cutoff}")
    return n


# -- builders -----------------------------------------------------------------


def build_cavity_state(spec: CavityStateSpec, policy: TruncationPolicy) -> CavityDensity:
    """Truncated, renormalized Fock-basis density matrix of ``spec``."""
    n_max = policy.n_max
    dim = policy.dim
    if isinstance(spec, Fock):
        if n_max < spec.N + 1:
            raise TruncationError(f"Fock N={spec.N} needs n_max >= {spec.N + 1}, got {n_max}")
        m = np.zeros((dim, dim), dtype=complex)
        m[spec.N, spec.N] = 1.0
        return CavityDensity(m)

    if isinstance(spec, Thermal):
        tail = tail_mass(spec, n_max)
        _check_tail(spec, tail, policy)
        w = spec.ratio ** np.arange(dim)
        return CavityDensity(np.diag(w / w.sum()).astype(complex))

    if isinstance(spec, Coherent) or (isinstance(spec, SqueezedCoherent) and spec.zeta == 0):
        alpha = spec.alpha if isinstance(spec, Coherent) else spec.alpha_tilde
        _check_tail(spec, float(poisson.sf(n_max, abs(alpha) ** 2)), policy)
        return _pure(_coherent_amplitudes(alpha, n_max))

    if isinstance(spec, SqueezedCoherent):
        big = 2 * dim
        while True:
            psi = _squeezed_amplitudes(spec.zeta, spec.alpha_tilde, big)
            p = np.abs(psi) ** 2
            if p[3 * big // 4:].sum() <= 1e-3 * policy.tail_tol:
                break
            big *= 2
            if big > 4 * MAX_CUTOFF:
                raise TruncationError(f"truncation infeasible for {spec!r}: squeezed tail never converged")
        _check_tail(spec, float(p[dim:].sum()), policy)
        return _pure(psi[:dim])

    raise TypeError(f"unknown cavity state spec {spec!r}")


def _check_tail(spec, tail: float, policy: TruncationPolicy) -> None:
    if tail > policy.tail_tol:
        raise TruncationError(
            f"{spec!r}: tail mass {tail:.3e} above n_max={policy.n_max} exceeds {policy.tail_tol:.1e}"
        )


def _pure(amplitudes: np.ndarray) -> CavityDensity:
    c = amplitudes / np.linalg.norm(amplitudes)
    m = np.outer(c, c.conj())
    resid = np.max(np.abs(m - m.conj().T))
    if resid > 1e-10:
        raise ConsistencyError(f"non-Hermitian residue {resid:.2e} in pure state")
    return CavityDensity(m)


def build_auto(spec: CavityStateSpec, tail_tol: float = DEFAULT_TAIL_TOL) -> CavityDensity:
    """Build ``spec`` at its own required cutoff."""
    return build_cavity_state(spec, TruncationPolicy(required_cutoff(spec, tail_tol), tail_tol))
