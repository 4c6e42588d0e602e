"""Full counting statistics of the energy exchanged between qubit and cavity.

The generating function of the qubit energy change dU, the heat Q released
by the cavity and the work W = dU - Q is a finite sum of counting-field
phases,

    G(chi1, chi2) = sum_t c_t exp(i (k1_t chi1 omega_qub + k2_t chi2 omega_cav)),

with k in {-1, -1/2, 0, 1/2, 1}.  Moments are obtained by differentiating
each phase exactly, so no numerical differentiation is involved.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import NamedTuple

import numpy as np

from .dynamics import JCParams, QubitDensity, cosine_function, sine_function
from .fockspace import CavityDensity

QUANTITIES = ("dU", "Q", "W")
MAX_ORDER = 8
SNR_INF_THRESHOLD = 1e-15


class CountingVector(NamedTuple):
    chi1: float = 0.0
    chi2: float = 0.0


@dataclass(frozen=True)
class PhasePolynomial:
    """Exact generating function; ``h1``/``h2`` hold the phase indices doubled.

    Term ``t`` contributes ``coeffs[t] * exp(i (h1[t]/2 chi1 omega_qub + h2[t]/2 chi2 omega_cav))``.
    """

    coeffs: np.ndarray = field(repr=False)
    h1: np.ndarray = field(repr=False)
    h2: np.ndarray = field(repr=False)
    omega_qub: float = 1.0
    omega_cav: float = 1.0

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        h1 = np.asarray(self.h1, dtype=int)
        h2 = np.asarray(self.h2, dtype=int)
        if not (c.shape == h1.shape == h2.shape) or c.ndim != 1:
            raise ValueError("coeffs, h1, h2 must be 1-d arrays of equal length")
        if np.any(np.abs(h1) > 2) or np.any(np.abs(h2) > 2):
            raise ValueError("phase indices must lie in {-1, -1/2, 0, 1/2, 1}")
        if abs(c.sum() - 1.0) > 1e-10:
            raise ValueError(f"generating function not normalized: G(0,0) = {c.sum()!r}")
        for name, arr in (("coeffs", c), ("h1", h1), ("h2", h2)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def terms(self) -> list[tuple[complex, float, float]]:
        return [(complex(c), a / 2, b / 2) for c, a, b in zip(self.coeffs, self.h1, self.h2)]

    @property
    def has_coherence_terms(self) -> bool:
        """True when half-integer phases are present (quasiprobability regime)."""
        return bool(np.any(self.h1 % 2) or np.any(self.h2 % 2))

    def energies(self) -> dict[str, np.ndarray]:
        """Per-term values of dU, Q and W."""
        du = 0.5 * self.h1 * self.omega_qub
        q = 0.5 * self.h2 * self.omega_cav
        # h1 == h2 for every term, so W = k (omega_qub - omega_cav) without cancellation
        w = np.where(self.h1 == self.h2, 0.5 * self.h1 * (self.omega_qub - self.omega_cav), du - q)
        return {"dU": du, "Q": q, "W": w}


def _collect(parts: list[tuple[complex, int, int]], omega_qub: float, omega_cav: float) -> PhasePolynomial:
    kept = [(c, a, b) for c, a, b in parts if c != 0]
    c, a, b = zip(*kept) if kept else ((), (), ())
    return PhasePolynomial(np.array(c, dtype=complex), np.array(a, dtype=int), np.array(b, dtype=int),
                           omega_qub, omega_cav)


def generating_function(rho_qub0: QubitDensity, rho_cav0: CavityDensity, params: JCParams,
                        tau: float) -> PhasePolynomial:
    """Eight-term phase polynomial for a factorized initial state.

    Diagonal qubit elements pair with the Fock diagonal of the cavity state,
    the qubit coherence ``rho_eg`` pairs with the first cavity off-diagonal
    ``<n|rho_cav|n+1>``.
    """
    rq = rho_qub0.matrix
    rc = rho_cav0.matrix
    d = rho_cav0.dim
    n = np.arange(d, dtype=float)
    pop = rc.diagonal().real
    half_det = 0.5 * params.detuning
    g = params.g

    # functions of phi + g^2 (argument a_dag a + 1) and of phi (argument a_dag a)
    root_e, root_g = params.rabi(n + 1), params.rabi(n)
    s_e, c_e = sine_function(tau, root_e), cosine_function(tau, root_e)
    s_g, c_g = sine_function(tau, root_g), cosine_function(tau, root_g)
    zeta_e = c_e ** 2 + half_det ** 2 * s_e ** 2
    zeta_g = c_g ** 2 + half_det ** 2 * s_g ** 2
    eta_e = s_e * (c_e - 1j * half_det * s_e)

    rho_ee, rho_eg, rho_ge, rho_gg = rq[0, 0], rq[0, 1], rq[1, 0], rq[1, 1]

    stay = rho_ee * np.dot(pop, zeta_e) + rho_gg * np.dot(pop, zeta_g)
    # <a_dag S^2(a_dag a + 1) a> = sum_m m S^2(phi(m)) p_m ; <a S^2(a_dag a) a_dag> = sum_n (n+1) S^2(phi(n+1)) p_n
    up = rho_gg * g ** 2 * np.dot(pop, n * s_g ** 2)
    down = rho_ee * g ** 2 * np.dot(pop, (n + 1) * s_e ** 2)

    parts = [(complex(stay), 0, 0), (complex(up), 2, 2), (complex(down), -2, -2)]
    if rho_eg != 0 or rho_ge != 0:
        off = rc.diagonal(1)  # <n|rho_cav|n+1>
        w = np.sqrt(n[:-1] + 1)
        x = np.dot(off, w * eta_e[:-1])  # <a_dag eta(a_dag a + 1)> = <eta(a_dag a) a_dag>
        y = np.dot(off.conj(), w * eta_e[:-1].conj())  # <eta*(a_dag a + 1) a> = <a eta*(a_dag a)>
        plus = 1j * g * rho_eg * x - 1j * g * rho_ge * y
        parts += [(complex(plus), 1, 1), (complex(-plus), -1, -1)]
    return _collect(parts, params.omega_qub, params.omega_cav)


def evaluate_gf(G: PhasePolynomial, chi) -> complex:
    chi1, chi2 = chi
    phase = 0.5 * (G.h1 * chi1 * G.omega_qub + G.h2 * chi2 * G.omega_cav)
    return complex(np.sum(G.coeffs * np.exp(1j * phase)))


def moments(G: PhasePolynomial, alpha: int, beta: int) -> complex:
    """Joint moment <dU^alpha Q^beta> from the exact phase derivatives."""
    if alpha < 0 or beta < 0:
        raise ValueError("moment orders must be non-negative")
    e = G.energies()
    return complex(np.sum(G.coeffs * e["dU"] ** alpha * e["Q"] ** beta))


def work_moments(G: PhasePolynomial, n: int) -> float:
    """<W^n> = <(dU - Q)^n>.

    The binomial sum over joint moments is carried out inside each phase
    term, where it collapses to ``(k1 omega_qub - k2 omega_cav)^n``; summing
    joint moments globally would cancel catastrophically near resonance.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    w = G.energies()["W"]
    return float(np.sum(G.coeffs * w ** n).real)


def work_moments_binomial(G: PhasePolynomial, n: int) -> float:
    """Same quantity as :func:`work_moments`, summed over global joint moments."""
    return float(sum(comb(n, k) * (-1) ** k * moments(G, n - k, k) for k in range(n + 1)).real)


@dataclass(frozen=True)
class MomentTable:
    """Raw moments, central moments and cumulants of dU, Q and W for orders 1..order.

    ``central[Z][n-1]`` is <(Z - <Z>)^n>; ``cumulants[Z][n-1]`` is the
    standard cumulant, which differs from the central moment for n >= 4.
    """

    order: int
    raw: dict[str, np.ndarray]
    central: dict[str, np.ndarray]
    cumulants: dict[str, np.ndarray]
    imag_residue: float
    joint: dict[tuple[int, int], float] = field(default_factory=dict)

    def mean(self, quantity: str) -> float:
        return float(self.raw[quantity][0])

    def variance(self, quantity: str) -> float:
        return float(self.central[quantity][1]) if self.order >= 2 else float("nan")


def cumulants_from_raw(raw) -> np.ndarray:
    """Standard cumulants from raw moments mu'_1..mu'_n."""
    mu = [1.0] + [float(x) for x in raw]
    kappa = [0.0] * len(mu)
    for k in range(1, len(mu)):
        kappa[k] = mu[k] - sum(comb(k - 1, m - 1) * kappa[m] * mu[k - m] for m in range(1, k))
    return np.array(kappa[1:])


def cumulant_table(G: PhasePolynomial, n_order: int, joint: bool = False) -> MomentTable:
    if not 1 <= n_order <= MAX_ORDER:
        raise ValueError(f"n_order must lie in 1..{MAX_ORDER}, got {n_order}")
    e = G.energies()
    raw, central, cumul = {}, {}, {}
    residue = 0.0
    for z in QUANTITIES:
        vals = np.array([np.sum(G.coeffs * e[z] ** k) for k in range(1, n_order + 1)])
        residue = max(residue, float(np.max(np.abs(vals.imag))))
        raw[z] = vals.real
        mu = raw[z][0]
        central[z] = np.array([0.0] + [np.sum(G.coeffs * (e[z] - mu) ** k).real for k in range(2, n_order + 1)])
        cumul[z] = cumulants_from_raw(raw[z])
    joint_tab = {}
    if joint:
        for a in range(n_order + 1):
            for b in range(n_order + 1 - a):
                joint_tab[(a, b)] = moments(G, a, b).real
    return MomentTable(n_order, raw, central, cumul, residue, joint_tab)


class FockClosedForm(NamedTuple):
    mean: float
    variance: float
    snr: float
    gf: PhasePolynomial


def fock_ground_closed_form(params: JCParams, N: int, tau: float) -> FockClosedForm:
    """Statistics of dU for a ground-state qubit charged by the Fock state |N>."""
    if N < 0:
        raise ValueError("N must be >= 0")
    root = params.rabi(N)
    s, c = sine_function(tau, root), cosine_function(tau, root)
    p = params.g ** 2 * N * s ** 2
    hw = params.omega_qub
    mean = p * hw
    variance = p * hw ** 2 - mean ** 2
    denom = 1.0 - p
    snr = float("inf") if denom <= SNR_INF_THRESHOLD else p / denom
    stay = c ** 2 + (0.5 * params.detuning) ** 2 * s ** 2
    gf = _collect([(complex(stay), 0, 0), (complex(p), 2, 2)], params.omega_qub, params.omega_cav)
    return FockClosedForm(float(mean), float(variance), float(snr), gf)
