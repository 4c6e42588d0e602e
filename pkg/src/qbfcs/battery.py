"""Figures of merit of the charging protocol: SNR, power, optimal time, fidelity."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .dynamics import (JCParams, QubitDensity, evolve_joint, product_state, propagator_blocks,
                       reduced_qubit)
from .errors import NoChargingError
from .fcs import SNR_INF_THRESHOLD, cumulant_table, generating_function
from .fockspace import CavityDensity, CavityStateSpec, Fock, build_auto

TAU_GRID_POINTS = 600
TAU_RTOL = 1e-6
PEAK_MATCH_RTOL = 1e-9


@dataclass(frozen=True)
class ChargingCurvePoint:
    """One point of a charging curve.

    Energies are in units of hbar*omega_qub, the variance in its square and
    the power in hbar*omega_qub^2 (time measured in 1/omega_qub).
    """

    g_tau: float
    snr: float
    mean_dU: float
    var_dU: float
    power: float
    fidelity: float


def snr(mean: float, variance: float) -> float:
    """Squared mean over variance; +inf for a deterministic nonzero signal."""
    if mean == 0:
        return 0.0
    variance = max(variance, 0.0)
    if variance <= SNR_INF_THRESHOLD * mean ** 2:
        return float("inf")
    return mean ** 2 / variance


def power(mean_dU: float, tau: float) -> float:
    if not tau > 0:
        raise ValueError(f"power is undefined for tau = {tau!r}")
    return mean_dU / tau


def power_at_tau_opt(params: JCParams, N: int) -> float:
    """Closed-form Fock-state power over the optimal window."""
    if N < 1:
        raise ValueError("N must be >= 1")
    g2n = params.g ** 2 * N
    return 2 * g2n * params.omega_qub / (np.pi * np.sqrt(g2n + (0.5 * params.detuning) ** 2))


def fidelity_to_excited(rho_qub: QubitDensity) -> float:
    """Fidelity with the pure charged state |e><e|, which reduces to <e|rho|e>."""
    return float(rho_qub.matrix[0, 0].real)


def dU_statistics(params: JCParams, rho_cav: CavityDensity, tau: float,
                  rho_qub: QubitDensity | None = None) -> tuple[float, float]:
    """Mean and variance of the qubit energy change after time ``tau``."""
    rho_qub = QubitDensity.ground() if rho_qub is None else rho_qub
    table = cumulant_table(generating_function(rho_qub, rho_cav, params, tau), 2)
    return table.mean("dU"), table.variance("dU")


def snr_at(params: JCParams, rho_cav: CavityDensity, tau: float) -> float:
    return snr(*dU_statistics(params, rho_cav, tau))


def tau_opt(params: JCParams, spec: CavityStateSpec, rho_cav: CavityDensity | None = None,
            points: int = TAU_GRID_POINTS, rtol: float = TAU_RTOL) -> float:
    """Shortest interaction time maximizing SNR(dU) for a ground-state qubit.

    Fock states use the closed form; other states are scanned on ``points``
    grid values of g*tau in (0, pi] and refined by golden-section search.
    """
    if isinstance(spec, Fock):
        if spec.N == 0 or params.g == 0:
            raise NoChargingError(f"no charging possible with N={spec.N}, g={params.g}")
        return float(np.pi / (2 * params.rabi(spec.N)))
    if params.g == 0:
        raise NoChargingError("no charging possible with g = 0")
    rho_cav = build_auto(spec) if rho_cav is None else rho_cav
    taus = np.pi / params.g * np.arange(1, points + 1) / points
    values = np.array([snr_at(params, rho_cav, t) for t in taus])
    if not np.any(values > 0):
        raise NoChargingError(f"{spec!r} never charges the qubit")
    # the SNR oscillates and may repeat its maximum, so every local grid peak is refined
    candidates = [_refine_peak(params, rho_cav, taus, values, i, rtol) for i in _grid_peaks(values)]
    best = max(v for _, v in candidates)
    return next(t for t, v in candidates if v >= best * (1 - PEAK_MATCH_RTOL))


def _grid_peaks(values: np.ndarray) -> list[int]:
    left = np.concatenate([[-np.inf], values[:-1]])
    right = np.concatenate([values[1:], [-np.inf]])
    return [int(i) for i in np.nonzero((values >= left) & (values > right) & (values > 0))[0]]


def _refine_peak(params, rho_cav, taus, values, i, rtol) -> tuple[float, float]:
    """Golden-section refinement of the grid peak ``i``; the grid point when no interior bracket exists."""
    if not np.isfinite(values[i]) or i + 1 == len(taus):
        return float(taus[i]), float(values[i])
    left = taus[i - 1] if i > 0 else 0.0
    res = minimize_scalar(lambda t: -snr_at(params, rho_cav, t), bracket=(left, taus[i], taus[i + 1]),
                          method="golden", options={"xtol": rtol})
    if -res.fun >= values[i]:
        return float(res.x), float(-res.fun)
    return float(taus[i]), float(values[i])


def curve_point(params: JCParams, rho_cav: CavityDensity, g_tau: float) -> ChargingCurvePoint:
    tau = g_tau / params.g
    hw = params.omega_qub
    mean, var = dU_statistics(params, rho_cav, tau)
    rho0 = product_state(QubitDensity.ground(), rho_cav)
    rho_tau = evolve_joint(propagator_blocks(params, tau, rho_cav.n_max), rho0)
    return ChargingCurvePoint(
        g_tau=float(g_tau),
        snr=snr(mean, var),
        mean_dU=mean / hw,
        var_dU=var / hw ** 2,
        power=power(mean, tau) / hw ** 2,
        fidelity=fidelity_to_excited(reduced_qubit(rho_tau)),
    )


def charging_curves(params: JCParams, states: dict[str, CavityDensity], g_tau_grid,
                    workers: int = 1) -> dict[str, list[ChargingCurvePoint]]:
    """Charging curves for every labelled cavity state on a common g*tau grid.

    The SNR uses dU only; Q and W carry the same SNR.  Output order follows
    ``states`` and ``g_tau_grid`` regardless of ``workers``.
    """
    if params.g == 0:
        raise NoChargingError("charging curves need g > 0")
    grid = [float(x) for x in g_tau_grid]
    jobs = [(label, x) for label in states for x in grid]

    def run(job):
        label, x = job
        return curve_point(params, states[label], x)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]
    out: dict[str, list[ChargingCurvePoint]] = {label: [] for label in states}
    for (label, _), point in zip(jobs, results):
        out[label].append(point)
    return out
