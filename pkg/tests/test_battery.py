import math

import numpy as np
import pytest

from qbfcs.battery import (charging_curves, curve_point, dU_statistics, fidelity_to_excited, power,
                           power_at_tau_opt, snr, snr_at, tau_opt)
from qbfcs.dynamics import JCParams, QubitDensity
from qbfcs.errors import NoChargingError
from qbfcs.fockspace import Coherent, Fock, Thermal, build_auto

FIG2_GTAU_OPT = 0.6981317007977319
RESONANT_GTAU_OPT = 0.7024814731040726
FIG2_POWER_OPT = 0.014147106052612919
RESONANT_POWER_OPT = 0.014235250868343543


def test_snr_edge_cases():
    assert snr(0.0, 0.0) == 0.0
    assert math.isinf(snr(1.0, 0.0))
    assert math.isinf(snr(1.0, -1e-20))
    assert snr(2.0, 0.5) == 8.0


def test_power_guards_zero_time():
    with pytest.raises(ValueError):
        power(1.0, 0.0)
    assert power(2.0, 4.0) == 0.5


def test_fock_tau_opt_frozen(fig2_params, fig3_params):
    assert fig2_params.g * tau_opt(fig2_params, Fock(5)) == pytest.approx(FIG2_GTAU_OPT, rel=1e-14)
    assert fig3_params.g * tau_opt(fig3_params, Fock(5)) == pytest.approx(math.pi / (2 * math.sqrt(5)), rel=1e-14)
    assert fig3_params.g * tau_opt(fig3_params, Fock(5)) == pytest.approx(RESONANT_GTAU_OPT, rel=1e-14)


def test_power_at_tau_opt_frozen(fig2_params, fig3_params):
    assert power_at_tau_opt(fig2_params, 5) == pytest.approx(FIG2_POWER_OPT, rel=1e-13)
    assert power_at_tau_opt(fig3_params, 5) == pytest.approx(RESONANT_POWER_OPT, rel=1e-13)
    with pytest.raises(ValueError):
        power_at_tau_opt(fig3_params, 0)


def test_no_charging_cases(fig2_params):
    with pytest.raises(NoChargingError):
        tau_opt(fig2_params, Fock(0))
    with pytest.raises(NoChargingError):
        tau_opt(JCParams(1.0, 1.0, 0.0), Coherent(1.0))
    with pytest.raises(NoChargingError):
        charging_curves(JCParams(1.0, 1.0, 0.0), {}, [0.5])


def test_vacuum_never_charges(fig2_params):
    vac = build_auto(Fock(0))
    for gt in (0.3, 1.0, 2.5):
        mean, var = dU_statistics(fig2_params, vac, gt / fig2_params.g)
        assert mean == 0.0 and var == 0.0
        assert snr_at(fig2_params, vac, gt / fig2_params.g) == 0.0


def test_grid_search_tau_opt_is_a_local_max(fig2_params):
    spec = Coherent(math.sqrt(2))
    rho = build_auto(spec)
    t = tau_opt(fig2_params, spec, rho)
    s0 = snr_at(fig2_params, rho, t)
    for dt in (1e-3, -1e-3):
        assert snr_at(fig2_params, rho, t * (1 + dt)) <= s0


def test_grid_search_reproduces_fock_closed_form(fig2_params):
    # the generic scan, fed the Fock density, must pick the first of several equal peaks
    rho = build_auto(Fock(5))
    t_scan = tau_opt(fig2_params, Thermal(nbar=1.0), rho)
    assert t_scan == pytest.approx(tau_opt(fig2_params, Fock(5)), rel=1e-6)


def test_fidelity_is_excited_population():
    rq = QubitDensity(np.array([[0.25, 0.1], [0.1, 0.75]]))
    assert fidelity_to_excited(rq) == 0.25


def test_curves_deterministic_across_workers(fig2_params, fig_states):
    grid = np.linspace(0.05, 3.0, 7)
    states = {k: fig_states[k] for k in ("fock", "coherent")}
    a = charging_curves(fig2_params, states, grid, workers=1)
    b = charging_curves(fig2_params, states, grid, workers=4)
    assert a == b
    assert list(a) == ["fock", "coherent"]
    assert [pt.g_tau for pt in a["fock"]] == list(grid)


def test_curve_point_consistency(fig2_params, fig_states):
    pt = curve_point(fig2_params, fig_states["thermal"], 0.9)
    assert pt.snr == pytest.approx(pt.mean_dU ** 2 / pt.var_dU, rel=1e-12)
    assert pt.power == pytest.approx(pt.mean_dU * fig2_params.g / 0.9, rel=1e-12)
    # for a ground-state start the excited population is the mean charge in units of omega_qub
    assert pt.fidelity == pytest.approx(pt.mean_dU, abs=1e-12)
    assert 0.0 <= pt.fidelity <= 1.0
