import math

import pytest

from qbfcs.dynamics import JCParams
from qbfcs.fockspace import Coherent, Fock, SqueezedCoherent, Thermal, build_auto

FIG_SPECS = {
    "fock": Fock(5),
    "coherent": Coherent(math.sqrt(5)),
    "thermal": Thermal(nbar=5),
    "squeezed": SqueezedCoherent(0.6, 3.906),
}
GAUSSIAN = ("coherent", "thermal", "squeezed")


@pytest.fixture(scope="session")
def fig2_params():
    return JCParams.from_ratios(g_ratio=1e-2, detuning_ratio=5e-3)


@pytest.fixture(scope="session")
def fig3_params():
    return JCParams.from_ratios(g_ratio=1e-2, detuning_ratio=0.0)


@pytest.fixture(scope="session")
def fig_states():
    return {label: build_auto(spec) for label, spec in FIG_SPECS.items()}


ACCEPTANCE_LINES: list[str] = []


def record(criterion: str, passed: bool, detail: str) -> bool:
    line = f"{'PASS' if passed else 'FAIL'} criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
