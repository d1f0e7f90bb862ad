import numpy as np
import pytest

from ris_lab.channel import Geometry, LinkStatistics, derive_link_statistics
from ris_lab.phase_design import SnrContext

REF_SOURCE = (0.0, 0.0, 0.0)
REF_RIS = (27.0, 25.0, 25.0)
REF_DEST = (180.0, 15.0, 15.0)
REF_NU = SnrContext.from_dbm(10 * np.log10(20.0), -94.0).nu

_ACCEPTANCE_LINES: list[str] = []


def ref_stats(M: int) -> LinkStatistics:
    return derive_link_statistics(Geometry.build(REF_SOURCE, REF_RIS, REF_DEST, M))


def rayleigh_stats(M: int, beta_sd=1e-4, beta_sr=2e-3, beta_rd=5e-4) -> LinkStatistics:
    """K_sr = K_rd = 0: pure scattering on both hops."""
    zero = np.zeros(M, dtype=complex)
    return LinkStatistics(beta_sd, beta_sr, beta_rd, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, zero, zero.copy())


@pytest.fixture(scope="session")
def stats100():
    return ref_stats(100)


@pytest.fixture(scope="session")
def stats64():
    return ref_stats(64)


@pytest.fixture(scope="session")
def acceptance_report():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
