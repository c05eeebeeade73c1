import hypothesis
import numpy as np
import pytest

from raman_lattice.constants import K_1064, K_772, M_RB87, khz
from raman_lattice.lattice import LatticeConfig

hypothesis.settings.register_profile("ci", max_examples=60, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile("ci")


@pytest.fixture
def rng():
    return np.random.default_rng(20161017)


@pytest.fixture
def crossing_cfg():
    """Symmetric point of the fitted crossing: omega1 = omega2 = 2pi x 528 kHz, phi = 16 mrad."""
    return LatticeConfig.from_frequencies(khz(528.0), khz(528.0), 0.016)


@pytest.fixture
def unmixed_cfg():
    """Spectroscopy settings: omega1/2pi = 530 kHz, omega2/2pi = 430 kHz."""
    return LatticeConfig.from_frequencies(khz(530.0), khz(430.0), 0.016, K_1064, K_772, M_RB87)


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get("acceptance", None) if hasattr(config, "stash") else None
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=_criterion_key):
            terminalreporter.write_line(line)


def _criterion_key(line):
    tag = line.split(":")[0].split()[-1]
    digits = "".join(c for c in tag if c.isdigit())
    return int(digits), tag
