from contextlib import contextmanager

import numpy as np
import pytest

from gpmphase import (
    BinaryPhantomSpec,
    FilterSpec,
    PhysicalConfig,
    RetrievalOptions,
    random_binary,
    retrieve_thickness,
    simulate_pbi,
)

_ACCEPTANCE = []

# 0.5 A, beta 1e-9, delta 5e-7, 10 um pixels, 0.1 m, 40 um binary object
SIM_CFG = dict(wavelength_m=0.5e-10, delta=5e-7, beta=1e-9, distance_m=0.1, pixel_m=1e-5)
SIM_T0 = 40e-6


@pytest.fixture(scope="session")
def sim_cfg():
    return PhysicalConfig(**SIM_CFG)


@pytest.fixture(scope="session")
def sim_run(sim_cfg):
    """Seeded 256x256 binary phantom pushed through the forward model and both retrievals."""
    truth = random_binary(BinaryPhantomSpec(256, 256, 0.5, SIM_T0, seed=42))
    intensity = simulate_pbi(truth, sim_cfg, oversample=2)
    t_pm = retrieve_thickness(intensity, sim_cfg, RetrievalOptions(FilterSpec.pm()))
    t_gpm = retrieve_thickness(intensity, sim_cfg, RetrievalOptions(FilterSpec.gpm()))
    return {"truth": truth, "intensity": intensity, "pm": t_pm, "gpm": t_gpm}


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def criterion():
    """Context manager that records one PASS/FAIL line per acceptance criterion."""

    @contextmanager
    def check(label):
        notes = []
        try:
            yield notes
        except BaseException as exc:
            first = (str(exc).strip().splitlines() or [type(exc).__name__])[0]
            _ACCEPTANCE.append(("FAIL", label, "; ".join(notes + [first])))
            raise
        _ACCEPTANCE.append(("PASS", label, "; ".join(notes)))

    return check


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for status, label, detail in sorted(_ACCEPTANCE, key=lambda r: r[1]):
        line = f"{status} {label}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
