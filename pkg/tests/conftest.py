from importlib import resources

import numpy as np
import pytest

from bdr.invariants import analyze
from bdr.surface import load_surface, loads_surface

DATA = resources.files("bdr") / "data"
CORPUS = ("helical_soliton", "helix_cylinder", "clifford_breathing")
# cyclic relabelling of the default normals; gives P1 = (0,0,0,-1) and k1 = 0 on the helical soliton
CYCLIC_GAUGE = np.array([[0.0, 1, 0], [0, 0, 1], [1, 0, 0]])
Q1, Q2 = 0.3, -0.2

_ACCEPTANCE = pytest.StashKey[dict]()


def data_path(name):
    return str(DATA / ("%s.bdr" % name))


def soliton_text(**params):
    text = (DATA / "helical_soliton.bdr").read_text()
    for key, value in params.items():
        text = text.replace("%s = 0" % key, "%s = %r" % (key, value))
    return text


@pytest.fixture(scope="session")
def surfaces():
    return {name: load_surface(data_path(name)) for name in CORPUS}


@pytest.fixture(scope="session")
def soliton(surfaces):
    return surfaces["helical_soliton"]


@pytest.fixture(scope="session")
def analyses(surfaces):
    return {name: analyze(sd) for name, sd in surfaces.items()}


@pytest.fixture(scope="session")
def soliton_an(analyses):
    return analyses["helical_soliton"]


@pytest.fixture(scope="session")
def cyclic_an(soliton):
    return analyze(soliton, gauge=CYCLIC_GAUGE)


@pytest.fixture(scope="session")
def reproduction_an():
    """Soliton in the cyclic gauge with a23 = q1, a24 = q2 and t-differenced k_t."""
    sd = loads_surface(soliton_text(c23=Q1, c24=Q2), name="helical_soliton")
    return analyze(sd, gauge=CYCLIC_GAUGE, kt_source="tdiff")


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(n, title, passed, detail)``."""
    store = request.config.stash.setdefault(_ACCEPTANCE, {})

    def record(n, title, passed, detail=""):
        store[n] = (title, bool(passed), detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = config.stash.get(_ACCEPTANCE, {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(store):
        title, passed, detail = store[n]
        terminalreporter.write_line(
            "[%s] criterion %2d  %-28s %s" % ("PASS" if passed else "FAIL", n, title, detail)
        )
