import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bdr.errors import BadDomain, DefinitionError, NotUnitSpeed, ParseError
from bdr.exprlang import differentiate, evaluate
from bdr.surface import (
    JET_NAMES, bdr_residual, dumps_surface, g12_residual, grid_jet, jet, load_surface,
    loads_surface, make_surface, unit_speed_residual, unit_speed_residuals,
)
from conftest import CORPUS, data_path, soliton_text

R2 = math.sqrt(2)


def doc(x, y, z, w, s="0 .. 1", t="0 .. 1", n=8, params=""):
    return "[surface]\nx = %s\ny = %s\nz = %s\nw = %s\n[domain]\ns = %s\nt = %s\nns = %d\nnt = %d\n%s" % (
        x, y, z, w, s, t, n, n, params)


def test_helical_soliton_loads_with_tiny_residuals(soliton):
    assert np.max(unit_speed_residuals(soliton)) <= 1e-12
    assert (soliton.ns, soliton.nt) == (257, 65)
    assert soliton.s0 == 0 and soliton.constants == (0, 0, 0)


def test_soliton_jet_at_origin(soliton):
    j = jet(soliton, 0.0, 0.0)
    np.testing.assert_allclose(j.psi, [0, 1 / R2, 0, 0], atol=1e-15)
    np.testing.assert_allclose(j.psi_s, [1, 0, 0, 0], atol=1e-15)
    np.testing.assert_allclose(j.psi_t, [0, 0, 0, -1 / (2 * R2)], atol=1e-15)
    np.testing.assert_allclose(j.psi_ss, [0, -1 / R2, 0, 0], atol=1e-15)


def test_soliton_bdr_residual(soliton):
    assert bdr_residual(soliton, 0.0, 0.0) <= 1e-12
    rng = np.random.default_rng(0)
    i = rng.integers(0, soliton.ns, 64)
    j = rng.integers(0, soliton.nt, 64)
    assert np.max(bdr_residual(soliton, soliton.s_grid[i], soliton.t_grid[j])) <= 1e-10
    S, T = np.meshgrid(soliton.s_grid, soliton.t_grid, indexing="ij")
    assert np.max(bdr_residual(soliton, S, T)) <= 1e-10


@pytest.mark.parametrize("name", CORPUS)
def test_metric_on_corpus(surfaces, name):
    sd = surfaces[name]
    S, T = np.meshgrid(sd.s_grid, sd.t_grid, indexing="ij")
    assert np.max(unit_speed_residual(sd, S, T)) <= 1e-8
    assert np.max(g12_residual(sd, S, T)) <= 1e-8
    assert np.max(bdr_residual(sd, S, T)) <= 1e-10


def test_not_unit_speed():
    with pytest.raises(NotUnitSpeed) as info:
        loads_surface(doc("2*s", "0", "0", "t"))
    assert info.value.residual == pytest.approx(3.0)
    sd = loads_surface(doc("2*s", "0", "0", "t"), validate=False)
    assert unit_speed_residual(sd, 0.3, 0.1) == pytest.approx(3.0)


def test_plane_loads_and_residual_is_psi_t():
    sd = loads_surface(doc("s", "t", "0", "0"))
    assert bdr_residual(sd, 0.5, 0.5) == pytest.approx(1.0)


@pytest.mark.parametrize("k", [0.5, 2.0])
def test_unit_circle_is_unit_speed(k):
    sd = make_surface(["sin(s)", "cos(s)", "0", "t/%r" % k], (0, 6), (0, 1), 16, 8)
    S, T = np.meshgrid(sd.s_grid, sd.t_grid, indexing="ij")
    assert np.max(unit_speed_residual(sd, S, T)) <= 1e-15


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 12), st.floats(-1, 1))
def test_mixed_partials_agree(s, t):
    sd = make_surface(["sin(s)*exp(t)", "cos(s*t)", "s^2*t", "t"], (0, 12), (-1, 1), 8, 8,
                      validate=False)
    st_ = [evaluate(e, s, t) for e in sd.jets["psi_st"]]
    ts = [evaluate(differentiate(differentiate(c, "t"), "s"), s, t) for c in sd.components]
    np.testing.assert_allclose(st_, ts, rtol=1e-12, atol=1e-12)


def test_grid_jet_shapes(soliton):
    j = grid_jet(soliton)
    for name in JET_NAMES:
        assert getattr(j, name).shape == (soliton.ns, soliton.nt, 4)


def test_params_default():
    sd = loads_surface(doc("s", "t", "0", "0", s="1 .. 2"))
    assert sd.params == {"s0": 1.0, "c23": 0.0, "c24": 0.0, "c34": 0.0}


def test_constant_expressions_in_ranges():
    sd = loads_surface(doc("s", "t", "0", "0", s="0 .. 4*pi"))
    assert sd.s_range[1] == pytest.approx(4 * math.pi)


@pytest.mark.parametrize("text, error", [
    (doc("s", "t", "0", "0") + "[extra]\na = 1\n", DefinitionError),
    (doc("s", "t", "0", "0", params="[params]\nq = 1\n"), DefinitionError),
    (doc("s", "t", "0", "0").replace("w = 0\n", ""), DefinitionError),
    (doc("s", "t", "0", "0", s="1 .. 1"), BadDomain),
    (doc("s", "t", "0", "0", s="2 .. 1"), BadDomain),
    (doc("s", "t", "0", "0", n=7), BadDomain),
    (doc("s", "t", "0", "0", s="0 .. s"), BadDomain),
    (doc("s", "t", "0", "0", params="[params]\ns0 = 5\n"), BadDomain),
    (doc("s", "t", "0", "0").replace("ns = 8", "ns = eight"), BadDomain),
    (doc("sin s", "t", "0", "0"), ParseError),
    (doc("sqrt(s)", "t", "0", "0", s="-1 .. 1"), BadDomain),
])
def test_malformed_documents(text, error):
    with pytest.raises(error):
        loads_surface(text)


def test_dumps_round_trip(soliton):
    again = loads_surface(dumps_surface(soliton), name=soliton.name)
    assert again == soliton
    np.testing.assert_array_equal(again.s_grid, soliton.s_grid)


def test_load_surface_uses_file_stem():
    assert load_surface(data_path("helix_cylinder")).name == "helix_cylinder"


def test_params_are_read():
    sd = loads_surface(soliton_text(c23=0.3, c24=-0.2))
    assert sd.constants == (0.3, -0.2, 0.0)
