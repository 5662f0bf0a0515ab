import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from bdr.classify import (
    SUBTYPES, TAGS, classify_grid, classify_point, delta_p, delta_p_det, histogram,
    surface_predicates, violations,
)
from bdr.invariants import analyze, synthetic_report


@pytest.mark.parametrize("scalars, label, hyp", [
    ((1, 1, 0, 0, 0), "Parabolic/InflectionFlat", None),
    ((1, 1, -1, 0.5, 1), "Elliptic", None),
    ((1, 1, 0, 1, 0), "Hyperbolic", None),
    ((1, 1, 2, 0, 1), "Hyperbolic", None),
    ((1, 1, 1, 0, 0), "Parabolic/InflectionImaginary", None),
    ((1, 1, -1, 0, 0), "Parabolic/InflectionReal", "A<0 and B^2+4Q^2AC^2=0"),
    ((1, 1, -1, 2, 1), "Parabolic/NonDegenerate", "A<0 and B^2+4Q^2AC^2=0"),
    ((1, 1, 0, 0, 1), "Parabolic/NonDegenerate", "A=B=0!=C"),
])
def test_synthetic_examples(scalars, label, hyp):
    c = classify_point(synthetic_report(*scalars))
    assert c.label == label
    assert c.hypothesis == hyp


def test_flat_inflection_has_zero_k():
    c = classify_point(synthetic_report(0.7, 0.3, 0, 0, 0))
    assert c.K == 0 and c.delta_p == 0


def test_tolerance_must_be_positive():
    with pytest.raises(ValueError):
        classify_point(synthetic_report(1, 1, 0, 0, 0), tol=0)


pos = st.floats(0.05, 3.0)
real = st.one_of(st.floats(-3.0, 3.0), st.just(0.0))


@given(pos, pos, real, real, real, st.sampled_from([1e-8, 1e-4]))
def test_tag_follows_delta_sign_and_is_exhaustive(Q, W, A, B, C, tol):
    r = synthetic_report(Q, W, A, B, C)
    c = classify_point(r, tol)
    band = tol * W**6
    assert c.tag in TAGS
    assert (c.tag == "Hyperbolic") == (c.delta_p < -band)
    assert (c.tag == "Elliptic") == (c.delta_p > band)
    assert (c.subtype in SUBTYPES) == (c.tag == "Parabolic")
    assert c.delta_p == pytest.approx(delta_p_det(r), rel=1e-9, abs=1e-12 * max(1, (Q / W) ** 8))


@given(pos, pos, real, real, real)
def test_flipping_n2_keeps_the_class(Q, W, A, B, C):
    # N2 -> -N2 negates B and C (and K_N) but leaves the ellipse position alone
    a = classify_point(synthetic_report(Q, W, A, B, C))
    b = classify_point(synthetic_report(Q, W, A, -B, -C))
    assert a.label == b.label


def test_delta_closed_form_vs_determinant(analyses):
    for an in analyses.values():
        for r in an.grid.reports()[::97]:
            assert delta_p(r) == pytest.approx(delta_p_det(r), rel=1e-9, abs=1e-15)


@pytest.fixture(scope="module")
def clifford_classes(analyses):
    return classify_grid(analyses["clifford_breathing"].grid)


def test_gauge_rotation_keeps_classes(surfaces, clifford_classes):
    R = Rotation.from_rotvec([0.4, 1.1, -0.7]).as_matrix()
    rotated = classify_grid(analyze(surfaces["clifford_breathing"], gauge=R).grid)
    assert [c.label for c in rotated.ravel()] == [c.label for c in clifford_classes.ravel()]


def test_grid_and_point_classification_agree(analyses, clifford_classes):
    g = analyses["clifford_breathing"].grid
    for i, j in [(0, 0), (40, 20), (128, 64), (256, 128)]:
        a, b = classify_point(g.report(i, j)), clifford_classes[i, j]
        assert (a.label, a.rank_A, a.hypothesis) == (b.label, b.rank_A, b.hypothesis)
        assert a.delta_p == pytest.approx(b.delta_p, rel=1e-12)


def test_histogram_sums_to_cells(clifford_classes):
    h = histogram(clifford_classes)
    assert sum(h.values()) == clifford_classes.size
    assert h == {"Hyperbolic": clifford_classes.size}


def test_helical_soliton_classes(soliton_an, reproduction_an):
    assert histogram(classify_grid(soliton_an.grid)) == {"Parabolic/InflectionFlat": 257 * 65}
    g = reproduction_an.grid
    classes = classify_grid(g)
    hyper = np.abs(g.delta_p) > 1e-8 * g.W**6
    assert all(c.tag == "Hyperbolic" for c in classes[hyper])
    assert hyper.all()


def test_predicates_on_helical_soliton(soliton_an, reproduction_an):
    p = surface_predicates(soliton_an.grid)
    assert p["semi_umbilic"].holds and p["semi_umbilic"].witness is None
    assert not p["minimal"].holds and p["minimal"].witness is not None
    assert p["flat"].holds
    # |H|^2 = 1/8 with K = K_N = 0, so the Wintgen gap is 1/8 everywhere
    assert not p["wintgen_ideal"].holds and p["wintgen_ideal"].worst == pytest.approx(1 / 8)
    q = surface_predicates(reproduction_an.grid)
    assert q["semi_umbilic"].holds and not q["flat"].holds and not q["minimal"].holds
    assert min(reproduction_an.grid.wintgen_gap.ravel()) >= 0


def test_predicates_from_reports_match_grid(analyses):
    g = analyses["helix_cylinder"].grid
    a = surface_predicates(g)
    b = surface_predicates(g.reports())
    for name in a:
        assert a[name].holds == b[name].holds
        assert a[name].worst == pytest.approx(b[name].worst)
        assert a[name].witness == b[name].witness


def test_predicates_on_synthetic_minimal_and_wintgen_ideal():
    # minimal: B = 0, A = -Q^2 W^2; Wintgen ideal: ellipse is a circle
    minimal = synthetic_report(1.0, 0.5, -0.25, 0.0, 0.3)
    assert surface_predicates([minimal])["minimal"].holds
    cells, v = violations([minimal])
    assert v["minimal"][0] == 0
    flat = synthetic_report(1.0, 1.0, 0.0, 0.0, 0.0)
    assert surface_predicates([flat])["flat"].holds


def test_predicates_on_empty_input():
    p = surface_predicates([])
    assert all(x.holds for x in p.values())
