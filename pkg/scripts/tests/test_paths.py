import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.geometry.paths import (
    ParamPath,
    blowup_profile,
    circle_length,
    distance_lower_bound,
    path_length,
    winding_number,
)
from src.lib.errors import DimensionMismatchError, SingularPointError
from src.lib.types import MatrixTuple
from src.operators.jordan import JordanNilpotent
from src.operators.shifts import UnilateralShift, shift_vector_metric
from src.spectral.fields import MetricField


def _unilateral_field():
    return MetricField.from_function(
        lambda z: shift_vector_metric("ushift", z[0]),
        1,
        contains=lambda z: abs(z[0]) > 1.0 + 1e-12,
    )


def test_euclidean_lengths():
    assert path_length(MetricField.euclidean(1), ParamPath.segment(0.0, 1.0)).value == pytest.approx(1.0)
    seg = ParamPath.segment([0.0, 0.0], [3.0, 4.0j])
    assert path_length(MetricField.euclidean(2), seg).value == pytest.approx(5.0)
    poly = ParamPath.polyline([0.0, 1.0, 1.0 + 1.0j])
    assert path_length(MetricField.euclidean(1), poly).value == pytest.approx(2.0)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        path_length(MetricField.euclidean(2), ParamPath.segment(0.0, 1.0))


def test_unilateral_segment_regular_endpoints():
    a = 1.0 + 1e-8
    length = path_length(_unilateral_field(), ParamPath.segment(a, 2.0))
    assert not length.diverged
    assert length.value == pytest.approx(np.arccosh(2.0) - np.arccosh(a), abs=1e-6)


def test_unilateral_gallery_operator_gives_arccosh_length():
    a = 1.0 + 1e-8
    fld = MetricField.vector_state(UnilateralShift(256), "1")
    length = path_length(fld, ParamPath.segment(a, 2.0))
    assert length.value == pytest.approx(np.arccosh(2.0) - np.arccosh(a), abs=1e-4)


def test_unilateral_segment_to_the_circle_is_improper_but_finite():
    length = path_length(_unilateral_field(), ParamPath.segment(1.0, 2.0))
    assert not length.diverged
    assert length.levels > 0
    assert length.value == pytest.approx(np.arccosh(2.0), abs=1e-6)
    assert length.value < np.sqrt(2.0)


def test_interior_vertex_outside_domain_raises():
    with pytest.raises(SingularPointError):
        path_length(_unilateral_field(), ParamPath.polyline([2.0, 0.5, 3.0]))


def test_trace_metric_diverges_at_an_eigenvalue(crandn):
    v = crandn(3, 3)
    eig = np.linalg.eigvals(v)
    lam = eig[0]
    delta = np.min(np.abs(eig[1:] - lam))
    d = np.exp(0.7j)
    fld = MetricField.trace_state(v)

    eps = np.array([1e-2, 1e-3, 1e-4, 1e-5, 1e-6])
    lengths = [
        path_length(fld, ParamPath.segment(lam + 0.5 * delta * d, lam + e * delta * d)).value for e in eps
    ]
    slope = np.polyfit(np.log(1.0 / eps), lengths, 1)[0]
    assert slope > 0.1

    improper = path_length(fld, ParamPath.segment(lam + 0.5 * delta * d, lam))
    assert improper.diverged
    assert improper.value == np.inf


def test_trace_metric_length_dominates_log_det_gap(rng, crandn):
    # |phi(log|A(p)|) - phi(log|A(q)|)| never exceeds the trace-metric distance
    for _ in range(50):
        a = MatrixTuple(tuple(crandn(2, 3, 3)))
        vertices = crandn(3, 2)
        length = path_length(MetricField.from_tuple(a), ParamPath.polyline(vertices))
        bound = distance_lower_bound(a, vertices[0], vertices[-1])
        assert length.value >= bound - 1e-6 * max(1.0, bound)


def test_distance_lower_bound_scalar():
    a = MatrixTuple((np.eye(1),))
    assert distance_lower_bound(a, [1.0], [np.e]) == pytest.approx(1.0)
    assert distance_lower_bound(a, [0.0], [1.0]) == np.inf
    with pytest.raises(SingularPointError):
        distance_lower_bound(a, [0.0], [0.0])


def test_winding_numbers():
    assert winding_number(ParamPath.circle(), 0.0) == 1
    assert winding_number(ParamPath.circle(turns=2), 0.3) == 2
    assert winding_number(ParamPath.circle(), 3.0) == 0
    assert winding_number(ParamPath.circle(orientation=-1), 0.0) == -1
    with pytest.raises(SingularPointError):
        winding_number(ParamPath.circle(), 1.0)


def test_circle_length_of_zero_operator():
    assert circle_length(np.zeros((1, 1)), 0.5, x=np.array([1.0])) == pytest.approx(2.0 * np.pi, rel=1e-8)


def test_circle_length_jordan_eigenvector():
    # (J - z)^{-1} e1 = -e1/z
    value = circle_length(JordanNilpotent(2), 1e-2, x="e1")
    assert value == pytest.approx(2.0 * np.pi, rel=1e-8)


def test_circle_length_partial_projection():
    v = np.diag([0.0, 5.0])
    x = np.array([1.0, 1.0]) / np.sqrt(2.0)
    assert circle_length(v, 0.1, x=x) >= 2.0 * np.pi / np.sqrt(2.0)


def test_circle_meeting_spectrum_raises():
    with pytest.raises(SingularPointError):
        circle_length(np.diag([0.0, 1.0]), 1.0, x=np.array([1.0, 0.0]))


def test_enclosing_circles_are_at_least_two_pi_per_turn(rng, crandn):
    for _ in range(50):
        k = int(rng.integers(2, 7))
        v = crandn(k, k)
        x = crandn(k)
        x /= np.linalg.norm(x)
        radius = 1.5 * np.max(np.abs(np.linalg.eigvals(v))) + 0.5
        for turns in (1, 2):
            assert circle_length(v, radius, x=x, turns=turns) >= 2.0 * np.pi * turns - 1e-6


def test_blowup_profile_detects_nilpotency_order():
    radii = 0.1 * 10.0 ** (-0.5 * np.arange(6))
    op = JordanNilpotent(3)
    assert blowup_profile(op, radii, order=3).bounded
    assert not blowup_profile(op, radii, order=2).bounded


def test_path_dict_round_trip():
    path = ParamPath.polyline([[0.0, 1.0], [1.0j, 2.0]])
    back = ParamPath.from_dict(path.to_dict())
    assert_allclose(back.vertices, path.vertices)
    circle = ParamPath.from_dict(ParamPath.circle(1.0, 0.5, turns=2).to_dict())
    assert circle.turns == 2 and circle.radius == 0.5
    with pytest.raises(ValueError):
        ParamPath.from_dict({"kind": "spiral"})
