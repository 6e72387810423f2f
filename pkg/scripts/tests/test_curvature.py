import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.lib.errors import DimensionMismatchError, InvalidTupleError, StencilError
from src.lib.types import CurvatureMethod, MatrixTuple
from src.operators.jordan import JordanNilpotent
from src.operators.shifts import BilateralShift, UnilateralShift
from src.spectral.curvature import (
    glk_metric_det,
    ricci_analytic_sample,
    ricci_tensor_fd,
    ricci_trace_state,
    ricci_vector_state,
)
from src.spectral.fields import MetricField


def test_vector_state_curvature_is_nonpositive(crandn):
    for _ in range(200):
        v = crandn(4, 4)
        x = crandn(4)
        z = 3.0 * crandn(1)[0]
        assert ricci_vector_state(v, x, z) <= 1e-10


def test_vector_state_curvature_scale_invariant(crandn):
    v = crandn(3, 3)
    x = crandn(3)
    z = 2.0 + 1.0j
    assert_allclose(ricci_vector_state(v, 3.0 * x, z), ricci_vector_state(v, x, z), rtol=1e-10)


def test_eigenvector_gives_flat_metric(crandn):
    v = np.triu(crandn(4, 4))
    e1 = np.eye(4, dtype=complex)[0]
    assert abs(ricci_vector_state(v, e1, 5.0 + 2.0j)) <= 1e-10


def test_trace_state_two_by_two_closed_form():
    a, b, c = 0.3 + 0.1j, -0.5j, 0.7
    v = np.array([[a, c], [0.0, b]])
    z = 1.0 + 1.0j
    q = abs(z - a) ** 2 + abs(z - b) ** 2 + abs(c) ** 2
    expected = -(abs(a - b) ** 2 + 2.0 * abs(c) ** 2) / q**2
    assert_allclose(ricci_trace_state(v, z), expected, rtol=1e-10)


def test_finite_difference_matches_closed_form():
    v = np.array([[0.5, 1.0], [0.0, -0.5]])
    x = np.array([1.0, 1.0]) / np.sqrt(2.0)
    z = 1.5 + 1.0j
    fd = ricci_tensor_fd(MetricField.vector_state(v, x), z)
    assert fd.method is CurvatureMethod.FINITE_DIFFERENCE
    assert_allclose(fd.scalar_ricci, ricci_vector_state(v, x, z), rtol=1e-4)
    assert abs(fd.ricci[0, 0].imag) <= 1e-12


def test_finite_difference_is_second_order():
    v = np.array([[0.5, 1.0], [0.0, -0.5]])
    x = np.array([1.0, 1.0]) / np.sqrt(2.0)
    z = 1.5 + 1.0j
    exact = ricci_vector_state(v, x, z)
    fld = MetricField.vector_state(v, x)
    errs = [abs(ricci_tensor_fd(fld, z, h=h).scalar_ricci - exact) for h in (4e-2, 2e-2, 1e-2)]
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert abs(np.mean(orders) - 2.0) <= 0.3


def test_stencil_leaving_domain_raises():
    with pytest.raises(StencilError):
        ricci_tensor_fd(MetricField.trace_state(np.diag([0.0, 1.0])), 1e-9)
    with pytest.raises(StencilError):
        ricci_tensor_fd(MetricField.vector_state(JordanNilpotent(2), "e2"), 1e-4, h=1e-4)


def _spanning_tuple(crandn):
    """A well-conditioned basis of the 2 x 2 matrices."""
    return MatrixTuple(tuple(np.eye(4).reshape(4, 2, 2) + 0.1 * crandn(4, 2, 2)))


def _near_identity(crandn):
    return np.array([1.0, 0.0, 0.0, 1.0]) + 0.1 * crandn(4)


def test_glk_metric_determinant(crandn):
    a = _spanning_tuple(crandn)
    for _ in range(10):
        assert glk_metric_det(a, _near_identity(crandn)).relative_error <= 1e-8


def test_glk_trace_metric_is_ricci_flat(crandn):
    a = _spanning_tuple(crandn)
    fld = MetricField.from_tuple(a)
    for _ in range(3):
        sample = ricci_tensor_fd(fld, _near_identity(crandn))
        assert np.max(np.abs(sample.ricci)) <= 1e-4


def test_glk_needs_spanning_tuple(crandn):
    with pytest.raises(InvalidTupleError):
        glk_metric_det(MatrixTuple(tuple(crandn(3, 2, 2))), crandn(3))


def test_analytic_sample_wraps_closed_form():
    op = JordanNilpotent(3)
    sample = ricci_analytic_sample(op, 0.5 + 0.5j, x="e3")
    assert sample.method is CurvatureMethod.ANALYTIC
    assert sample.ricci.shape == (1, 1)
    assert sample.scalar_ricci == pytest.approx(ricci_vector_state(op, "e3", 0.5 + 0.5j))


def test_unilateral_shift_truncation_matches_closed_form(rng):
    op = UnilateralShift(256)
    for _ in range(20):
        z = (1.25 + 1.75 * rng.random()) * np.exp(2j * np.pi * rng.random())
        closed = 1.0 / (abs(z) ** 2 - 1.0)
        assert_allclose(op.vector_metric("1", z), closed, rtol=1e-12)
        assert_allclose(op.truncated_vector_metric("1", z), closed, rtol=1e-6)


@pytest.mark.parametrize("radius", [2.0, 3.0])
def test_unilateral_shift_resolvent_norm_converges(radius):
    op = UnilateralShift(256)
    z = radius * np.exp(0.4j)
    assert_allclose(op.resolvent_norm(z).value, 1.0 / (radius - 1.0), rtol=1e-3)


def test_bilateral_shift_truncation_factor(rng):
    op = BilateralShift(8)
    for _ in range(5):
        r = rng.choice([0.5 + 0.4 * rng.random(), 1.1 + rng.random()])
        z = r * np.exp(2j * np.pi * rng.random())
        closed = 1.0 / abs(1.0 - abs(z) ** 2)
        assert_allclose(op.vector_metric("1", z), closed * op.truncation_factor(z), rtol=1e-10)


def test_field_dimension_checks():
    fld = MetricField.euclidean(2)
    assert fld.speed_sq([0.0, 0.0], [3.0, 4.0j]) == pytest.approx(25.0)
    with pytest.raises(DimensionMismatchError):
        fld([0.0])
    bad = MetricField.from_function(lambda z: np.eye(2), 1)
    with pytest.raises(DimensionMismatchError):
        bad([0.0])
