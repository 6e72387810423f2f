import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.lib.errors import DimensionMismatchError, SingularPointError
from src.lib.grid import GridAxis
from src.lib.linalg import jordan_block
from src.lib.types import MatrixTuple, PencilPoint
from src.spectral.pencil import (
    FreeAxis,
    SliceSpec,
    in_joint_spectrum,
    left_multiply,
    maurer_cartan_coeffs,
    pencil_eval,
    resolvent,
    spectrum_slice,
)


@pytest.fixture
def diagonal_tuple():
    return MatrixTuple((np.eye(3), np.diag([1.0, 2.0, 3.0])))


def test_pencil_eval_is_linear_combination(crandn):
    mats = crandn(3, 4, 4)
    a = MatrixTuple(tuple(mats))
    z = crandn(3)
    assert_allclose(pencil_eval(a, z), np.einsum("j,jab->ab", z, mats), rtol=1e-12)
    with pytest.raises(DimensionMismatchError):
        pencil_eval(a, z[:2])


def test_resolvent_inverse_and_singular_point(diagonal_tuple):
    sample = resolvent(diagonal_tuple, PencilPoint.of(1.0, 0.5j))
    assert sample.invertible
    assert_allclose(sample.inverse @ sample.pencil_value, np.eye(3), atol=1e-12)

    singular = resolvent(diagonal_tuple, PencilPoint.of(2.0, -1.0))
    assert not singular.invertible
    assert singular.inverse is None
    assert in_joint_spectrum(diagonal_tuple, PencilPoint.of(2.0, -1.0))


def test_joint_spectrum_is_projective(diagonal_tuple, crandn):
    z = PencilPoint.of(3.0, -1.0)
    assert in_joint_spectrum(diagonal_tuple, z)
    for lam in crandn(5):
        assert in_joint_spectrum(diagonal_tuple, z.scaled(lam))
    assert not in_joint_spectrum(diagonal_tuple, PencilPoint.of(3.0, 1.0))


def test_single_nilpotent_is_everywhere_singular(crandn):
    a = MatrixTuple((jordan_block(2),))
    for z in crandn(4):
        assert in_joint_spectrum(a, [z])


def test_maurer_cartan_raises_on_spectrum(diagonal_tuple):
    with pytest.raises(SingularPointError):
        maurer_cartan_coeffs(diagonal_tuple, PencilPoint.of(1.0, -1.0))
    omega = maurer_cartan_coeffs(diagonal_tuple, PencilPoint.of(1.0, 1.0))
    a = pencil_eval(diagonal_tuple, PencilPoint.of(1.0, 1.0))
    assert_allclose(a @ omega[1], diagonal_tuple.matrices[1], atol=1e-12)


def test_left_multiplication_keeps_spectrum(diagonal_tuple, crandn):
    l = np.eye(3) + 0.3 * crandn(3, 3)
    b = left_multiply(diagonal_tuple, l)
    for z in (PencilPoint.of(2.0, -1.0), PencilPoint.of(1.0, 0.3 + 0.2j), PencilPoint.of(3.0, -1.0)):
        assert in_joint_spectrum(b, z) == in_joint_spectrum(diagonal_tuple, z)


def test_spectrum_slice_finds_diagonal_roots(diagonal_tuple):
    spec = SliceSpec(base=PencilPoint.of(0.0, 1.0), axes=(FreeAxis(0, GridAxis(-4.0, 0.0, 81)),))
    points = spectrum_slice(diagonal_tuple, spec)
    assert len(points) == 3
    assert_allclose([p.params[0] for p in points], [-3.0, -2.0, -1.0], atol=1e-3)
    assert all(p.sigma_ratio <= spec.refine_tol for p in points)
    # ordered by grid index
    assert [p.grid_index for p in points] == sorted(p.grid_index for p in points)


def test_spectrum_slice_jordan_pencil():
    a = MatrixTuple.normalized_from(jordan_block(2))
    axis = GridAxis(-1.0, 1.0, 21)
    spec = SliceSpec.complex_plane(PencilPoint.of(0.0, 1.0), 0, axis, axis, refine_tol=1e-4)
    points = spectrum_slice(a, spec)
    assert points
    for p in points:
        assert abs(p.z.z[0]) < 1e-2
        assert p.z.z[1] == 1.0


def test_slice_spec_validation():
    with pytest.raises(ValueError):
        SliceSpec(base=PencilPoint.of(0.0, 1.0), axes=())
    with pytest.raises(DimensionMismatchError):
        SliceSpec(base=PencilPoint.of(0.0, 1.0), axes=(FreeAxis(2, GridAxis(0.0, 1.0, 3)),))
