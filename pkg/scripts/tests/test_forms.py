import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.lib.errors import InvalidStateError, InvalidTupleError
from src.lib.types import MatrixTuple, PencilPoint
from src.operators.dihedral import DihedralPencil
from src.spectral.forms import (
    StateFunctional,
    closedness_defect,
    faithfulness_check,
    kahler_defect,
    metric_matrix,
    sandwich_bounds,
)
from src.spectral.pencil import left_multiply


def _commuting_tuple(rng, k=4):
    d1 = np.diag(rng.standard_normal(k) + 1j * rng.standard_normal(k))
    d2 = np.diag(rng.standard_normal(k) + 1j * rng.standard_normal(k))
    return MatrixTuple.normalized_from(d1, d2)


def test_state_validation():
    with pytest.raises(InvalidStateError):
        StateFunctional.vector_state([1.0, 1.0])
    with pytest.raises(InvalidStateError):
        StateFunctional.density_state(np.array([[0.5, 0.1], [0.0, 0.5]]))
    with pytest.raises(InvalidStateError):
        StateFunctional.density_state(np.eye(2))
    with pytest.raises(InvalidStateError):
        StateFunctional.density_state(np.diag([1.5, -0.5]))


def test_states_are_normalized(crandn):
    x = crandn(3)
    x /= np.linalg.norm(x)
    for phi in (
        StateFunctional.trace(),
        StateFunctional.vector_state(x),
        StateFunctional.density_state(np.diag([0.2, 0.3, 0.5])),
    ):
        assert phi(np.eye(3)) == pytest.approx(1.0)


def test_state_dict_round_trip():
    phi = StateFunctional.density_state(np.diag([0.25, 0.75]))
    back = StateFunctional.from_dict(phi.to_dict())
    assert back.kind is phi.kind
    assert_allclose(back.density, phi.density)
    with pytest.raises(InvalidStateError):
        StateFunctional.from_dict({"kind": "nope"})


def test_scalar_metric_is_inverse_modulus_squared():
    a = MatrixTuple((np.eye(1),))
    g = metric_matrix(a, [1.0 + 1.0j], StateFunctional.trace()).g
    assert_allclose(g, [[0.5]], rtol=1e-14)


def test_metric_is_positive_definite(rng, crandn):
    a = MatrixTuple(tuple(crandn(3, 3, 3)))
    x = crandn(3)
    x /= np.linalg.norm(x)
    for _ in range(10):
        z = crandn(3)
        sample = metric_matrix(a, z, StateFunctional.trace())
        assert sample.positive_definite
        assert_allclose(sample.g, sample.g.conj().T, atol=1e-14)
        vec_sample = metric_matrix(a, z, StateFunctional.vector_state(x))
        assert vec_sample.min_eigenvalue >= -1e-10 * np.max(np.abs(vec_sample.g))


def test_metric_invariant_under_left_multiplication(crandn):
    a = MatrixTuple(tuple(crandn(2, 3, 3)))
    b = left_multiply(a, np.eye(3) + 0.2 * crandn(3, 3))
    z = crandn(2)
    phi = StateFunctional.trace()
    assert_allclose(metric_matrix(b, z, phi).g, metric_matrix(a, z, phi).g, rtol=1e-8, atol=1e-12)


def test_faithfulness():
    a = MatrixTuple((np.eye(2), np.diag([1.0, 0.0])))
    assert faithfulness_check(StateFunctional.trace(), a) > 0.1
    # e2 does not see the E11 direction
    assert faithfulness_check(StateFunctional.vector_state([0.0, 1.0]), a) == pytest.approx(0.0, abs=1e-14)


def test_kahler_defect_vanishes_for_commuting_tuples(rng, crandn):
    a = _commuting_tuple(rng)
    for _ in range(10):
        z = crandn(3)
        assert kahler_defect(a, z) <= 1e-10


def test_kahler_defect_detects_dihedral_noncommutativity(rng):
    pencil = DihedralPencil(16)
    a = pencil.as_tuple()
    for _ in range(10):
        z1, z2 = (0.2 + 0.2 * rng.random(2)) * np.exp(2j * np.pi * rng.random(2))
        assert kahler_defect(a, pencil.pencil_point((z1, z2))) > 1e-2


def test_kahler_defect_needs_normalized_tuple(crandn):
    with pytest.raises(InvalidTupleError):
        kahler_defect(MatrixTuple(tuple(crandn(2, 2, 2))), crandn(2))


def test_closedness_for_commuting_tuple(rng, crandn):
    a = _commuting_tuple(rng, k=3)
    z = PencilPoint.of(1.0, 0.2 + 0.1j, -0.1 + 0.3j)
    assert closedness_defect(a, z, StateFunctional.trace()) <= 1e-6


def test_sandwich_bounds_hold(crandn):
    a = MatrixTuple(tuple(crandn(3, 3, 3)))
    x = crandn(3)
    x /= np.linalg.norm(x)
    for phi in (StateFunctional.trace(), StateFunctional.vector_state(x)):
        for _ in range(5):
            lower, mid, upper = sandwich_bounds(a, crandn(3), phi, crandn(3))
            assert lower <= mid * (1 + 1e-9) + 1e-14
            assert mid <= upper * (1 + 1e-9) + 1e-14
