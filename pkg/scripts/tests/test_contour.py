import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.geometry.contour import ContourSpec, principal_part, riesz_projection
from src.lib.errors import ContourError, ConvergenceError
from src.lib.linalg import basis_vector, jordan_block
from src.operators.jordan import JordanNilpotent


@pytest.mark.parametrize("n", [2, 3, 5])
def test_nilpotent_projection_is_identity(n):
    res = riesz_projection(jordan_block(n), ContourSpec(0.0, 1.0))
    assert_allclose(res.P0, np.eye(n), atol=1e-10)
    assert_allclose(res.V0, jordan_block(n), atol=1e-10)
    assert res.idempotency_defect() <= 1e-10


def test_projection_onto_one_eigenvalue():
    res = riesz_projection(np.diag([0.0, 5.0]), ContourSpec(0.0, 1.0))
    assert_allclose(res.P0, np.diag([1.0, 0.0]), atol=1e-10)
    assert_allclose(res.V0, np.zeros((2, 2)), atol=1e-10)


def test_projection_of_gallery_operator():
    res = riesz_projection(JordanNilpotent(3), ContourSpec(0.0, 0.5))
    assert_allclose(res.shifted_nilpotent, jordan_block(3), atol=1e-10)


def test_random_projections_are_spectral(rng, crandn):
    for _ in range(100):
        v = crandn(4, 4)
        eig = np.linalg.eigvals(v)
        c = eig[0]
        radius = 0.5 * np.min(np.abs(eig[1:] - c))
        res = riesz_projection(v, ContourSpec(c, radius))
        scale = max(1.0, np.linalg.norm(res.P0)) ** 2 * max(1.0, np.linalg.norm(v))
        assert res.idempotency_defect() <= 1e-8 * scale
        assert np.linalg.norm(res.P0 @ v - v @ res.P0) <= 1e-8 * scale
        assert np.trace(res.P0).real == pytest.approx(1.0, abs=1e-6 * scale)


def test_principal_part_walks_down_the_jordan_chain():
    terms = principal_part(jordan_block(4), basis_vector(4, 4), ContourSpec(0.0, 1.0))
    assert len(terms) == 5
    for j, t in enumerate(terms[:4]):
        assert_allclose(t, basis_vector(4, 4 - j), atol=1e-10)
    assert np.linalg.norm(terms[-1]) < 1e-12

    short = principal_part(jordan_block(2), basis_vector(2, 2), ContourSpec(0.0, 1.0))
    assert len(short) == 3
    assert_allclose(short[1], basis_vector(2, 1), atol=1e-10)


def test_contour_through_spectrum_raises():
    with pytest.raises(ContourError):
        riesz_projection(np.diag([0.0, 1.0]), ContourSpec(0.0, 1.0))


def test_node_limit_exhaustion():
    with pytest.raises(ConvergenceError):
        riesz_projection(np.diag([0.0, 1.05]), ContourSpec(0.0, 1.0, nodes=8, max_nodes=16))


def test_contour_spec_validation():
    with pytest.raises(ValueError):
        ContourSpec(0.0, 0.0)
    with pytest.raises(ValueError):
        ContourSpec(0.0, 1.0, nodes=4)
