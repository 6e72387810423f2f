import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate

from src.lib.data import dump_json, matrix_to_pairs
from src.lib.errors import NotIsolatedError, SingularPointError
from src.lib.linalg import basis_vector, jordan_block
from src.operators.dihedral import DihedralPencil
from src.operators.gallery import from_dict, from_spec
from src.operators.jordan import JordanNilpotent, nilpotent_resolvent_apply
from src.operators.matrix import FiniteMatrix, nilpotency_index
from src.operators.shifts import BilateralShift, UnilateralShift, shift_vector_metric
from src.operators.volterra import (
    Indicator,
    Volterra,
    log_volterra_indicator_norm_sq,
    sample_grid,
    volterra_resolvent_apply,
)
from src.spectral.fk_determinant import fk_det


# gallery ---------------------------------------------------------------------


@pytest.mark.parametrize(
    "spec, cls",
    [
        ("jordan:4", JordanNilpotent),
        ("volterra", Volterra),
        ("volterra:65", Volterra),
        ("ushift:8", UnilateralShift),
        ("bshift:4", BilateralShift),
        ("dihedral:8", DihedralPencil),
    ],
)
def test_from_spec_builds_variants(spec, cls):
    op = from_spec(spec)
    assert isinstance(op, cls)
    rebuilt = from_dict(op.to_dict())
    assert type(rebuilt) is cls
    assert rebuilt.params == op.params


@pytest.mark.parametrize("spec", ["jordan", "jordan:x", "hilbert:3", "matrix"])
def test_from_spec_rejects_bad_specs(spec):
    with pytest.raises(ValueError):
        from_spec(spec)


def test_matrix_file_with_isolated_point(tmp_path):
    path = tmp_path / "v.json"
    dump_json({"matrix": matrix_to_pairs(jordan_block(3)), "isolated_point": [0.0, 0.0]}, path)
    op = from_spec(f"matrix:{path}")
    assert isinstance(op, FiniteMatrix)
    assert op.isolated_zero
    assert op.spec_string() == f"matrix:{path}"


# Jordan block ------------------------------------------------------------------


def test_jordan_resolvent_matches_dense_solve(crandn):
    x = crandn(4)
    z = 0.5 + 0.2j
    expected = np.linalg.solve(jordan_block(4) - z * np.eye(4), x)
    assert_allclose(nilpotent_resolvent_apply(4, x, z), expected, rtol=1e-12)
    op = JordanNilpotent(4)
    dense_norm = np.linalg.norm(np.linalg.inv(jordan_block(4) - z * np.eye(4)), 2)
    assert_allclose(op.resolvent_norm(z).value, dense_norm, rtol=1e-12)
    with pytest.raises(SingularPointError):
        op.resolvent_apply("e1", 0.0)


def test_jordan_log_metric_avoids_overflow():
    op = JordanNilpotent(6)
    z = 1e-60
    # |(J - z)^{-1} e6|^2 ~ |z|^{-12}
    assert op.log_vector_metric("e6", z) == pytest.approx(-12.0 * np.log(z), rel=1e-10)


def test_jordan_two_norm_at_small_radius():
    # |(J2 - z)^{-1}| = 1/|z| + 1/|z|^2 asymptotically; exact value at 0.1
    norm = JordanNilpotent(2).resolvent_norm(0.1).value
    assert_allclose(norm, np.linalg.norm(np.linalg.inv(jordan_block(2) - 0.1 * np.eye(2)), 2), rtol=1e-12)
    assert 100.0 < norm < 101.5


# shifts ----------------------------------------------------------------------------


def test_shift_spectra_and_vectors():
    u = UnilateralShift(16)
    assert u.in_spectrum(0.5) and u.in_spectrum(1.0) and not u.in_spectrum(1.5)
    assert_allclose(u.vector("1"), basis_vector(16, 1))
    b = BilateralShift(4)
    assert b.in_spectrum(np.exp(0.3j)) and not b.in_spectrum(0.5)
    assert np.linalg.norm(b.vector("one")) == pytest.approx(1.0)
    with pytest.raises(SingularPointError):
        shift_vector_metric("ushift", 0.5)
    assert shift_vector_metric("bshift", 0.5) == pytest.approx(1.0 / 0.75)


def test_unilateral_metric_of_constant_is_closed_form_near_the_circle():
    op = UnilateralShift(64)
    z = 1.0 + 1e-6
    closed = 1.0 / (z * z - 1.0)
    assert_allclose(op.vector_metric("1", z), closed, rtol=1e-10)
    assert_allclose(op.vector_metric(3.0 * basis_vector(64, 1), z), 9.0 * closed, rtol=1e-10)
    # the truncation saturates at about N here
    assert op.truncated_vector_metric("1", z) < 65.0
    x = basis_vector(64, 2)
    assert_allclose(op.vector_metric(x, 2.0), np.linalg.norm(op.resolvent_apply(x, 2.0)) ** 2, rtol=1e-12)


def test_unilateral_truncation_tail():
    op = UnilateralShift(32)
    z = 1.1
    assert_allclose(op.truncated_vector_metric("1", z) + op.truncation_tail(z), 1.0 / (z * z - 1.0), rtol=1e-10)


# Volterra ----------------------------------------------------------------------------


def test_volterra_resolvent_of_constant_function():
    z = 0.5
    w = 1.0 / z
    x = sample_grid(1025)
    approx = volterra_resolvent_apply(np.ones(1025), z)
    assert_allclose(approx, -w * np.exp(w * x), rtol=1e-5)


@pytest.mark.parametrize("z", [0.3 + 0.4j, -0.2 + 0.1j, 0.5j])
def test_volterra_indicator_norm_closed_form(z):
    alpha = 0.25
    w = 1.0 / z
    integrand = lambda x: abs(w * np.exp(w * (x - alpha))) ** 2
    direct, _ = integrate.quad(integrand, alpha, 1.0, epsrel=1e-12)
    assert_allclose(np.exp(log_volterra_indicator_norm_sq(alpha, z)), direct, rtol=1e-8)


def test_volterra_bracket_is_ordered():
    op = Volterra(65)
    for z in (0.1, 0.05 + 0.05j, -0.3, 0.2j):
        norm = op.resolvent_norm(z)
        assert norm.lower <= norm.upper
        lo, hi = op.log_metric_bracket(z)
        assert lo <= hi


def test_volterra_vectors():
    op = Volterra()
    assert op.vector("f_alpha:0.25") == Indicator(0.25)
    assert op.vector(0.5) == Indicator(0.5)
    with pytest.raises(ValueError):
        op.vector("e1")
    with pytest.raises(ValueError):
        Indicator(1.0)


def test_volterra_apply_integrates():
    op = Volterra(129)
    x = sample_grid(129)
    assert_allclose(op.apply(np.ones(129)), x, atol=1e-12)
    # f_0 carries the value 1/2 at the jump node x = 0
    assert_allclose(op.apply(0.0)[1:], x[1:] - 0.25 * x[1], atol=1e-12)


# dihedral truncation ---------------------------------------------------------------


def test_dihedral_blocks_factor_the_determinant(crandn):
    pencil = DihedralPencil(6)
    z = 0.4 * crandn(2)
    dense = np.linalg.det(pencil.pencil_matrix(z))
    assert_allclose(np.prod(pencil.block_determinants(z)), dense, rtol=1e-10)
    assert_allclose(pencil.fk_det_blocks(z), fk_det(pencil.pencil_matrix(z)), rtol=1e-10)


def test_dihedral_spectrum():
    pencil = DihedralPencil(8)
    assert pencil.in_spectrum((1.0, 0.0))
    assert pencil.in_spectrum((0.0, -1.0))
    assert not pencil.in_spectrum((0.3, 0.2))
    assert pencil.conic_residual((1.0, 0.0)) == pytest.approx(0.0, abs=1e-14)
    a = pencil.as_tuple()
    assert a.normalized and a.n == 3 and a.k == 16


# finite matrices -------------------------------------------------------------------


def _jordan_plus_three():
    v = np.zeros((3, 3), dtype=complex)
    v[:2, :2] = jordan_block(2)
    v[2, 2] = 3.0
    return v


def test_riesz_split_resolvent_matches_dense_solve():
    v = _jordan_plus_three()
    op = FiniteMatrix(v, isolated_point=0.0)
    assert op.split is not None and op.split.index == 2
    assert op.split.radius == pytest.approx(1.5)
    z = 0.3 + 0.2j
    assert_allclose(op.resolvent_matrix(z), np.linalg.inv(v - z * np.eye(3)), rtol=1e-10, atol=1e-12)


def test_riesz_split_near_the_isolated_point():
    v = _jordan_plus_three()
    op = FiniteMatrix(v, isolated_point=0.0)
    z = 1e-7
    expected = np.zeros((3, 3), dtype=complex)
    expected[:2, :2] = -(np.eye(2) / z + jordan_block(2) / z**2)
    expected[2, 2] = 1.0 / (3.0 - z)
    assert_allclose(op.resolvent_matrix(z), expected, rtol=1e-10, atol=1e-6)
    assert not op.in_resolvent_set(0.0)
    assert op.in_resolvent_set(1e-12)


def test_not_isolated_points_are_rejected():
    with pytest.raises(NotIsolatedError):
        FiniteMatrix(np.diag([1.0, 2.0]), isolated_point=0.0)
    with pytest.raises(NotIsolatedError):
        FiniteMatrix(np.diag([0.0, 1e-3]), isolated_point=0.0)


def test_nilpotency_index():
    assert nilpotency_index(jordan_block(4)) == 4
    assert nilpotency_index(np.diag([1.0, 0.0])) is None


def test_matrix_without_split_uses_threshold():
    op = FiniteMatrix(np.diag([0.0, 1.0]))
    assert not op.isolated_zero
    assert not op.in_resolvent_set(1e-10)
    assert op.in_resolvent_set(0.5)
