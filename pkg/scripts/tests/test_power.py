import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.lib.errors import NonCommutingError, NotIsolatedError
from src.lib.linalg import basis_vector, jordan_block
from src.operators.jordan import JordanNilpotent
from src.operators.volterra import Volterra
from src.power.exponent import PowerSchedule, as_isolated_operator, power_exponent, power_set_sample
from src.power.filtration import filtration_probe, nilpotency_probe, similarity_invariance_check


def test_schedule_validation():
    with pytest.raises(ValueError):
        PowerSchedule(window=0)
    with pytest.raises(ValueError):
        PowerSchedule(count=2, window=3)
    with pytest.raises(ValueError):
        PowerSchedule(q=1.5)
    angles = PowerSchedule().angle_set(right_half_plane=True)
    assert 0.0 in angles
    assert np.all(np.cos(angles) > 1e-9)


@pytest.mark.parametrize("n", [2, 3, 4, 6])
def test_jordan_basis_exponents(n):
    op = JordanNilpotent(n)
    for j in range(1, n + 1):
        est = power_exponent(op, f"e{j}")
        assert est.k_hat == pytest.approx(j / n, abs=0.03)
        assert est.bracket is None


def test_exponent_is_scale_invariant(crandn):
    op = JordanNilpotent(4)
    x = crandn(4)
    assert_allclose(power_exponent(op, 5.0 * x).k_hat, power_exponent(op, x).k_hat, rtol=1e-12)


def test_vector_with_top_component_has_full_exponent():
    assert power_exponent(JordanNilpotent(4), np.ones(4)).k_hat == pytest.approx(1.0, abs=0.03)


def test_bare_matrix_power_set():
    sample = power_set_sample(jordan_block(3), ["e1", "e2", "e3", np.array([1.0, 1.0, 0.0])])
    assert_allclose(sample.values, [1 / 3, 2 / 3, 1.0], atol=0.03)
    assert set(sample.entries[1].witnesses) == {"e2", "custom"}
    frame = sample.to_frame()
    assert list(frame.columns) == ["k_hat", "witnesses"]
    assert len(frame) == 3


def test_operator_without_isolated_zero_is_rejected():
    with pytest.raises(NotIsolatedError):
        as_isolated_operator(np.diag([1.0, 2.0]))


@pytest.mark.parametrize("alpha", [0.0, 0.25, 0.5, 0.75])
def test_volterra_indicator_exponents(alpha):
    est = power_exponent(Volterra(), f"f_alpha:{alpha}")
    lo, hi = est.bracket
    assert lo - 1e-3 <= 1.0 - alpha <= hi + 1e-3
    assert hi - lo <= 0.1
    assert est.k_hat == pytest.approx(1.0 - alpha, abs=0.01)


def test_volterra_power_set_is_ordered():
    sample = power_set_sample(Volterra(), [0.75, 0.5, 0.25, 0.0])
    assert_allclose(sample.values, [0.25, 0.5, 0.75, 1.0], atol=0.01)


def test_filtration_of_jordan_block():
    corpus = [basis_vector(4, j) for j in range(1, 5)]
    powers = [np.linalg.matrix_power(jordan_block(4), p) for p in (1, 2, 3)]
    probe = filtration_probe(JordanNilpotent(4), 0.5, corpus, powers)
    assert probe.members == [0, 1]
    assert probe.dimension == 2
    assert probe.commutant_defect <= 1e-6


def test_filtration_input_checks():
    corpus = [basis_vector(4, 1)]
    with pytest.raises(ValueError):
        filtration_probe(JordanNilpotent(4), 1.5, corpus, [])
    with pytest.raises(NonCommutingError):
        filtration_probe(JordanNilpotent(4), 0.5, corpus, [np.diag([1.0, 2.0, 3.0, 4.0])])


@pytest.mark.parametrize("n", [3, 4])
def test_similarity_invariance(n, crandn):
    g = crandn(n, n)
    s = np.eye(n) + 0.25 * g / np.linalg.norm(g, 2)
    vectors = [np.linalg.solve(s, basis_vector(n, j)) for j in range(1, n + 1)]
    report = similarity_invariance_check(JordanNilpotent(n), s, vectors)
    assert report.max_discrepancy <= 0.05
    assert_allclose(report.table["k_original"], np.arange(1, n + 1) / n, atol=0.03)


def test_similarity_condition_limit():
    s = np.diag([1.0, 1e-7, 1.0])
    with pytest.raises(ValueError):
        similarity_invariance_check(JordanNilpotent(3), s, ["e1"])


def test_nilpotency_probe():
    bounded = nilpotency_probe(JordanNilpotent(3), 3)
    assert bounded.bounded
    assert bounded.v0_power_norm <= 1e-8
    unbounded = nilpotency_probe(JordanNilpotent(3), 2)
    assert not unbounded.bounded
    assert unbounded.v0_power_norm == pytest.approx(1.0, abs=1e-8)
