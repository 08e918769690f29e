import numpy as np
import pytest

from qsep.errors import (
    AllZeroTensor,
    DimensionMismatch,
    NotOrthogonal,
    NotRankTwo,
    NotUnitary,
    RankOne,
)
from qsep.state import (
    DensityMatrix,
    RankTwoState,
    apply_local_unitaries,
    as_profile,
    basis_state,
    canonical_phase,
    eigen_residuals,
    low_rank_residual,
    make_pure_state,
    maximally_entangled_state,
    product_state,
    random_product_state,
    random_pure_state,
    random_unitary,
    rank2_eigendecompose,
)


def test_profile_rejects_bad_dims():
    with pytest.raises(Exception):
        as_profile([2])
    with pytest.raises(Exception):
        as_profile([2, 1, 3])


def test_make_pure_state_normalizes():
    s = make_pure_state(np.arange(8, dtype=float).reshape(2, 2, 2))
    assert np.isclose(np.linalg.norm(s.vector), 1.0)


def test_zero_tensor_rejected():
    with pytest.raises(AllZeroTensor):
        make_pure_state(np.zeros((2, 2, 2)))


def test_basis_and_product_state():
    s = basis_state((2, 3, 2), (1, 2, 0))
    assert s.amp[1, 2, 0] == 1.0
    p = product_state([[0, 1], [0, 0, 1], [1, 0]])
    assert np.allclose(p.vector, s.vector)


def test_maximally_entangled_uses_smallest_dim():
    s = maximally_entangled_state((2, 3, 4))
    assert np.isclose(s.amp[0, 0, 0], 1 / np.sqrt(2))
    assert np.isclose(s.amp[1, 1, 1], 1 / np.sqrt(2))
    assert np.count_nonzero(s.amp) == 2


def test_canonical_phase_makes_largest_amplitude_real_positive():
    s = make_pure_state(np.array([0.1, 0.7j, 0.2, 0.0]).reshape(2, 2))
    c = canonical_phase(s)
    k = np.argmax(np.abs(c.vector))
    assert c.vector[k].real > 0 and abs(c.vector[k].imag) < 1e-15


def test_random_unitary_is_unitary():
    u = random_unitary(5, 3)
    assert np.allclose(u @ u.conj().T, np.eye(5), atol=1e-12)


def test_local_unitary_validation():
    s = random_pure_state((2, 2, 2), 0)
    with pytest.raises(DimensionMismatch):
        apply_local_unitaries(s, [np.eye(2)] * 2)
    with pytest.raises(NotUnitary):
        apply_local_unitaries(s, [np.eye(2), 2 * np.eye(2), np.eye(2)])


def test_rank_two_state_requires_orthogonality():
    a = random_pure_state((2, 2, 2), 1)
    with pytest.raises(NotOrthogonal):
        RankTwoState(0.5, a, a)


def test_eigendecompose_round_trip(dims):
    a, b = random_product_state(dims, 1), random_product_state(dims, 2)
    rho = DensityMatrix.from_mixture([0.3, 0.7], [a, b])
    r2 = rank2_eigendecompose(rho)
    assert r2.p >= r2.q
    assert max(eigen_residuals(rho, r2)) < 1e-12
    assert np.linalg.norm(r2.dense().entries - rho.entries) < 1e-12


def test_eigendecompose_rank_errors():
    dims = (2, 2, 2)
    a = random_pure_state(dims, 4)
    with pytest.raises(RankOne):
        rank2_eigendecompose(DensityMatrix.from_mixture([1.0], [a]))
    states = [basis_state(dims, i) for i in [(0, 0, 0), (0, 1, 1), (1, 1, 1)]]
    with pytest.raises(NotRankTwo) as info:
        rank2_eigendecompose(DensityMatrix.from_mixture([0.4, 0.3, 0.3], states))
    assert info.value.spectrum is not None


def test_low_rank_residual_detects_difference():
    a, b = basis_state((2, 2), (0, 0)), basis_state((2, 2), (1, 1))
    assert low_rank_residual([0.5, 0.5], [a.vector, b.vector], [0.5, 0.5], [b.vector, a.vector]) < 1e-15
    assert low_rank_residual([0.6, 0.4], [a.vector, b.vector], [0.5, 0.5], [a.vector, b.vector]) > 0.1
