import numpy as np
import pytest

from qsep.errors import IdenticalStates, InvalidInput
from qsep.oracle import (
    build_separable_rank2,
    oracle_pure_separable,
    unfolding_rank_one,
)
from qsep.state import basis_state, maximally_entangled_state, random_product_state, random_pure_state


def test_unfolding_oracle_basics():
    assert oracle_pure_separable(basis_state((2, 3, 2), (1, 2, 0)))
    ghz = maximally_entangled_state((2, 2, 2))
    assert not any(unfolding_rank_one(ghz, k) for k in range(3))


def test_zero_times_bell_fails_on_two_modes_only():
    a = np.zeros((2, 2, 2))
    a[0, 0, 0] = a[0, 1, 1] = 1 / np.sqrt(2)
    assert unfolding_rank_one(a, 0)
    assert not unfolding_rank_one(a, 1) and not unfolding_rank_one(a, 2)


def test_oracle_on_random_states(dims):
    assert oracle_pure_separable(random_product_state(dims, 1))
    assert not oracle_pure_separable(random_pure_state(dims, 1))


def test_oracle_size_guard():
    with pytest.raises(InvalidInput):
        oracle_pure_separable(np.ones((4, 4, 4, 5)))


def test_build_separable_rank2_checks():
    a, b = random_product_state((2, 2), 1), random_product_state((2, 2), 2)
    rho = build_separable_rank2((a, b), 0.25, seed=3)
    assert np.isclose(np.trace(rho.entries).real, 1.0)
    with pytest.raises(IdenticalStates):
        build_separable_rank2((a, a), 0.5)
    with pytest.raises(InvalidInput):
        build_separable_rank2((a, maximally_entangled_state((2, 2))), 0.5)
