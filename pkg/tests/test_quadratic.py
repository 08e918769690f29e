import cmath
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qsep.bipartitions import BipartitionClass, bipartition_classes, class_count, matricize
from qsep.oracle import TRIPARTITE_CLASSES, brute_force_family_count, tripartite_transcription
from qsep.quadratic import (
    RootKind,
    analyze_common_roots,
    coefficient_arrays,
    CoefficientTriple,
    coefficient_triple,
    enumerate_families,
    family_table,
    solve_quadratic,
)
from qsep.state import make_pure_state, random_product_state, random_pure_state

from conftest import orthonormal_pair


def test_three_mode_class_order():
    labels = [c.members for c in bipartition_classes(3)]
    assert labels == [(0, 1), (0, 2), (0,)]
    assert [TRIPARTITE_CLASSES[s] for s in (1, 2, 3)] == labels


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_class_count(m):
    classes = bipartition_classes(m)
    assert len(classes) == class_count(m) == 2 ** (m - 1) - 1
    assert all(c.is_canonical for c in classes)
    assert len(set(classes)) == len(classes)


def test_canonical_folding():
    assert BipartitionClass.canonical((1, 2), 3) == BipartitionClass((0,), 3)
    assert BipartitionClass((0, 2), 4).label() == "{0,2}|{1,3}"


@pytest.mark.parametrize("dims,count", [((2, 2), 2), ((2, 2, 2), 36), ((2, 3, 4), 480), ((2, 2, 2, 2), 440)])
def test_family_counts(dims, count):
    assert len(family_table(dims)) == count


@pytest.mark.parametrize("dims", [(2, 2), (2, 3), (3, 3), (2, 2, 2), (2, 2, 3), (2, 3, 3), (3, 3, 3), (2, 2, 2, 2), (2, 2, 2, 3)])
def test_family_count_matches_brute_force(dims):
    assert len(family_table(dims)) == brute_force_family_count(dims)


def test_families_are_nontrivial_and_ordered():
    t = family_table((2, 3, 2))
    assert np.all(t.u < t.v)
    assert np.all(np.diff(t.cls) >= 0)
    for f in t.family(0), t.family(len(t) - 1):
        assert f.mu != f.u and f.mu != f.v


def test_matricize_shape():
    a = np.arange(24).reshape(2, 3, 4)
    m = matricize(a, BipartitionClass((0, 2), 3))
    assert m.shape == (8, 3)
    assert m[1 * 4 + 3, 2] == a[1, 2, 3]


def test_transcription_oracle_matches(rng):
    for trial in range(10):
        dims = [(2, 2, 2), (2, 3, 2), (3, 2, 2)][trial % 3]
        x, y = orthonormal_pair(random_pure_state(dims, trial).vector, random_pure_state(dims, 100 + trial).vector)
        e1, e2 = make_pure_state(x, dims), make_pure_state(y, dims)
        ref = tripartite_transcription(e1, e2)
        co = coefficient_arrays(e1, e2)
        for f in range(len(co)):
            fam = co.table.family(f)
            s = {(0, 1): 1, (0, 2): 2, (0,): 3}[fam.bipartition.members]
            idx = fam.u + fam.v
            got = co.alpha[f], co.beta[f], co.gamma[f]
            for want, value in zip(ref[s], got):
                assert abs(want[idx] - value) < 1e-12
        total = sum(float(np.sum(np.abs(ref[s][0]) ** 2)) for s in ref)
        assert abs(total - 2 * float(np.sum(np.abs(co.alpha) ** 2))) < 1e-12


def test_triple_matches_arrays():
    dims = (2, 2, 3)
    e1 = random_pure_state(dims, 1)
    x, y = orthonormal_pair(e1.vector, random_pure_state(dims, 2).vector)
    e1, e2 = make_pure_state(x, dims), make_pure_state(y, dims)
    co = coefficient_arrays(e1, e2)
    for f, fam in enumerate(enumerate_families(dims)):
        t = coefficient_triple(e1, e2, fam)
        assert abs(t.alpha - co.alpha[f]) < 1e-15
        assert abs(t.beta - co.beta[f]) < 1e-15
        assert abs(t.gamma - co.gamma[f]) < 1e-15


@settings(max_examples=100, deadline=None)
@given(st.complex_numbers(max_magnitude=10, min_magnitude=0.1),
       st.complex_numbers(max_magnitude=10), st.complex_numbers(max_magnitude=10))
def test_solve_quadratic(a, r1, r2):
    b, c = -a * (r1 + r2), a * r1 * r2
    m1, m2 = solve_quadratic(a, b, c)
    for m in (m1, m2):
        assert abs(a * m * m + b * m + c) <= 1e-9 * max(1.0, abs(a), abs(b), abs(c)) * max(1.0, abs(m)) ** 2


def _product_pair(dims, seed):
    a, b = random_product_state(dims, seed).vector, random_product_state(dims, seed + 1).vector
    return a, b


def test_product_span_roots_recover_products(dims):
    a, b = _product_pair(dims, 3)
    x, y = orthonormal_pair(a, b)
    e1, e2 = make_pure_state(x, dims), make_pure_state(y, dims)
    res = analyze_common_roots(coefficient_arrays(e1, e2))
    assert res.kind is RootKind.PROPORTIONAL
    # x = a (mu = 0 after normalization) is a product vector, so one root is 0
    assert min(abs(res.mu1), abs(res.mu2)) < 1e-10


def test_all_zero_and_e1_only():
    dims = (2, 2, 2)
    x, y = orthonormal_pair(*(random_product_state(dims, s).vector for s in (1, 2)))
    # x is a product vector, y (its orthogonalized partner) is not
    e1, e2 = make_pure_state(y, dims), make_pure_state(x, dims)
    res = analyze_common_roots(coefficient_arrays(e1, e2))
    assert res.kind is RootKind.E1_ONLY
    b0 = np.zeros(8)
    b0[0] = 1
    b1 = np.zeros(8)
    b1[7] = 1
    res = analyze_common_roots(coefficient_arrays(make_pure_state(b0, dims), make_pure_state(b1, dims)))
    assert res.kind in (RootKind.E1_ONLY, RootKind.PROPORTIONAL)
    same = np.zeros(8)
    same[1] = 1
    res = analyze_common_roots(coefficient_arrays(make_pure_state(b0, dims), make_pure_state(same, dims)))
    assert res.kind is RootKind.ALL_ZERO


def test_random_pair_inconsistent():
    dims = (2, 3, 4)
    x, y = orthonormal_pair(random_pure_state(dims, 5).vector, random_pure_state(dims, 6).vector)
    res = analyze_common_roots(coefficient_arrays(make_pure_state(x, dims), make_pure_state(y, dims)))
    assert res.kind is RootKind.INCONSISTENT
    assert res.witness is not None


@pytest.mark.parametrize("seed", range(5))
def test_order_independence(seed):
    dims = (2, 2, 3)
    a, b = _product_pair(dims, 10 + seed)
    x, y = orthonormal_pair(a + 0.3 * b, b)
    co = coefficient_arrays(make_pure_state(x, dims), make_pure_state(y, dims))
    base = analyze_common_roots(co.triples())
    shuffled = co.triples()
    random.Random(seed).shuffle(shuffled)
    again = analyze_common_roots(shuffled)
    assert again.kind == base.kind
    assert again.reference == base.reference
    assert {again.mu1, again.mu2} == {base.mu1, base.mu2}


def test_phase_scaling_rotates_roots():
    dims = (2, 2, 2)
    a, b = _product_pair(dims, 20)
    x, y = orthonormal_pair(a + 0.5 * b, b)
    e1, e2 = make_pure_state(x, dims), make_pure_state(y, dims)
    base = analyze_common_roots(coefficient_arrays(e1, e2))
    phi = 0.9
    rotated = analyze_common_roots(coefficient_arrays(e1, make_pure_state(y * cmath.exp(1j * phi), dims)))
    want = sorted([base.mu1 * cmath.exp(-1j * phi), base.mu2 * cmath.exp(-1j * phi)], key=lambda z: (z.real, z.imag))
    got = sorted([rotated.mu1, rotated.mu2], key=lambda z: (z.real, z.imag))
    assert all(abs(w - g) < 1e-10 for w, g in zip(want, got))


def test_double_root_detected():
    # 1, 2, 1 is a perfect square: both roots sit at -1
    fam = next(iter(enumerate_families((2, 2))))
    res = analyze_common_roots([CoefficientTriple(fam, 1, 2, 1)])
    assert res.kind is RootKind.INCONSISTENT and res.reason == "double-root"
