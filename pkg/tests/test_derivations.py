from math import comb

import numpy as np
import pytest

from freelines.arrangement import Line, build_arrangement, canonicalize_line
from freelines.certify import exact_determinant
from freelines.derivations import (
    DegreeMismatch,
    assemble_saito_tensor,
    contract,
    contract_matrix,
    derivation_matrix,
    euler_multiples,
    float_basis_from_exact,
    line_kernel_basis,
    null_space_exact,
    null_space_float,
    q_coefficient_vector,
)
from freelines.exactlinalg import in_kernel
from freelines.monomials import (
    monomial_basis,
    poly_to_vector,
    vector_to_poly,
)


def test_monomial_basis_small():
    assert monomial_basis(0).monomials == ((0, 0, 0),)
    assert monomial_basis(1).monomials == ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    assert monomial_basis(2).monomials == (
        (2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2),
    )


@pytest.mark.parametrize("d", range(8))
def test_monomial_basis_size(d):
    assert monomial_basis(d).size == comb(d + 2, 2)


def test_line_kernel_examples():
    assert line_kernel_basis(Line(1, 0, 0)) == ((0, 1, 0), (0, 0, 1))
    assert line_kernel_basis(Line(0, 0, 1)) == ((1, 0, 0), (0, 1, 0))
    assert line_kernel_basis(Line(1, 1, 1)) == ((1, -1, 0), (1, 0, -1))


def test_line_kernel_annihilates():
    for coeffs in [(1, 0, 0), (0, 1, 0), (1, 1, 1), (3, -5, 7), (0, 2, -9)]:
        line = canonicalize_line(*coeffs)
        u, w = line_kernel_basis(line)
        assert line.evaluate(u) == 0
        assert line.evaluate(w) == 0


def test_derivation_matrix_shapes(boolean, free13):
    m = derivation_matrix(boolean, 1)
    assert m.shape == (6, 9)
    assert len(m.rows) == 6
    m13 = derivation_matrix(free13, 6)
    assert m13.shape == (13 * 7, 3 * comb(8, 2))
    assert m13.shape == (91, 84)


def test_boolean_degree1_kernel_members(boolean):
    # x d/dx, y d/dy, z d/dz satisfy the divisibility conditions directly
    m = derivation_matrix(boolean, 1)
    x_dx = [0] * 9
    x_dx[0] = 1  # f = x
    y_dy = [0] * 9
    y_dy[4] = 1  # g = y
    z_dz = [0] * 9
    z_dz[8] = 1  # h = z
    for vec in (x_dx, y_dy, z_dz):
        assert in_kernel(list(m.rows), vec)
    assert null_space_exact(m).nullity == 3
    assert null_space_float(m).nullity == 3


def test_boolean_degree2_nullity_matches_bruteforce(boolean):
    # oracle: {(f,g,h) : x|f, y|g, z|h} in degree 2 has dim 3+3+3
    mons = monomial_basis(2).monomials
    dim_f = sum(1 for e in mons if e[0] >= 1)
    assert 3 * dim_f == 9
    m = derivation_matrix(boolean, 2)
    assert null_space_exact(m).nullity == 9
    assert null_space_float(m).nullity == 9


def test_exact_kernel_vectors_are_exact(boolean, near_pencil5):
    for arr, d in [(boolean, 1), (boolean, 2), (near_pencil5, 1), (near_pencil5, 3)]:
        m = derivation_matrix(arr, d)
        basis = null_space_exact(m)
        for v in basis.vectors:
            assert in_kernel(list(m.rows), v)


def test_rank_nullity(near_pencil5):
    from freelines.exactlinalg import rank

    m = derivation_matrix(near_pencil5, 2)
    ncols = m.shape[1]
    assert null_space_exact(m).nullity == ncols - rank([list(r) for r in m.rows], ncols)


def test_null_space_float_zero_matrix():
    basis = null_space_float(np.zeros((2, 5)))
    assert basis.nullity == 5
    assert np.allclose(basis.basis.T @ basis.basis, np.eye(5))


def test_null_space_float_orthonormal_and_annihilating(near_pencil5):
    m = derivation_matrix(near_pencil5, 3)
    basis = null_space_float(m)
    assert basis.nullity == 13
    v = basis.basis
    assert np.linalg.norm(v.T @ v - np.eye(basis.nullity)) < 1e-10
    a = m.as_array()
    a /= np.linalg.norm(a)
    assert np.linalg.norm(a @ v) < 1e-9


def test_gap_guard_fires_on_ill_conditioned_fixture(free13):
    # entries ~1e25 squeeze true nonzero singular values below 1e-9*smax;
    # the guard must refuse to count rather than silently miscount
    from freelines.derivations import IllConditionedKernel

    m = derivation_matrix(free13, 6)
    with pytest.raises(IllConditionedKernel):
        null_space_float(m)


def test_float_exact_nullity_agreement_clean_gap(boolean, near_pencil5):
    for arr, d in [(boolean, 1), (near_pencil5, 1), (near_pencil5, 3)]:
        m = derivation_matrix(arr, d)
        assert null_space_float(m).nullity == null_space_exact(m).nullity


def test_robust_basis_agreement_all_fixtures(boolean, near_pencil5, free13):
    from freelines.derivations import robust_null_basis

    for arr, d in [(boolean, 1), (near_pencil5, 3), (free13, 6)]:
        nb = robust_null_basis(arr, d)
        exact = null_space_exact(derivation_matrix(arr, d))
        assert nb.nullity == exact.nullity
    assert robust_null_basis(free13, 6).nullity == 23


def test_float_basis_from_exact_spans_kernel(free13):
    m = derivation_matrix(free13, 6)
    exact = null_space_exact(m)
    fb = float_basis_from_exact(m, exact)
    assert fb.nullity == exact.nullity
    assert np.linalg.norm(fb.basis.T @ fb.basis - np.eye(fb.nullity)) < 1e-10


def test_euler_multiples_dimensions():
    assert len(euler_multiples(1)) == 1
    assert len(euler_multiples(2)) == 3
    assert len(euler_multiples(6)) == 21


def test_euler_multiples_in_every_kernel(boolean, near_pencil5):
    for arr in (boolean, near_pencil5):
        for d in (1, 2, 3):
            m = derivation_matrix(arr, d)
            for v in euler_multiples(d):
                assert in_kernel(list(m.rows), v)


def test_q_vector_boolean(boolean):
    q = q_coefficient_vector(boolean)
    poly = vector_to_poly(q, 3)
    assert poly == {(1, 1, 1): 1}


def test_q_vector_two_lines():
    arr = build_arrangement([canonicalize_line(1, 0, 0), canonicalize_line(0, 1, 0)])
    assert vector_to_poly(q_coefficient_vector(arr), 2) == {(1, 1, 0): 1}


def test_q_vector_difference_of_squares():
    arr = build_arrangement([canonicalize_line(1, 1, 0), canonicalize_line(1, -1, 0)])
    assert vector_to_poly(q_coefficient_vector(arr), 2) == {(2, 0, 0): 1, (0, 2, 0): -1}


def _coordinates(basis, vec):
    return basis.basis.T @ np.asarray(vec, dtype=np.float64)


def test_tensor_boolean_basis_pair(boolean):
    m = derivation_matrix(boolean, 1)
    nb = null_space_float(m)
    t = assemble_saito_tensor(boolean, nb, nb)
    x_dx = [0.0] * 9
    x_dx[0] = 1.0
    y_dy = [0.0] * 9
    y_dy[4] = 1.0
    a1 = _coordinates(nb, x_dx)
    a2 = _coordinates(nb, y_dy)
    out = contract(t, a1, a2)
    expected = np.zeros(10)
    xyz = monomial_basis(3).index((1, 1, 1))
    expected[xyz] = 1.0
    assert np.allclose(out, expected, atol=1e-12)


def test_tensor_euler_annihilation(boolean):
    m = derivation_matrix(boolean, 1)
    nb = null_space_float(m)
    t = assemble_saito_tensor(boolean, nb, nb)
    euler = _coordinates(nb, [float(v) for v in euler_multiples(1)[0]])
    rng = np.random.default_rng(7)
    for _ in range(5):
        a2 = rng.standard_normal(t.k2)
        assert np.linalg.norm(contract(t, euler, a2)) < 1e-9
        assert np.linalg.norm(contract(t, a2, euler)) < 1e-9


def test_contract_bilinearity(boolean):
    m = derivation_matrix(boolean, 1)
    nb = null_space_float(m)
    t = assemble_saito_tensor(boolean, nb, nb)
    rng = np.random.default_rng(3)
    a1, b1, a2 = (rng.standard_normal(3) for _ in range(3))
    assert np.allclose(
        contract(t, 2.5 * a1 + b1, a2),
        2.5 * contract(t, a1, a2) + contract(t, b1, a2),
        atol=1e-12,
    )
    assert np.allclose(contract(t, np.zeros(3), a2), 0.0)


def test_contract_matrix_consistency(near_pencil5):
    m1 = derivation_matrix(near_pencil5, 1)
    m3 = derivation_matrix(near_pencil5, 3)
    t = assemble_saito_tensor(near_pencil5, null_space_float(m1), null_space_float(m3))
    rng = np.random.default_rng(11)
    a1 = rng.standard_normal(t.k1)
    a2 = rng.standard_normal(t.k2)
    assert np.allclose(contract_matrix(t, a2, 2) @ a1, contract(t, a1, a2), atol=1e-12)
    assert np.allclose(contract_matrix(t, a1, 1) @ a2, contract(t, a1, a2), atol=1e-12)


def test_lazy_contraction_matches_dense(near_pencil5):
    m1 = derivation_matrix(near_pencil5, 1)
    m3 = derivation_matrix(near_pencil5, 3)
    nb1, nb3 = null_space_float(m1), null_space_float(m3)
    dense = assemble_saito_tensor(near_pencil5, nb1, nb3)
    lazy = assemble_saito_tensor(near_pencil5, nb1, nb3, budget=1)
    assert dense.tensor is not None and lazy.tensor is None
    rng = np.random.default_rng(5)
    a1 = rng.standard_normal(dense.k1)
    a2 = rng.standard_normal(dense.k2)
    assert np.allclose(contract(dense, a1, a2), contract(lazy, a1, a2), atol=1e-10)
    assert np.allclose(
        contract_matrix(dense, a2, 2), contract_matrix(lazy, a2, 2), atol=1e-10
    )


def test_assemble_degree_mismatch(boolean):
    nb = null_space_float(derivation_matrix(boolean, 1))
    nb2 = null_space_float(derivation_matrix(boolean, 2))
    with pytest.raises(DegreeMismatch):
        assemble_saito_tensor(boolean, nb, nb2)


def _unit(vec):
    nv = np.linalg.norm(vec)
    assert nv > 0
    v = vec / nv
    for x in v:
        if abs(x) > 1e-14:
            return v if x > 0 else -v
    return v


def _random_kernel_combo(rng, vectors, nd):
    coeffs = [int(c) for c in rng.integers(-3, 4, size=len(vectors))]
    vec = [sum(c * v[k] for c, v in zip(coeffs, vectors)) for k in range(nd)]
    scale = max(abs(x) for x in vec)
    return vec, ([x / scale for x in vec] if scale else [0.0] * nd)


def test_contraction_matches_exact_determinant(free13, free19, free20):
    """Float contraction vs exact symbolic expansion on random kernel pairs.

    Kernel coordinates and determinant coefficients span hundreds of digits
    on the large fixtures, so both sides are compared as unit vectors.
    """
    from freelines.certify import vector_to_derivation
    from freelines.monomials import basis_size

    rng = np.random.default_rng(17)
    cases = [(free13, 6, 6), (free19, 7, 11), (free20, 9, 10)]
    for arr, d1, d2 in cases:
        m1 = derivation_matrix(arr, d1)
        m2 = m1 if d2 == d1 else derivation_matrix(arr, d2)
        e1 = null_space_exact(m1)
        e2 = e1 if d2 == d1 else null_space_exact(m2)
        nb1 = float_basis_from_exact(m1, e1)
        nb2 = nb1 if d2 == d1 else float_basis_from_exact(m2, e2)
        t = assemble_saito_tensor(arr, nb1, nb2)
        checked = 0
        while checked < 10:
            v1, v1f = _random_kernel_combo(rng, e1.vectors, 3 * basis_size(d1))
            v2, v2f = _random_kernel_combo(rng, e2.vectors, 3 * basis_size(d2))
            if not any(v1) or not any(v2):
                continue
            det = exact_determinant(
                arr, vector_to_derivation(v1, d1), vector_to_derivation(v2, d2)
            )
            ints = poly_to_vector(det, arr.n)
            top = max(abs(x) for x in ints)
            if top == 0:
                continue  # combination landed in the determinant's kernel
            expected = _unit(np.array([x / top for x in ints]))
            a1 = _coordinates(nb1, v1f)
            a2 = _coordinates(nb2, v2f)
            got = _unit(contract(t, a1, a2))
            assert np.linalg.norm(got - expected) < 1e-8
            checked += 1
