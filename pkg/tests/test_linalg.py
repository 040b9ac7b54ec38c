import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oddkh.linalg import (
    IntMatrix,
    gf2_rank,
    integer_kernel,
    integer_rank,
    modp_rank,
    smith_normal_form,
    solve_gf2,
    solve_integer,
)


def test_matrix_basic_ops():
    a = IntMatrix.from_rows([[1, 2], [3, 4]])
    b = IntMatrix.from_rows([[0, 1], [1, 0]])
    assert (a * b).to_rows() == [[2, 1], [4, 3]]
    assert (a + b).to_rows() == [[1, 3], [4, 4]]
    assert (a - a).is_zero()
    assert a.transpose().to_rows() == [[1, 3], [2, 4]]
    assert a.apply([1, 0]) == [1, 3]
    assert a.scale(-2).to_rows() == [[-2, -4], [-6, -8]]
    assert a[0, 1] == 2
    assert a[1, 1] == 4


def test_matrix_rejects_bad_shapes():
    with pytest.raises(ValueError):
        IntMatrix.from_rows([[1], [2, 3]])
    with pytest.raises(ValueError):
        IntMatrix.from_rows([[1, 2]]) * IntMatrix.from_rows([[1, 2]])
    with pytest.raises(ValueError):
        IntMatrix(2, 2, {(2, 0): 1})


def test_snf_known_diagonal():
    a = IntMatrix.from_rows([[2, 4], [6, 8]])
    res = smith_normal_form(a)
    assert res.diagonal == (2, 4)
    assert res.U * a * res.V == res.D


def test_snf_divisibility_repair():
    # Diagonal input that violates the chain.
    a = IntMatrix.from_rows([[4, 0], [0, 6]])
    res = smith_normal_form(a)
    assert res.diagonal == (2, 12)
    assert res.U * a * res.V == res.D


def test_snf_empty_and_zero():
    z = IntMatrix.zero(3, 2)
    res = smith_normal_form(z)
    assert res.diagonal == (0, 0)
    assert res.rank == 0
    e = IntMatrix.zero(0, 5)
    res = smith_normal_form(e)
    assert res.diagonal == ()
    assert res.U.rows == 0 and res.V.rows == 5


def test_snf_identity_and_torsion():
    res = smith_normal_form(IntMatrix.identity(4))
    assert res.diagonal == (1, 1, 1, 1)
    assert res.torsion() == ()
    a = IntMatrix.from_rows([[2, 0, 0], [0, 3, 0]])
    res = smith_normal_form(a)
    assert res.diagonal == (1, 6)
    assert res.torsion() == (6,)


def _random_matrix(rng, rows, cols, lo=-9, hi=9, density=0.7):
    entries = {}
    for r in range(rows):
        for c in range(cols):
            if rng.random() < density:
                v = rng.randint(lo, hi)
                if v:
                    entries[(r, c)] = v
    return IntMatrix(rows, cols, entries)


def test_snf_random_verified():
    rng = random.Random(8231)
    for _ in range(60):
        rows = rng.randint(0, 6)
        cols = rng.randint(0, 6)
        a = _random_matrix(rng, rows, cols)
        res = smith_normal_form(a)
        assert res.U * a * res.V == res.D
        diag = [d for d in res.diagonal if d]
        assert all(d > 0 for d in diag)
        for x, y in zip(diag, diag[1:]):
            assert y % x == 0
        # U and V invert over Z: their SNF diagonals are all ones.
        assert all(d == 1 for d in smith_normal_form(res.U).diagonal)
        assert all(d == 1 for d in smith_normal_form(res.V).diagonal)


def test_integer_rank_matches_mod_p_generically():
    a = IntMatrix.from_rows([[1, 2, 3], [4, 5, 6], [7, 8, 9]])
    assert integer_rank(a) == 2
    assert modp_rank(a, 5) == 2
    assert modp_rank(a, 3) == 1  # determinant minors collapse mod 3


def test_solve_integer_solvable():
    a = IntMatrix.from_rows([[2, 0], [0, 3]])
    x, kernel = solve_integer(a, [4, -9])
    assert x is not None
    assert a.apply(x) == [4, -9]
    assert kernel == []


def test_solve_integer_unsolvable():
    a = IntMatrix.from_rows([[2]])
    x, kernel = solve_integer(a, [3])
    assert x is None
    assert kernel == []
    # Inconsistent overdetermined system.
    a = IntMatrix.from_rows([[1], [1]])
    x, _ = solve_integer(a, [0, 1])
    assert x is None


def test_solve_integer_kernel():
    a = IntMatrix.from_rows([[1, 1, 1]])
    x, kernel = solve_integer(a, [5])
    assert x is not None and sum(x) == 5
    assert len(kernel) == 2
    for k in kernel:
        assert a.apply(k) == [0]
    # Kernel vectors are primitive enough to span: check rank.
    km = IntMatrix(3, 2, {(r, j): k[r] for j, k in enumerate(kernel) for r in range(3) if k[r]})
    assert integer_rank(km) == 2


def test_integer_kernel_of_injective_map_is_empty():
    a = IntMatrix.from_rows([[1, 0], [0, 2], [3, 3]])
    assert integer_kernel(a) == []


@settings(max_examples=120, deadline=None)
@given(
    st.integers(1, 5),
    st.integers(1, 5),
    st.data(),
)
def test_solve_integer_roundtrip(rows, cols, data):
    entries = {}
    for r in range(rows):
        for c in range(cols):
            v = data.draw(st.integers(-6, 6))
            if v:
                entries[(r, c)] = v
    a = IntMatrix(rows, cols, entries)
    xs = [data.draw(st.integers(-4, 4)) for _ in range(cols)]
    b = a.apply(xs)
    x, kernel = solve_integer(a, b)
    assert x is not None
    assert a.apply(x) == b
    for k in kernel:
        assert a.apply(k) == [0] * rows


def test_solve_gf2_basic():
    # x0 + x1 = 1, x1 = 1  ->  x0 = 0, x1 = 1
    sol, null = solve_gf2([0b11, 0b10], [1, 1], 2)
    assert sol == 0b10
    assert null == []


def test_solve_gf2_inconsistent():
    sol, null = solve_gf2([0b1, 0b1], [0, 1], 1)
    assert sol is None
    assert null == []


def test_solve_gf2_free_variables_are_zero():
    # One equation, three variables: particular solution uses pivot only.
    sol, null = solve_gf2([0b111], [1], 3)
    assert sol == 0b001
    assert len(null) == 2
    for v in null:
        assert bin(v).count("1") % 2 == 0  # each lies in the kernel


def test_solve_gf2_nullspace_spans():
    rows = [0b1100, 0b0110]
    sol, null = solve_gf2(rows, [0, 0], 4)
    assert sol == 0
    assert len(null) == 2
    for v in null:
        for r in rows:
            assert bin(v & r).count("1") % 2 == 0


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 8), st.integers(1, 8), st.data())
def test_solve_gf2_roundtrip(nrows, ncols, data):
    rows = [data.draw(st.integers(0, (1 << ncols) - 1)) for _ in range(nrows)]
    x = data.draw(st.integers(0, (1 << ncols) - 1))
    b = [bin(r & x).count("1") % 2 for r in rows]
    sol, null = solve_gf2(rows, b, ncols)
    assert sol is not None
    for r, bb in zip(rows, b):
        assert bin(r & sol).count("1") % 2 == bb
    for v in null:
        for r in rows:
            assert bin(r & v).count("1") % 2 == 0
    assert len(null) == ncols - gf2_rank(rows)


def test_gf2_rank():
    assert gf2_rank([]) == 0
    assert gf2_rank([0b101, 0b011, 0b110]) == 2
    assert gf2_rank([0b1, 0b10, 0b100]) == 3


def test_modp_rank_gf2_path():
    a = IntMatrix.from_rows([[2, 1], [4, 3]])
    # Mod 2 the matrix is [[0,1],[0,1]].
    assert modp_rank(a, 2) == 1
    assert modp_rank(a, 3) == 2
