"""Flattened complexes, homology, and the chain-map calculus."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oddkh.complexes import (
    BigradedHomology,
    ChainMap,
    assemble_complex,
    compose,
    equal_up_to_sign,
    graded_euler_characteristic,
    homology,
    homology_presentation,
    homotopic_up_to_sign,
    identity_chain_map,
    induced_map_on_homology,
    is_chain_map,
    reduce_coefficients,
    verify_differential_squares,
    zero_chain_map,
)
from oddkh.cube import build_cube, enumerate_sign_assignments, fast_sign_assignment, solve_sign_assignment
from oddkh.linalg import IntMatrix
from oddkh.linkdiag import add_free_circle, insert_kink, parse_pd

TREFOIL = [[1, 4, 2, 5], [3, 6, 4, 1], [5, 2, 6, 3]]
FIG8 = [[4, 2, 5, 1], [8, 6, 1, 5], [6, 3, 7, 4], [2, 7, 3, 8]]
HOPF_POS = [[1, 3, 2, 4], [3, 1, 4, 2]]
POKE = [[4, 1, 2, 3], [2, 1, 4, 3]]

UNKNOT_HOMOLOGY = BigradedHomology({(0, 1): (1, ()), (0, -1): (1, ())})


def unknot_diagram():
    d, _ = add_free_circle(parse_pd([]))
    return d


def unknot_complex():
    return assemble_complex(build_cube(unknot_diagram()))


def kinked_unknot(signs):
    d = unknot_diagram()
    for i, sign in enumerate(signs):
        arcs = sorted(set(d.free_arcs) | {a for t in d.crossings for a in t})
        d = insert_kink(d, arcs[i % len(arcs)], sign)
    return d


def test_unknot_complex_shape():
    c = unknot_complex()
    assert c.degrees() == [0]
    assert c.dim(0) == 2
    assert sorted(c.quantum_degrees(0)) == [-1, 1]
    assert not c.differential(0).data
    assert homology(c) == UNKNOT_HOMOLOGY
    assert graded_euler_characteristic(c) == {1: 1, -1: 1}


def test_unlink_euler_characteristic():
    d, _ = add_free_circle(unknot_diagram())
    c = assemble_complex(build_cube(d))
    assert graded_euler_characteristic(c) == {2: 1, 0: 2, -2: 1}


def test_hopf_chain_ranks():
    c = assemble_complex(build_cube(parse_pd(HOPF_POS)))
    assert [c.dim(h) for h in c.degrees()] == [4, 4, 4]
    assert c.degrees() == [0, 1, 2]


def test_assembly_validates_many_diagrams():
    for code in (TREFOIL, FIG8, HOPF_POS, POKE):
        cube = build_cube(parse_pd(code))
        assemble_complex(cube)
        assemble_complex(cube, fast_sign_assignment(cube))


def test_streaming_square_check():
    for code in (TREFOIL, FIG8):
        cube = build_cube(parse_pd(code))
        eps = solve_sign_assignment(cube)
        assert verify_differential_squares(cube, eps)
        edge = next(iter(eps))
        broken = dict(eps)
        broken[edge] = -broken[edge]
        assert not verify_differential_squares(cube, broken)


def test_homology_independent_of_sign_assignment():
    cube = build_cube(parse_pd(HOPF_POS))
    answers = {
        tuple(sorted(homology(assemble_complex(cube, eps)).table.items()))
        for eps in enumerate_sign_assignments(cube)
    }
    assert len(answers) == 1


def test_homology_independent_of_theory():
    for code in (TREFOIL, HOPF_POS, POKE):
        d = parse_pd(code)
        hy = homology(assemble_complex(build_cube(d, theory="y")))
        hx = homology(assemble_complex(build_cube(d, theory="x")))
        assert hy == hx


def connecting_vertex_signs(cube, eps1, eps2):
    eta = {0: 1}
    for beta in sorted(cube.vertices(), key=lambda a: (a.bit_count(), a)):
        if beta == 0:
            continue
        c = (beta & -beta).bit_length() - 1
        alpha = beta ^ (1 << c)
        eta[beta] = eta[alpha] * eps1[alpha, c] * eps2[alpha, c]
    return eta


def test_two_assignments_differ_by_a_diagonal_isomorphism():
    cube = build_cube(parse_pd(TREFOIL))
    eps1 = solve_sign_assignment(cube)
    eps2 = fast_sign_assignment(cube)
    c1 = assemble_complex(cube, eps1)
    c2 = assemble_complex(cube, eps2)
    eta = connecting_vertex_signs(cube, eps1, eps2)
    blocks = {}
    for h in c1.degrees():
        entries = {
            (i, i): eta[alpha] for i, (alpha, _) in enumerate(c1.basis(h))
        }
        blocks[h] = IntMatrix(c1.dim(h), c1.dim(h), entries)
    f = ChainMap(c1, c2, blocks)
    assert is_chain_map(f)
    g = ChainMap(c2, c1, blocks)
    assert equal_up_to_sign(compose(g, f), identity_chain_map(c1)) == 1


def test_chain_map_plumbing():
    c = assemble_complex(build_cube(parse_pd(HOPF_POS)))
    ident = identity_chain_map(c)
    assert is_chain_map(ident)
    assert equal_up_to_sign(ident, ident.scale(-1)) == -1
    assert compose(ident, ident) == ident
    assert equal_up_to_sign(ident, zero_chain_map(c, c)) is None


def test_homotopy_trivial_cases():
    c = unknot_complex()
    ident = identity_chain_map(c)
    s, H = homotopic_up_to_sign(ident, ident)
    assert s == 1
    assert all(not m.data for m in H.values())
    s, H = homotopic_up_to_sign(ident, zero_chain_map(c, c))
    assert s is None and H is None


def _homotopy_realizes(f, g, s, H):
    src, dst = f.src, f.dst
    for h in src.degrees():
        hh = H.get(h, IntMatrix.zero(dst.dim(h - 1), src.dim(h)))
        hh1 = H.get(h + 1, IntMatrix.zero(dst.dim(h), src.dim(h + 1)))
        lhs = f.block(h) - g.block(h).scale(s)
        rhs = dst.differential(h - 1) * hh + hh1 * src.differential(h)
        if lhs != rhs:
            return False
    return True


def test_homotopy_finds_a_constructed_witness():
    c = assemble_complex(build_cube(kinked_unknot([1, -1])))
    candidates = {}
    for h in c.degrees():
        qs = c.quantum_degrees(h)
        qt = c.quantum_degrees(h - 1)
        entries = {}
        for j, qj in enumerate(qs):
            for k, qk in enumerate(qt):
                if qk == qj and (j + k) % 3 == 0:
                    entries[k, j] = 1 + (j % 2)
        if entries:
            candidates[h] = IntMatrix(c.dim(h - 1), c.dim(h), entries)
    assert candidates
    blocks = {}
    for h in c.degrees():
        hh = candidates.get(h, IntMatrix.zero(c.dim(h - 1), c.dim(h)))
        hh1 = candidates.get(h + 1, IntMatrix.zero(c.dim(h), c.dim(h + 1)))
        blocks[h] = c.differential(h - 1) * hh + hh1 * c.differential(h)
    f = ChainMap(c, c, blocks)
    assert is_chain_map(f)
    z = zero_chain_map(c, c)
    s, H = homotopic_up_to_sign(f, z)
    assert s == 1
    assert _homotopy_realizes(f, z, s, H)
    induced = induced_map_on_homology(f)
    assert all(not m.data for m in induced.values())


def test_induced_identity_is_identity():
    c = assemble_complex(build_cube(parse_pd(TREFOIL)))
    induced = induced_map_on_homology(identity_chain_map(c))
    hom = homology(c)
    assert set(induced) == set(hom.table)
    for (h, q), m in induced.items():
        rank, torsion = hom.table[h, q]
        size = rank + len(torsion)
        assert m == IntMatrix.identity(size)


def test_induced_dot_map_on_unknot():
    c = unknot_complex()
    lower = c.index(0, (0, 1))
    upper = c.index(0, (0, 0))
    dot = ChainMap(c, c, {0: IntMatrix(2, 2, {(lower, upper): 1})}, q_shift=-2)
    assert is_chain_map(dot)
    induced = induced_map_on_homology(dot)
    assert induced[0, 1] == IntMatrix(1, 1, {(0, 0): 1})
    assert not induced[0, -1].data
    assert compose(dot, dot) == zero_chain_map(c, c, q_shift=-4)


def test_reduce_coefficients_unknot():
    c = unknot_complex()
    assert reduce_coefficients(c, 2) == {(0, 1): 1, (0, -1): 1}
    for bad in (1, 4, 6):
        with pytest.raises(ValueError):
            reduce_coefficients(c, bad)


def test_mod_p_dimensions_satisfy_universal_coefficients():
    for code in (TREFOIL, FIG8, HOPF_POS):
        c = assemble_complex(build_cube(parse_pd(code)))
        hom = homology(c)
        for p in (2, 3, 5):
            expected = {}
            for (h, q), (rank, torsion) in hom.table.items():
                here = rank + sum(1 for d in torsion if d % p == 0)
                if here:
                    expected[h, q] = expected.get((h, q), 0) + here
                lifted = sum(1 for d in torsion if d % p == 0)
                if lifted:
                    key = (h - 1, q)
                    expected[key] = expected.get(key, 0) + lifted
            assert reduce_coefficients(c, p) == expected


def test_euler_characteristic_equals_homology_euler():
    for code in (TREFOIL, FIG8, POKE):
        c = assemble_complex(build_cube(parse_pd(code)))
        hom = homology(c)
        from_homology = {}
        for (h, q), (rank, _) in hom.table.items():
            if rank:
                s = -rank if h & 1 else rank
                from_homology[q] = from_homology.get(q, 0) + s
        from_homology = {q: v for q, v in from_homology.items() if v}
        assert graded_euler_characteristic(c) == from_homology


@settings(max_examples=20, deadline=None)
@given(st.lists(st.sampled_from([1, -1]), min_size=1, max_size=3))
def test_kinks_leave_homology_alone(signs):
    c = assemble_complex(build_cube(kinked_unknot(signs)))
    assert homology(c) == UNKNOT_HOMOLOGY
