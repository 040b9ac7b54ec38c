"""Cube construction, face shapes, and edge-sign systems."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oddkh.cube import (
    build_cube,
    classify_face,
    enumerate_sign_assignments,
    extend_sign_assignment,
    face_edges,
    fast_sign_assignment,
    solve_sign_assignment,
    verify_sign_assignment,
)
from oddkh.linkdiag import add_free_circle, insert_kink, parse_pd
from oddkh.oddtqft import compose

TREFOIL = [[1, 4, 2, 5], [3, 6, 4, 1], [5, 2, 6, 3]]
FIG8 = [[4, 2, 5, 1], [8, 6, 1, 5], [6, 3, 7, 4], [2, 7, 3, 8]]
HOPF_POS = [[1, 3, 2, 4], [3, 1, 4, 2]]
# Two parallel circles, one poked under the other.
POKE = [[4, 1, 2, 3], [2, 1, 4, 3]]

ALL_TAGS = {"i", "ii", "iii", "iv", "v", "vi", "vii", "viii", "ix", "x"}


def test_edge_kinds_follow_circle_counts():
    for code in (TREFOIL, FIG8, HOPF_POS, POKE):
        cube = build_cube(parse_pd(code))
        for alpha, c in cube.edges():
            edge = cube.edge(alpha, c)
            delta = (
                cube.resolution(alpha | 1 << c).n_circles
                - cube.resolution(alpha).n_circles
            )
            assert (edge.kind, delta) in {("merge", -1), ("split", 1)}


def test_edge_map_matches_streamed_terms():
    cube = build_cube(parse_pd(TREFOIL))
    for alpha, c in cube.edges():
        m = cube.edge_map(alpha, c)
        for mask in range(cube.space(alpha).dim):
            assert m.apply(mask) == tuple(cube.edge_terms(alpha, c, mask))


def test_trefoil_base_faces_are_merge_chains():
    cube = build_cube(parse_pd(TREFOIL))
    for c1, c2 in ((0, 1), (0, 2), (1, 2)):
        assert classify_face(cube, 0, c1, c2) == classify_face(cube, 0, c2, c1)
        face = classify_face(cube, 0, c1, c2)
        assert face.tag == "ii"
        assert face.sigma == 1


def test_hopf_face_is_double_band():
    cube = build_cube(parse_pd(HOPF_POS))
    face = classify_face(cube, 0, 0, 1)
    assert face.tag in {"iii", "ix"}


def test_poke_face_is_interleaved():
    cube = build_cube(parse_pd(POKE))
    face = classify_face(cube, 0, 0, 1)
    assert face.tag in {"vi", "x"}
    first = compose(cube.edge_map(1, 1), cube.edge_map(0, 0))
    second = compose(cube.edge_map(2, 0), cube.edge_map(0, 1))
    assert first.is_zero() and second.is_zero()


def test_theory_flips_exactly_the_interleaved_faces():
    for code in (TREFOIL, HOPF_POS, POKE, FIG8):
        d = parse_pd(code)
        cy = build_cube(d, theory="y")
        cx = build_cube(d, theory="x")
        for alpha, c1, c2 in cy.faces():
            fy = classify_face(cy, alpha, c1, c2)
            fx = classify_face(cx, alpha, c1, c2)
            assert fy.tag == fx.tag
            if fy.tag in {"vi", "x"}:
                assert fx.sigma == -fy.sigma
            else:
                assert fx.sigma == fy.sigma


def test_sigma_matches_full_composites():
    for code in (TREFOIL, FIG8, HOPF_POS, POKE):
        cube = build_cube(parse_pd(code))
        for alpha, c1, c2 in cube.faces():
            face = classify_face(cube, alpha, c1, c2)
            assert face.tag in ALL_TAGS
            first = compose(cube.edge_map(alpha | 1 << c1, c2), cube.edge_map(alpha, c1))
            second = compose(cube.edge_map(alpha | 1 << c2, c1), cube.edge_map(alpha, c2))
            if first.is_zero():
                assert second.is_zero()
                assert face.tag in {"vi", "x"}
            else:
                assert second == first.scale(face.sigma)


def kinked_unknot(signs):
    d, _ = add_free_circle(parse_pd([]))
    for i, sign in enumerate(signs):
        arcs = sorted(set(d.free_arcs) | {a for t in d.crossings for a in t})
        d = insert_kink(d, arcs[i % len(arcs)], sign)
    return d


def test_sign_assignment_counts():
    for diagram, count in (
        (kinked_unknot([1]), 2),
        (parse_pd(HOPF_POS), 8),
        (parse_pd(TREFOIL), 128),
    ):
        assert len(enumerate_sign_assignments(build_cube(diagram))) == count


def test_enumerated_assignments_are_valid_and_distinct():
    cube = build_cube(parse_pd(HOPF_POS))
    sols = enumerate_sign_assignments(cube)
    seen = {tuple(sorted(s.items())) for s in sols}
    assert len(seen) == len(sols)
    for s in sols:
        assert verify_sign_assignment(cube, s)


def test_solve_is_valid_and_deterministic():
    for code in (TREFOIL, FIG8, POKE):
        cube = build_cube(parse_pd(code))
        eps = solve_sign_assignment(cube)
        assert set(eps) == set(cube.edges())
        assert verify_sign_assignment(cube, eps)
        assert eps == solve_sign_assignment(build_cube(parse_pd(code)))


def test_verify_rejects_a_flipped_edge():
    cube = build_cube(parse_pd(TREFOIL))
    eps = solve_sign_assignment(cube)
    edge = next(iter(eps))
    eps[edge] = -eps[edge]
    assert not verify_sign_assignment(cube, eps)


def test_fast_assignment_is_valid():
    for code in (TREFOIL, FIG8, POKE, HOPF_POS):
        cube = build_cube(parse_pd(code))
        eps = fast_sign_assignment(cube)
        assert set(eps) == set(cube.edges())
        assert verify_sign_assignment(cube, eps)


def test_extend_respects_pins():
    cube = build_cube(parse_pd(TREFOIL))
    target = enumerate_sign_assignments(cube)[-1]
    pins = dict(list(sorted(target.items()))[:4])
    eps = extend_sign_assignment(cube, pins)
    assert verify_sign_assignment(cube, eps)
    for e, v in pins.items():
        assert eps[e] == v


def test_extend_rejects_incoherent_pins():
    cube = build_cube(parse_pd(TREFOIL))
    eps = solve_sign_assignment(cube)
    alpha, c1, c2 = next(iter(cube.faces()))
    pins = {e: eps[e] for e in face_edges(alpha, c1, c2)}
    first = next(iter(pins))
    pins[first] = -pins[first]
    with pytest.raises(ValueError):
        extend_sign_assignment(cube, pins)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.sampled_from([1, -1]), min_size=1, max_size=4))
def test_kinked_unknot_sign_systems(signs):
    cube = build_cube(kinked_unknot(signs))
    assert verify_sign_assignment(cube, solve_sign_assignment(cube))
    assert verify_sign_assignment(cube, fast_sign_assignment(cube))
