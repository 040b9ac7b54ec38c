import pytest

from oddkh.linkdiag import (
    LinkDiagram,
    add_free_circle,
    attach_band,
    cable,
    delete_free_circle,
    diagram_to_dict,
    insert_kink,
    mirror,
    parse_pd,
    resolve,
    smooth_crossings,
    transit_side,
    writhe,
)

TREFOIL = [[1, 4, 2, 5], [3, 6, 4, 1], [5, 2, 6, 3]]
FIG8 = [[4, 2, 5, 1], [8, 6, 1, 5], [6, 3, 7, 4], [2, 7, 3, 8]]
HOPF_POS = [[1, 3, 2, 4], [3, 1, 4, 2]]
HOPF_NEG = [[1, 4, 2, 3], [3, 2, 4, 1]]


def test_parse_trefoil_signs():
    d = parse_pd(TREFOIL)
    assert d.n == 3
    assert d.signs == (-1, -1, -1)
    assert writhe(d) == -3
    assert d.n_minus == 3 and d.n_plus == 0
    assert len(d.components) == 1


def test_parse_hopf_signs():
    assert parse_pd(HOPF_POS).signs == (1, 1)
    assert parse_pd(HOPF_NEG).signs == (-1, -1)


def test_parse_figure_eight():
    d = parse_pd(FIG8)
    assert d.writhe == 0
    assert sorted(d.signs) == [-1, -1, 1, 1]


def test_parse_rejects_bad_codes():
    with pytest.raises(ValueError):
        parse_pd([[1, 2, 3, 4]])  # arcs appear once
    with pytest.raises(ValueError):
        parse_pd([[1, 2, 3, 4], [1, 2, 3, 4]])  # inconsistent under flow
    with pytest.raises(ValueError):
        parse_pd({"pd": TREFOIL, "bogus": 1})
    with pytest.raises(ValueError):
        parse_pd(TREFOIL, signs=[1, 1])  # wrong length
    with pytest.raises(ValueError):
        parse_pd(TREFOIL, signs=[1, 1, 1])  # contradicts inference


def test_parse_free_circles_and_dict_roundtrip():
    d = parse_pd({"pd": TREFOIL, "free_circles": 2})
    assert len(d.free_arcs) == 2
    assert len(d.components) == 3
    back = parse_pd(diagram_to_dict(d))
    assert back == d


def test_unknot_free_circle_only():
    d = parse_pd({"pd": [], "free_circles": 1})
    assert d.n == 0
    assert len(d.free_arcs) == 1
    r = resolve(d, 0)
    assert r.n_circles == 1


def test_resolve_hopf_circle_counts():
    d = parse_pd(HOPF_POS)
    assert resolve(d, 0b00).n_circles == 2
    assert resolve(d, 0b01).n_circles == 1
    assert resolve(d, 0b10).n_circles == 1
    assert resolve(d, 0b11).n_circles == 2


def test_resolve_trefoil_circle_counts():
    d = parse_pd(TREFOIL)
    counts = {a: resolve(d, a).n_circles for a in range(8)}
    # All-negative trefoil: three circles at the all-zero state, two at
    # the all-one state, and each bit flip changes the count by one.
    assert counts[0b000] == 3
    assert counts[0b111] == 2
    for a in (0b001, 0b010, 0b100):
        assert counts[a] == 2
    for a in (0b011, 0b101, 0b110):
        assert counts[a] == 1


def test_resolution_walk_structure():
    d = parse_pd(HOPF_POS)
    r = resolve(d, 0b00)
    # Every slot is assigned to exactly one circle.
    assert set(r.slot_circle) == {(c, s) for c in range(2) for s in range(4)}
    for idx in range(r.n_circles):
        transits = r.circle_transits(idx)
        for t in transits:
            assert transit_side(t) in (1, -1)
    # Arcs partition between the circles.
    assert sorted(a for idx in range(r.n_circles) for a in r.circle_arcs(idx)) == [1, 2, 3, 4]


def test_transit_side_rejects_non_pairs():
    with pytest.raises(ValueError):
        transit_side((0, 0, 2))


def test_mirror_flips_signs_and_doubles_back():
    d = parse_pd(TREFOIL)
    m = mirror(d)
    assert m.signs == (1, 1, 1)
    assert mirror(m) == d
    # Circle counts at complementary states agree.
    for a in range(8):
        assert resolve(m, a).n_circles == resolve(d, 7 - a).n_circles


def test_insert_kink_counts():
    d = parse_pd(TREFOIL)
    k = insert_kink(d, 1, 1)
    assert k.n == 4
    assert k.writhe == d.writhe + 1
    assert k.signs[-1] == 1
    # Positive curl: its circle splits off in the 0-smoothing.
    base = resolve(d, 0)
    assert resolve(k, 0b0000).n_circles == base.n_circles + 1
    assert resolve(k, 0b1000).n_circles == base.n_circles
    km = insert_kink(d, 1, -1)
    assert km.writhe == d.writhe - 1
    assert resolve(km, 0b1000).n_circles == base.n_circles + 1
    assert resolve(km, 0b0000).n_circles == base.n_circles


def test_insert_kink_on_free_circle():
    d = parse_pd({"pd": [], "free_circles": 1})
    k = insert_kink(d, d.free_arcs[0], 1)
    assert k.n == 1 and not k.free_arcs
    assert k.signs == (1,)
    assert resolve(k, 0b0).n_circles == 2
    assert resolve(k, 0b1).n_circles == 1


def test_attach_band_distinct_arcs():
    d = parse_pd(HOPF_POS)
    e, site = attach_band(d, 1, 3)
    assert site == 2
    assert e.signs == (1, 1, 0)
    assert e.formal == {2}
    # 0-smoothing of the site restores the old circle counts.
    for a in range(4):
        assert resolve(e, a).n_circles == resolve(d, a).n_circles


def test_attach_band_same_arc_and_free():
    d = parse_pd(TREFOIL)
    e, site = attach_band(d, 2, 2)
    assert e.n == 4 and e.formal == {3}
    r0 = resolve(e, 0b0000)
    r1 = resolve(e, 0b1000)
    assert r0.n_circles == 3  # matches the trefoil all-zero state
    assert r1.n_circles == 4  # pinch adds a circle

    u = parse_pd({"pd": [], "free_circles": 1})
    e2, _ = attach_band(u, u.free_arcs[0], u.free_arcs[0])
    assert resolve(e2, 0b0).n_circles == 1
    assert resolve(e2, 0b1).n_circles == 2


def test_attach_band_merging_free_circles():
    d = parse_pd({"pd": [], "free_circles": 2})
    a, b = d.free_arcs
    e, _ = attach_band(d, a, b)
    assert resolve(e, 0b0).n_circles == 2
    assert resolve(e, 0b1).n_circles == 1


def test_smooth_crossings_undoes_kink():
    d = parse_pd(TREFOIL)
    k = insert_kink(d, 1, 1)
    back = smooth_crossings(k, {3: 0})
    assert back.n == 3
    assert len(back.free_arcs) == 1  # the curl circle survives as a free circle
    trimmed = delete_free_circle(back, back.free_arcs[0])
    assert trimmed.signs == d.signs
    for a in range(8):
        assert resolve(trimmed, a).n_circles == resolve(d, a).n_circles


def test_smooth_all_crossings_counts_circles():
    d = parse_pd(TREFOIL)
    for alpha in range(8):
        s = smooth_crossings(d, {c: (alpha >> c) & 1 for c in range(3)})
        assert s.n == 0
        assert len(s.free_arcs) == resolve(d, alpha).n_circles


def test_add_and_delete_free_circle():
    d = parse_pd(TREFOIL)
    e, arc = add_free_circle(d)
    assert arc in e.free_arcs
    assert delete_free_circle(e, arc) == d
    with pytest.raises(ValueError):
        delete_free_circle(d, 99)


def test_cable_crossing_counts():
    u = parse_pd({"pd": [], "free_circles": 1})
    assert cable(u, 2, 0).n == 0
    assert len(cable(u, 2, 0).free_arcs) == 2
    c1 = cable(u, 2, 1)
    assert c1.n == 2 and c1.signs == (1, 1)
    cm = cable(u, 2, -1)
    assert cm.n == 2 and cm.signs == (-1, -1)

    t = parse_pd(TREFOIL)
    c = cable(t, 2, t.writhe)
    assert c.n == 12
    assert c.signs == (-1,) * 12
    assert len(c.components) == 2


def test_cable_one_strand_is_identity_shape():
    t = parse_pd(TREFOIL)
    c = cable(t, 1)
    assert c.n == 3
    assert c.signs == t.signs
    for a in range(8):
        assert resolve(c, a).n_circles == resolve(t, a).n_circles


def test_cable_framing_correction():
    t = parse_pd(TREFOIL)
    # One extra positive full twist on two strands: 2 more crossings.
    c = cable(t, 2, t.writhe + 1)
    assert c.n == 14
    assert sum(c.signs) == -10
    c2 = cable(t, 2, t.writhe - 1)
    assert c2.n == 14
    assert sum(c2.signs) == -14


def test_cable_two_component_framing_list():
    d = parse_pd(HOPF_POS)
    c = cable(d, 2, [1, 1])
    # Self-writhe of each Hopf component is 0, so one twist block each.
    assert c.n == 8 + 2 + 2
    assert len(c.components) == 4
