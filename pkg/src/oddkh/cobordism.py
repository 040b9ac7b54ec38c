"""Chain maps induced by elementary link cobordisms, and movie evaluation.

Every builder returns a ChainMap between complexes assembled with the
canonical sign choice unless a complex is passed in.  Conventions:

- Births include, deaths contract, dots wedge.  Deaths and dots carry a
  per-vertex parity sign computed by ``s_value``.
- Saddles ride an auxiliary band site.  The sign extension over the
  enlarged cube is pinned to both end assignments and then normalized
  so the band edge at the all-zero resolution is positive.  A band that
  joins two link components therefore acts with no signs at all.
- Reidemeister 1 and 2 maps are strong deformation retractions: the
  curl or bigon generators are eliminated pair by pair, and the
  survivors are matched onto the small complex with a per-vertex sign
  correction.  The output is deterministic, so repeated builds agree
  on the nose.
"""

from __future__ import annotations

from dataclasses import dataclass

from .complexes import (
    ChainComplex,
    ChainMap,
    assemble_complex,
    compose,
    identity_chain_map,
    is_chain_map,
)
from .cube import Cube, build_cube, extend_sign_assignment
from .linalg import IntMatrix
from .linkdiag import (
    LinkDiagram,
    add_free_circle,
    attach_band,
    delete_free_circle,
    diagram_to_dict,
    insert_kink,
    parse_pd,
    resolve,
    smooth_crossings,
)
from .oddtqft import birth_map, compose as compose_tqft, death_map, dot_map, relabel_map


def s_value(diagram: LinkDiagram, alpha: int) -> int:
    """Exponent of the sign carried by deaths and dots at one vertex.

    Half of (circles at alpha) + (circles at zero) + (degree of alpha).
    The sum is even because each 1-bit changes the circle count by
    exactly one, so the two counts differ from each other by the degree
    mod 2.
    """
    total = (
        resolve(diagram, alpha).n_circles
        + resolve(diagram, 0).n_circles
        + alpha.bit_count()
    )
    assert total % 2 == 0
    return total // 2


def _parity_sign(cube: Cube, alpha: int) -> int:
    total = (
        cube.resolution(alpha).n_circles
        + cube.resolution(0).n_circles
        + alpha.bit_count()
    )
    # total is even; total & 2 tests the parity of total // 2.
    return -1 if total & 2 else 1


def _vertexwise(cx_src: ChainComplex, cx_dst: ChainComplex, q_shift: int, factor) -> ChainMap:
    """Assemble a chain map from one state-space map per vertex.

    ``factor(alpha)`` returns (scalar, target vertex, TqftMap); the two
    vertices must sit in the same homological degree.  Masks are shared
    verbatim, which is sound exactly when the circle keys agree, so
    factories assert that before handing maps over.
    """
    blocks: dict[int, dict] = {}
    for alpha in cx_src.cube.vertices():
        scalar, beta, fm = factor(alpha)
        if scalar == 0 or fm.is_zero():
            continue
        h = alpha.bit_count() - cx_src.n_minus
        assert beta.bit_count() - cx_dst.n_minus == h
        ent = blocks.setdefault(h, {})
        for mask, terms in fm.columns.items():
            j = cx_src.index(h, (alpha, mask))
            for coeff, out in terms:
                ent[cx_dst.index(h, (beta, out)), j] = scalar * coeff
    mats = {h: IntMatrix(cx_dst.dim(h), cx_src.dim(h), e) for h, e in blocks.items()}
    f = ChainMap(cx_src, cx_dst, mats, q_shift)
    assert is_chain_map(f)
    return f


def birth_cobordism_map(cx: ChainComplex) -> ChainMap:
    """Inclusion into the complex of the diagram plus one free circle."""
    big, arc = add_free_circle(cx.cube.diagram)
    dst = assemble_complex(build_cube(big, cx.cube.theory))

    def factor(alpha):
        sp, tp = cx.cube.space(alpha), dst.cube.space(alpha)
        return 1, alpha, birth_map(sp, tp, arc)

    return _vertexwise(cx, dst, 1, factor)


def death_cobordism_map(cx: ChainComplex, arc: int) -> ChainMap:
    """Contraction against a dying free circle, signed per vertex."""
    d = cx.cube.diagram
    if arc not in d.free_arcs:
        raise ValueError(f"{arc} is not a free circle")
    dst = assemble_complex(build_cube(delete_free_circle(d, arc), cx.cube.theory))

    def factor(alpha):
        sp, tp = cx.cube.space(alpha), dst.cube.space(alpha)
        return _parity_sign(cx.cube, alpha), alpha, death_map(sp, tp, arc)

    return _vertexwise(cx, dst, 1, factor)


def dot_cobordism_map(cx: ChainComplex, arc: int) -> ChainMap:
    """Wedge by the circle through ``arc``, signed per vertex."""
    if arc not in cx.cube.diagram.arcs:
        raise ValueError(f"unknown arc {arc}")

    def factor(alpha):
        res = cx.cube.resolution(alpha)
        key = res.circle_key(res.arc_circle[arc])
        return _parity_sign(cx.cube, alpha), alpha, dot_map(cx.cube.space(alpha), key)

    return _vertexwise(cx, cx, -2, factor)


def saddle_cobordism_map(
    cx: ChainComplex,
    arc1: int,
    arc2: int,
    dst: ChainComplex | None = None,
    normalize: bool = True,
) -> ChainMap:
    """Band surgery between two arcs, or from one arc to itself.

    The band site is smoothed 0 on the source side and 1 on the target
    side.  Both slices of the enlarged cube are pinned to the signs the
    two complexes actually use, the extension fills in the band edges,
    and ``normalize`` flips them all if the band edge at the all-zero
    resolution came out negative.  Either way the result is a chain
    map; the two choices differ by one overall sign.
    """
    d = cx.cube.diagram
    banded, site = attach_band(d, arc1, arc2)
    surgered = smooth_crossings(banded, {site: 1})
    try:
        if dst is None:
            dst = assemble_complex(build_cube(surgered, cx.cube.theory))
        elif dst.cube.diagram != surgered:
            raise ValueError("target complex does not match the band surgery")
        if dst.cube.theory != cx.cube.theory:
            raise ValueError("theories differ")
        aux = build_cube(banded, cx.cube.theory)
        bit = 1 << site
        pinned = {}
        for a, c in cx.cube.edges():
            pinned[a, c] = cx.signs[a, c]
        for a, c in dst.cube.edges():
            pinned[a | bit, c] = dst.signs[a, c]
        eps = extend_sign_assignment(aux, pinned)
    except AssertionError as e:
        raise ValueError(f"no planar band from {arc1} to {arc2}: {e}") from e
    if normalize and eps[0, site] == -1:
        eps = {e: (-v if e[1] == site else v) for e, v in eps.items()}

    def factor(alpha):
        assert aux.space(alpha).keys == cx.cube.space(alpha).keys
        assert aux.space(alpha | bit).keys == dst.cube.space(alpha).keys
        scalar = eps[alpha, site] * (-1 if alpha.bit_count() & 1 else 1)
        return scalar, alpha, aux.edge_map(alpha, site)

    return _vertexwise(cx, dst, -1, factor)


def _axpy(dst: dict, coeff: int, src: dict) -> None:
    for k, v in src.items():
        w = dst.get(k, 0) + coeff * v
        if w:
            dst[k] = w
        else:
            dst.pop(k, None)


class _Retraction:
    """Gaussian elimination over a complex, tracking the retraction data.

    Generators are (degree, index) pairs into the original basis.
    ``rows[x]`` is the functional giving the coefficient of survivor
    ``x`` after projecting, ``cols[x]`` the chain included for ``x``,
    both sparse over original indices in the same degree.  Eliminating
    along a unit pivot applies the standard corrections; the composite
    projection after inclusion stays the identity on survivors.
    """

    def __init__(self, cx: ChainComplex):
        self.cx = cx
        self.d: dict[tuple, dict] = {}
        self.dT: dict[tuple, dict] = {}
        self.rows: dict[tuple, dict] = {}
        self.cols: dict[tuple, dict] = {}
        for h in cx.degrees():
            for j in range(cx.dim(h)):
                self.rows[h, j] = {j: 1}
                self.cols[h, j] = {j: 1}
        for h in cx.degrees():
            for (i, j), v in cx.differential(h).data.items():
                self.d.setdefault((h, j), {})[h + 1, i] = v
                self.dT.setdefault((h + 1, i), {})[h, j] = v

    def entry(self, x, y) -> int:
        return self.d.get(x, {}).get(y, 0)

    def eliminate(self, x, y) -> None:
        p = self.entry(x, y)
        if p not in (1, -1):
            raise AssertionError(f"pivot {p} at {x}->{y} is not a unit")
        srcs = {r: v for r, v in self.dT.get(y, {}).items() if r != x}
        tgts = {s: v for s, v in self.d.get(x, {}).items() if s != y}
        for r, dyr in srcs.items():
            _axpy(self.cols[r], -p * dyr, self.cols[x])
            drow = self.d.setdefault(r, {})
            for s, dsx in tgts.items():
                w = drow.get(s, 0) - p * dyr * dsx
                if w:
                    drow[s] = w
                    self.dT.setdefault(s, {})[r] = w
                else:
                    drow.pop(s, None)
                    self.dT.get(s, {}).pop(r, None)
        for s, dsx in tgts.items():
            _axpy(self.rows[s], -p * dsx, self.rows[y])
        self._drop(x)
        self._drop(y)

    def _drop(self, x) -> None:
        for s in self.d.pop(x, {}):
            self.dT[s].pop(x, None)
        for r in self.dT.pop(x, {}):
            self.d[r].pop(x, None)
        del self.rows[x]
        del self.cols[x]


def _squeeze_bits(alpha: int, drop: tuple) -> int:
    """Remove the given bit positions, closing the gaps."""
    out = 0
    shift = 0
    for pos in range(alpha.bit_length()):
        if pos in drop:
            continue
        if alpha >> pos & 1:
            out |= 1 << shift
        shift += 1
    return out


def _finish(red: _Retraction, cx_small: ChainComplex, translate):
    """Match the survivors of a reduction onto a small complex.

    ``translate`` sends a surviving (alpha, mask) generator of the big
    complex to its small counterpart.  The survivor differential must
    equal the small one up to one sign per small vertex; the signs are
    propagated from the all-zero vertex and then the match is checked
    entry by entry.  Returns (include, project) chain maps.
    """
    cx_big = red.cx
    to_small: dict[tuple, tuple] = {}
    to_big: dict[tuple, tuple] = {}
    for x in red.rows:
        h, i = x
        gen_s = translate(*cx_big.basis(h)[i])
        to_small[x] = gen_s
        to_big[gen_s] = (h, x)
    assert len(to_big) == sum(cx_small.dim(h) for h in cx_small.degrees())

    eta = {0: 1}
    for beta in sorted(cx_small.cube.vertices(), key=lambda a: a.bit_count()):
        if beta == 0:
            continue
        c = (beta & -beta).bit_length() - 1
        alpha = beta ^ (1 << c)
        coeff, out = cx_small.cube.edge_terms(alpha, c, 0)[0]
        small_val = cx_small.signs[alpha, c] * coeff
        _, x = to_big[alpha, 0]
        _, y = to_big[beta, out]
        big_val = red.entry(x, y)
        assert abs(big_val) == abs(small_val)
        eta[beta] = (big_val // small_val) * eta[alpha]

    expected: dict[tuple, int] = {}
    for h in cx_small.degrees():
        gens = cx_small.basis(h)
        tgts = cx_small.basis(h + 1) if cx_small.dim(h + 1) else ()
        for (i, j), v in cx_small.differential(h).data.items():
            expected[gens[j], tgts[i]] = v
    actual: dict[tuple, int] = {}
    for x, row in red.d.items():
        gs = to_small[x]
        for y, v in row.items():
            gt = to_small[y]
            actual[gs, gt] = v * eta[gs[0]] * eta[gt[0]]
    assert actual == expected, "survivor differential does not match the small complex"

    proj_blocks: dict[int, dict] = {}
    incl_blocks: dict[int, dict] = {}
    for gs, (h, x) in to_big.items():
        sgn = eta[gs[0]]
        si = cx_small.index(h, gs)
        pb = proj_blocks.setdefault(h, {})
        for j, v in red.rows[x].items():
            pb[si, j] = sgn * v
        ib = incl_blocks.setdefault(h, {})
        for j, v in red.cols[x].items():
            ib[j, si] = sgn * v
    project = ChainMap(
        cx_big,
        cx_small,
        {h: IntMatrix(cx_small.dim(h), cx_big.dim(h), e) for h, e in proj_blocks.items()},
    )
    include = ChainMap(
        cx_small,
        cx_big,
        {h: IntMatrix(cx_big.dim(h), cx_small.dim(h), e) for h, e in incl_blocks.items()},
    )
    assert is_chain_map(project) and is_chain_map(include)
    assert compose(project, include) == identity_chain_map(cx_small)
    return include, project


def _find_kink(diagram: LinkDiagram, arc: int):
    """Locate the curl crossing an arc belongs to.

    Returns (crossing index, curl arc, curl side).  The curl side is the
    smoothing bit whose resolution shows the small circle.  On a kinked
    free circle both arcs repeat; the larger one bounds the curl.
    """
    for k, t in enumerate(diagram.crossings):
        if t.count(arc) < 2:
            continue
        repeated = sorted({a for a in t if t.count(a) == 2})
        loop = repeated[-1]
        slots = tuple(s for s in range(4) if t[s] == loop)
        curl_bit = 0 if slots in ((0, 1), (2, 3)) else 1
        return k, loop, curl_bit
    raise ValueError(f"arc {arc} does not bound a curl")


def kink_retraction(big_cx: ChainComplex, crossing: int, small_cx: ChainComplex | None = None):
    """Deformation retraction across one curl crossing.

    Returns (include, project): include maps the curl-free complex into
    the kinked one and is supported on the resolution carrying the
    curl; project is its one-sided inverse, exact on the nose.
    """
    d = big_cx.cube.diagram
    t = d.crossings[crossing]
    loop = sorted({a for a in t if t.count(a) == 2})
    if not loop:
        raise ValueError(f"crossing {crossing} is not a curl")
    _, loop, curl_bit = _find_kink(d, loop[-1])
    small = smooth_crossings(d, {crossing: 1 - curl_bit})
    if small_cx is None:
        small_cx = assemble_complex(build_cube(small, big_cx.cube.theory))
    elif small_cx.cube.diagram != small:
        raise ValueError("small complex does not match the unkinked diagram")

    bit = 1 << crossing
    cube = big_cx.cube
    nm = big_cx.n_minus
    pairs = []
    for alpha in cube.vertices():
        if alpha & bit:
            continue
        sp = cube.space(alpha)
        lbit = (1 << sp.pos[loop]) if curl_bit == 0 else 0
        h = alpha.bit_count() - nm
        for mask in sp.basis():
            if curl_bit == 0 and mask & lbit:
                continue  # curl-divisible generators survive on the 0 side
            terms = [
                (coeff, out)
                for coeff, out in cube.edge_terms(alpha, crossing, mask)
                if curl_bit == 0 or out & (1 << cube.space(alpha | bit).pos[loop])
            ]
            assert len(terms) == 1 and abs(terms[0][0]) == 1
            x = (h, big_cx.index(h, (alpha, mask)))
            y = (h + 1, big_cx.index(h + 1, (alpha | bit, terms[0][1])))
            pairs.append((x, y))

    red = _Retraction(big_cx)
    for x, y in pairs:
        red.eliminate(x, y)

    kept_bit = curl_bit
    small_nm = small_cx.n_minus

    def translate(alpha, mask):
        assert (alpha >> crossing & 1) == kept_bit
        sp = cube.space(alpha)
        assert sp.keys[-1] == loop, "curl key must be the top generator"
        assert small_cx.cube.space(_squeeze_bits(alpha, (crossing,))).keys == sp.keys[:-1]
        lbit = 1 << sp.pos[loop]
        if kept_bit == 0:
            assert mask & lbit
            mask ^= lbit
        else:
            assert not mask & lbit
        return _squeeze_bits(alpha, (crossing,)), mask

    # degree bookkeeping: the kept slice and the small complex agree.
    assert big_cx.n_minus - small_nm == (1 if curl_bit == 1 else 0)
    return _finish(red, small_cx, translate)


def r1_cobordism_map(
    cx: ChainComplex, arc: int, sign: int = 1, direction: str = "do", side: str = "right"
) -> ChainMap:
    """One Reidemeister 1 move as a chain map.

    ``do`` adds a curl of the given sign on ``arc`` and returns the
    inclusion into the kinked complex.  ``side`` throws the curl to
    either side of the strand; the two kinks differ by a half turn of
    the new crossing.  ``undo`` expects ``cx`` to be kinked, identifies
    the curl through ``arc``, and returns the projection; ``sign`` and
    ``side`` are ignored then.
    """
    if side not in ("right", "left"):
        raise ValueError(f"unknown side {side!r}")
    if direction == "do":
        kinked = insert_kink(cx.cube.diagram, arc, sign)
        if side == "left":
            # half-turn the curl crossing, keeping the strand flow: the
            # in and out arcs trade places and the tuple rotates by two
            rows = list(kinked.crossings)
            t = rows[-1]
            rows[-1] = (t[2], t[3], t[1], t[0]) if sign == 1 else (t[2], t[0], t[3], t[1])
            kinked = LinkDiagram(rows, free_arcs=kinked.free_arcs, signs=kinked.signs)
        big = assemble_complex(build_cube(kinked, cx.cube.theory))
        include, _ = kink_retraction(big, len(big.cube.diagram.crossings) - 1, cx)
        return include
    if direction == "undo":
        k, _, _ = _find_kink(cx.cube.diagram, arc)
        _, project = kink_retraction(cx, k)
        return project
    raise ValueError(f"unknown direction {direction!r}")


def build_poke(diagram: LinkDiagram, over_arc: int, under_arc: int):
    """Push one strand over another, making a cancelling crossing pair.

    Returns (poked diagram, (over middle arc, under middle arc)); the
    middle arcs bound the new bigon.  The two crossings are appended
    last, the first positive and the second negative.
    """
    if over_arc == under_arc:
        raise ValueError("the two strands must be distinct arcs")
    if diagram.formal:
        raise ValueError("cannot poke a diagram with band sites")
    top = diagram.max_arc()
    a_mid, b_mid = top + 1, top + 2
    top += 2
    rows = [tuple(c) for c in diagram.crossings]
    free = list(diagram.free_arcs)
    ends = {}
    for arc in (over_arc, under_arc):
        if arc in free:
            free.remove(arc)
            ends[arc] = (arc, arc)
        else:
            top += 1
            hd = diagram.arc_dir[arc]
            if hd is None:
                raise ValueError(f"arc {arc} has no direction")
            rl = [list(c) for c in rows]
            rl[hd[1][0]][hd[1][1]] = top
            rows = [tuple(r) for r in rl]
            ends[arc] = (arc, top)
    (a_in, a_out), (b_in, b_out) = ends[over_arc], ends[under_arc]
    first = (b_in, a_mid, b_mid, a_in)
    second = (b_mid, a_mid, b_out, a_out)
    poked = LinkDiagram(
        rows + [first, second],
        free_arcs=tuple(free),
        signs=diagram.signs + (1, -1),
    )
    return poked, (a_mid, b_mid)


def _bigon_vertices(cx: ChainComplex, arcs: tuple):
    """Locate the crossing pair and smoothings around a bigon.

    Returns (crossing pair, lens bits, braid bits, lens circle key).
    The lens bits are the smoothing of the pair at which the two bigon
    arcs close into their own circle; the braid bits give the smoothing
    where the strands pass straight through.
    """
    d = cx.cube.diagram
    m1, m2 = arcs
    ks = [k for k, t in enumerate(d.crossings) if m1 in t and m2 in t]
    if len(ks) != 2:
        raise ValueError(f"arcs {arcs} do not bound a bigon")
    k1, k2 = ks
    want = frozenset((m1, m2))
    for b1, b2 in ((0, 1), (1, 0)):
        v = b1 << k1 | b2 << k2
        res = cx.cube.resolution(v)
        for idx in range(res.n_circles):
            if frozenset(res.circle_arcs(idx)) == want:
                return (k1, k2), (b1, b2), (1 - b1, 1 - b2), min(m1, m2)
    raise ValueError(f"arcs {arcs} do not close into a circle at either mixed smoothing")


def bigon_retraction(big_cx: ChainComplex, arcs: tuple, small_cx: ChainComplex | None = None):
    """Deformation retraction across a cancelling crossing pair.

    ``arcs`` are the two arcs bounding the bigon being collapsed.
    Returns (include, project) between the poked complex and the one
    where the two strands pass straight through.  A poked diagram has
    two bigons; collapsing the one the poke created inverts the poke,
    collapsing the other transplants the strands.
    """
    (k1, k2), lens, braid, lens_key = _bigon_vertices(big_cx, tuple(arcs))
    d = big_cx.cube.diagram
    small = smooth_crossings(d, {k1: braid[0], k2: braid[1]})
    if small_cx is None:
        small_cx = assemble_complex(build_cube(small, big_cx.cube.theory))
    elif small_cx.cube.diagram != small:
        raise ValueError("small complex does not match the straightened diagram")

    cube = big_cx.cube
    nm = big_cx.n_minus
    pair_bits = (1 << k1) | (1 << k2)
    v_lens = lens[0] << k1 | lens[1] << k2
    k_to_lens = k1 if lens[0] else k2
    k_to_full = k2 if lens[0] else k1
    pairs = []
    for alpha in cube.vertices():
        if alpha & pair_bits:
            continue
        h = alpha.bit_count() - nm
        sp0 = cube.space(alpha)
        spl = cube.space(alpha | v_lens)
        lbit = 1 << spl.pos[lens_key]
        # Round one: every generator at the restored smoothing pairs
        # with its lens-divisible image one step up.
        for mask in sp0.basis():
            terms = [
                (c, out)
                for c, out in cube.edge_terms(alpha, k_to_lens, mask)
                if out & lbit
            ]
            assert len(terms) == 1 and abs(terms[0][0]) == 1
            x = (h, big_cx.index(h, (alpha, mask)))
            y = (h + 1, big_cx.index(h + 1, (alpha | v_lens, terms[0][1])))
            pairs.append((x, y))
        # Round two: the lens-free remainder pairs with the fully
        # smoothed slice across the merge that eats the lens circle.
        for mask in spl.basis():
            if mask & lbit:
                continue
            terms = cube.edge_terms(alpha | v_lens, k_to_full, mask)
            assert len(terms) == 1 and abs(terms[0][0]) == 1
            x = (h + 1, big_cx.index(h + 1, (alpha | v_lens, mask)))
            y = (h + 2, big_cx.index(h + 2, (alpha | pair_bits, terms[0][1])))
            pairs.append((x, y))

    red = _Retraction(big_cx)
    for x, y in pairs:
        red.eliminate(x, y)

    v_braid = braid[0] << k1 | braid[1] << k2
    drop = tuple(sorted((k1, k2)))

    def translate(alpha, mask):
        assert (alpha & pair_bits) == v_braid
        small_alpha = _squeeze_bits(alpha, drop)
        assert small_cx.cube.space(small_alpha).keys == cube.space(alpha).keys
        return small_alpha, mask

    return _finish(red, small_cx, translate)


def r2_cobordism_map(cx: ChainComplex, arcs: tuple, direction: str = "do") -> ChainMap:
    """One Reidemeister 2 move as a chain map.

    ``do`` pokes the first arc over the second and returns the
    inclusion into the poked complex, supported on the smoothings where
    the strands pass straight through.  ``undo`` collapses the bigon
    bounded by ``arcs`` in an already poked diagram.
    """
    if direction == "do":
        over_arc, under_arc = arcs
        poked, mids = build_poke(cx.cube.diagram, over_arc, under_arc)
        try:
            big = assemble_complex(build_cube(poked, cx.cube.theory))
        except AssertionError as e:
            raise ValueError(
                f"no planar poke of {over_arc} over {under_arc} with this handedness"
            ) from e
        include, _ = bigon_retraction(big, mids, cx)
        return include
    if direction == "undo":
        _, project = bigon_retraction(cx, tuple(arcs))
        return project
    raise ValueError(f"unknown direction {direction!r}")


def relabel_chain_iso(cxa: ChainComplex, cxb: ChainComplex, arc_map: dict) -> ChainMap:
    """Chain isomorphism induced by an arc relabeling of the diagram.

    The relabeling must carry the first diagram's crossings onto the
    second's slot by slot.  Circle keys move along; each vertex map
    carries the wedge reordering sign, and a per-vertex correction
    propagated from the all-zero vertex reconciles the two canonical
    sign choices.
    """
    da, db = cxa.cube.diagram, cxb.cube.diagram
    mapped = [tuple(arc_map[a] for a in t) for t in da.crossings]
    if mapped != list(db.crossings) or da.signs != db.signs:
        raise ValueError("arc map does not carry one diagram onto the other")
    if sorted(arc_map[a] for a in da.free_arcs) != sorted(db.free_arcs):
        raise ValueError("free circles do not correspond")

    vmaps = {}
    for alpha in cxa.cube.vertices():
        ra, rb = cxa.cube.resolution(alpha), cxb.cube.resolution(alpha)
        key_map = {}
        for idx in range(ra.n_circles):
            image = {arc_map[x] for x in ra.circle_arcs(idx)}
            key_map[ra.circle_key(idx)] = min(image)
        assert sorted(key_map.values()) == sorted(rb.circle_key(i) for i in range(rb.n_circles))
        vmaps[alpha] = relabel_map(cxa.cube.space(alpha), cxb.cube.space(alpha), key_map)

    eta = {0: 1}
    for beta in sorted(cxa.cube.vertices(), key=lambda v: v.bit_count()):
        if beta == 0:
            continue
        c = (beta & -beta).bit_length() - 1
        alpha = beta ^ (1 << c)
        left = compose_tqft(vmaps[beta], cxa.cube.edge_map(alpha, c)).scale(cxa.signs[alpha, c])
        right = compose_tqft(cxb.cube.edge_map(alpha, c), vmaps[alpha]).scale(cxb.signs[alpha, c])
        mask = next(m for m, terms in sorted(left.columns.items()) if terms)
        coeff_l, out_l = left.columns[mask][0]
        coeff_r = next(v for v, o in right.columns[mask] if o == out_l)
        ratio = coeff_l * coeff_r
        assert ratio in (1, -1) and left == right.scale(ratio)
        eta[beta] = ratio * eta[alpha]

    blocks: dict[int, dict] = {}
    for alpha, vm in vmaps.items():
        h = alpha.bit_count() - cxa.n_minus
        ent = blocks.setdefault(h, {})
        for mask, terms in vm.columns.items():
            j = cxa.index(h, (alpha, mask))
            for coeff, out in terms:
                ent[cxb.index(h, (alpha, out)), j] = eta[alpha] * coeff
    iso = ChainMap(cxa, cxb, {h: IntMatrix(cxb.dim(h), cxa.dim(h), e) for h, e in blocks.items()})
    assert is_chain_map(iso)
    return iso


@dataclass(frozen=True)
class MovieEvent:
    """One elementary cobordism in a movie script.

    ``kind`` is one of birth, death, saddle, dot, r1, r2.  The arcs
    tuple carries the event's reference points on the current diagram:
    nothing for a birth, the dying circle for a death, the two band
    feet for a saddle, the dotted arc for a dot, the host arc (do) or a
    curl arc (undo) for r1, and the strand pair (do, over strand first)
    or the bigon pair (undo) for r2.
    """

    kind: str
    arcs: tuple = ()
    sign: int = 0
    direction: str = "do"
    side: str = "right"


def birth_event() -> MovieEvent:
    return MovieEvent("birth")


def death_event(arc: int) -> MovieEvent:
    return MovieEvent("death", (arc,))


def saddle_event(arc1: int, arc2: int) -> MovieEvent:
    return MovieEvent("saddle", (arc1, arc2))


def dot_event(arc: int) -> MovieEvent:
    return MovieEvent("dot", (arc,))


def r1_event(arc: int, sign: int = 1, direction: str = "do", side: str = "right") -> MovieEvent:
    # the curl being removed carries its own sign and side, so undo ignores both
    if direction != "do":
        sign, side = 0, "right"
    return MovieEvent("r1", (arc,), sign, direction, side)


def r2_event(arc1: int, arc2: int, direction: str = "do") -> MovieEvent:
    return MovieEvent("r2", (arc1, arc2), 0, direction)


class MovieError(ValueError):
    """Raised when a movie event cannot be applied; records its index."""

    def __init__(self, index: int, event: MovieEvent, reason: Exception):
        super().__init__(f"event {index} ({event.kind}) failed: {reason}")
        self.index = index
        self.event = event
        self.reason = reason


@dataclass
class MovieResult:
    chain_map: ChainMap
    initial: LinkDiagram
    final: LinkDiagram


def apply_event(cx: ChainComplex, event: MovieEvent) -> ChainMap:
    """The chain map of one event out of the given complex."""
    if event.kind == "birth":
        return birth_cobordism_map(cx)
    if event.kind == "death":
        return death_cobordism_map(cx, event.arcs[0])
    if event.kind == "saddle":
        return saddle_cobordism_map(cx, event.arcs[0], event.arcs[1])
    if event.kind == "dot":
        return dot_cobordism_map(cx, event.arcs[0])
    if event.kind == "r1":
        return r1_cobordism_map(cx, event.arcs[0], event.sign or 1, event.direction, event.side)
    if event.kind == "r2":
        return r2_cobordism_map(cx, event.arcs, event.direction)
    raise ValueError(f"unknown event kind {event.kind!r}")


def evaluate_movie(initial, events, theory: str = "y") -> MovieResult:
    """Compose the chain maps of a movie script left to right.

    ``initial`` is a diagram or an already assembled complex.  Failures
    carry the index of the offending event.
    """
    if isinstance(initial, ChainComplex):
        cx = initial
    else:
        cx = assemble_complex(build_cube(initial, theory))
    start = cx.cube.diagram
    total = identity_chain_map(cx)
    for idx, event in enumerate(events):
        try:
            step = apply_event(total.dst, event)
        except MovieError:
            raise
        except Exception as e:
            raise MovieError(idx, event, e) from e
        total = compose(step, total)
    return MovieResult(total, start, total.dst.cube.diagram)


def dotted_combination(initial, backbone, placements, theory: str = "y") -> ChainMap:
    """Integer combination of dotted variants of one undotted script.

    ``placements`` is a list of (coefficient, [(position, arc), ...])
    pairs; each variant inserts its dots into the backbone at the given
    event positions.  All variants share the undotted maps because the
    builders are deterministic, so the combination is well defined.
    """
    combined = None
    for coeff, dots in placements:
        events = list(backbone)
        for position, arc in sorted(dots, key=lambda t: -t[0]):
            events.insert(position, dot_event(arc))
        part = evaluate_movie(initial, events, theory).chain_map.scale(coeff)
        combined = part if combined is None else combined + part
    if combined is None:
        raise ValueError("no variants given")
    return combined


def event_to_dict(event: MovieEvent) -> dict:
    out: dict = {"type": event.kind}
    if event.kind in ("death", "dot"):
        out["arc"] = event.arcs[0]
    elif event.kind == "saddle":
        out["arcs"] = list(event.arcs)
    elif event.kind == "r1":
        out["arc"] = event.arcs[0]
        out["direction"] = event.direction
        if event.direction == "do":
            out["sign"] = event.sign
            if event.side != "right":
                out["side"] = event.side
    elif event.kind == "r2":
        out["arcs"] = list(event.arcs)
        out["direction"] = event.direction
    return out


def event_from_dict(data: dict) -> MovieEvent:
    kind = data.get("type")
    if kind == "birth":
        return birth_event()
    if kind == "death":
        return death_event(int(data["arc"]))
    if kind == "saddle":
        a, b = data["arcs"]
        return saddle_event(int(a), int(b))
    if kind == "dot":
        return dot_event(int(data["arc"]))
    if kind == "r1":
        direction = data.get("direction", "do")
        side = data.get("side", "right") if direction == "do" else "right"
        sign = int(data.get("sign", 1)) if direction == "do" else 0
        return MovieEvent("r1", (int(data["arc"]),), sign, direction, side)
    if kind == "r2":
        a, b = data["arcs"]
        return r2_event(int(a), int(b), data.get("direction", "do"))
    raise ValueError(f"unknown event type {kind!r}")


def script_to_dict(initial: LinkDiagram, events) -> dict:
    return {
        "initial": diagram_to_dict(initial),
        "events": [event_to_dict(e) for e in events],
    }


def script_from_dict(data: dict):
    unknown = set(data) - {"initial", "events"}
    if unknown:
        raise ValueError(f"unknown keys {sorted(unknown)}")
    initial = parse_pd(data["initial"])
    events = [event_from_dict(e) for e in data.get("events", [])]
    return initial, events
