"""The hypercube of smoothings of a link diagram.

Vertices carry exterior state spaces, edges carry merge or split maps,
and square faces are sorted into the ten shapes that determine how the
two paths around them compare.  Coherent edge signs are then a linear
question over GF(2).  Gradings and differentials live one level up.
"""

from __future__ import annotations

from dataclasses import dataclass

from .linalg import solve_gf2
from .linkdiag import LinkDiagram, Resolution, resolve, transit_side
from .oddtqft import ExteriorSpace, TqftMap, relabel_term, split_terms, vertex_space

__all__ = [
    "Cube",
    "CubeEdge",
    "FaceClass",
    "build_cube",
    "classify_face",
    "face_edges",
    "solve_sign_assignment",
    "enumerate_sign_assignments",
    "extend_sign_assignment",
    "fast_sign_assignment",
    "verify_sign_assignment",
]


@dataclass(frozen=True)
class CubeEdge:
    """One cube edge: crossing `c` flips from 0 to 1 at vertex `alpha`.

    For a merge, `key_map` sends every source circle key to its target
    key, two-to-one on the fused pair.  For a split it is the injective
    lift that already routes the parent to `child0`.
    """

    alpha: int
    c: int
    kind: str
    key_map: dict
    parent: object = None
    child0: object = None
    child1: object = None


class Cube:
    """All resolutions of a diagram together with their saddle maps.

    Resolutions, state spaces, and edges are derived on demand and
    cached.  `theory` fixes the sign convention for the two interleaved
    face shapes and affects nothing else.
    """

    __slots__ = ("diagram", "n", "theory", "_resolutions", "_spaces", "_edges")

    def __init__(self, diagram: LinkDiagram, theory: str = "y"):
        if theory not in ("x", "y"):
            raise ValueError("theory must be 'x' or 'y'")
        self.diagram = diagram
        self.n = len(diagram.crossings)
        self.theory = theory
        self._resolutions: dict[int, Resolution] = {}
        self._spaces: dict[int, ExteriorSpace] = {}
        self._edges: dict[tuple[int, int], CubeEdge] = {}

    def resolution(self, alpha: int) -> Resolution:
        r = self._resolutions.get(alpha)
        if r is None:
            r = resolve(self.diagram, alpha)
            self._resolutions[alpha] = r
        return r

    def space(self, alpha: int) -> ExteriorSpace:
        s = self._spaces.get(alpha)
        if s is None:
            s = vertex_space(self.resolution(alpha))
            self._spaces[alpha] = s
        return s

    def vertices(self):
        return range(1 << self.n)

    def edges(self):
        """Edges in lexicographic (vertex, crossing) order."""
        for alpha in range(1 << self.n):
            for c in range(self.n):
                if not alpha >> c & 1:
                    yield alpha, c

    def faces(self):
        """Faces as (alpha, c1, c2) with c1 < c2 both unresolved at alpha."""
        for alpha in range(1 << self.n):
            for c1 in range(self.n):
                if alpha >> c1 & 1:
                    continue
                for c2 in range(c1 + 1, self.n):
                    if not alpha >> c2 & 1:
                        yield alpha, c1, c2

    def edge(self, alpha: int, c: int) -> CubeEdge:
        e = self._edges.get((alpha, c))
        if e is None:
            e = self._make_edge(alpha, c)
            self._edges[alpha, c] = e
        return e

    def _make_edge(self, alpha: int, c: int) -> CubeEdge:
        if alpha >> c & 1:
            raise ValueError("crossing already resolved at this vertex")
        ra = self.resolution(alpha)
        rb = self.resolution(alpha | 1 << c)
        support = {ra.slot_circle[c, s] for s in range(4)}
        delta = rb.n_circles - ra.n_circles
        if delta == -1:
            if len(support) != 2:
                raise AssertionError("merge edge must touch two circles")
            key_map = {}
            for i in range(ra.n_circles):
                arc = ra.circle_arcs(i)[0]
                key_map[ra.circle_key(i)] = rb.circle_key(rb.arc_circle[arc])
            return CubeEdge(alpha, c, "merge", key_map)
        if delta == 1:
            if len(support) != 1:
                raise AssertionError("split edge must touch one circle")
            parent_idx = next(iter(support))
            parent = ra.circle_key(parent_idx)
            # The child through the (0,3) strand of the new smoothing
            # comes first; swapping the children negates the map.
            child0 = rb.circle_key(rb.slot_circle[c, 0])
            child1 = rb.circle_key(rb.slot_circle[c, 1])
            if child0 == child1:
                raise AssertionError("split children must differ")
            lift = {parent: child0}
            for i in range(ra.n_circles):
                if i == parent_idx:
                    continue
                arc = ra.circle_arcs(i)[0]
                lift[ra.circle_key(i)] = rb.circle_key(rb.arc_circle[arc])
            return CubeEdge(alpha, c, "split", lift, parent, child0, child1)
        raise AssertionError("a saddle changes the circle count by one")

    def edge_terms(self, alpha: int, c: int, mask: int):
        """Image of one basis monomial under one edge, as (coeff, mask) terms."""
        e = self.edge(alpha, c)
        src = self.space(alpha)
        dst = self.space(alpha | 1 << c)
        if e.kind == "merge":
            t = relabel_term(src, dst, e.key_map, mask)
            return () if t is None else (t,)
        return split_terms(src, dst, e.key_map, e.child0, e.child1, mask)

    def edge_map(self, alpha: int, c: int) -> TqftMap:
        src = self.space(alpha)
        dst = self.space(alpha | 1 << c)
        columns = {}
        for mask in range(src.dim):
            col = self.edge_terms(alpha, c, mask)
            if col:
                columns[mask] = tuple(col)
        return TqftMap(src, dst, columns)


def build_cube(diagram: LinkDiagram, theory: str = "y") -> Cube:
    """The resolution cube of a diagram."""
    return Cube(diagram, theory)


@dataclass(frozen=True)
class FaceClass:
    """Shape tag and path-comparison sign of one square face."""

    tag: str
    sigma: int


_FIXED_SIGMA = {"i": 1, "ii": 1, "iv": 1, "v": 1, "vii": -1, "viii": -1}


def _unit_composite(cube: Cube, alpha: int, first: int, second: int) -> dict:
    """Both edges of one path applied to the unit monomial."""
    vec = {0: 1}
    for a, c in ((alpha, first), (alpha | 1 << first, second)):
        nxt: dict[int, int] = {}
        for mask, coeff in vec.items():
            for s, out in cube.edge_terms(a, c, mask):
                v = nxt.get(out, 0) + coeff * s
                if v:
                    nxt[out] = v
                elif out in nxt:
                    del nxt[out]
        vec = nxt
    return vec


def _proportionality(p1: dict, p2: dict) -> int:
    if not p1 or not p2 or set(p1) != set(p2):
        raise AssertionError("face paths are not proportional")
    mask = next(iter(p1))
    sigma = 1 if p2[mask] == p1[mask] else -1
    for m, v in p1.items():
        if p2[m] != sigma * v:
            raise AssertionError("face paths are not proportional")
    return sigma


def _interleaving_sign(resolution: Resolution, circle: int, c1: int, c2: int) -> int:
    """Chirality of two interleaved split bands on one circle.

    Walk the circle once; each band's feet must alternate with the
    other's, attach from a single side, and the two bands from opposite
    sides.  The sign combines the cyclic foot order with the side the
    first band attaches on, and is unchanged by reversing the walk or
    renaming the bands.
    """
    feet = [t for t in resolution.circle_transits(circle) if t[0] in (c1, c2)]
    if len(feet) != 4:
        raise AssertionError("each band must meet the circle twice")
    if feet[0][0] != feet[2][0]:
        raise AssertionError("vanishing paths require interleaved feet")
    sides = [transit_side(t) for t in feet]
    if sides[0] != sides[2] or sides[1] != sides[3]:
        raise AssertionError("one band's feet must share a side")
    if sides[0] == sides[1]:
        raise AssertionError("interleaved bands must sit on opposite sides")

    def is_tail(t):
        strand = {t[1], t[2]}
        if strand == {0, 1}:
            return True
        if strand == {2, 3}:
            return False
        raise AssertionError("face crossings sit at their 0-smoothing")

    tails = [is_tail(t) for t in feet]
    for i in (0, 1):
        if tails[i] == tails[i + 2]:
            raise AssertionError("a band has one tail foot and one head foot")
    p = next(i for i in range(4) if feet[i][0] == c1 and tails[i])
    cyclic = 1 if tails[(p + 1) % 4] else -1
    return cyclic * sides[p]


def classify_face(cube: Cube, alpha: int, c1: int, c2: int) -> FaceClass:
    """Sort one face into its shape and report the sign relating its paths.

    `sigma` compares the two edge paths as maps.  For the two shapes
    whose paths both vanish the comparison is empty and the chosen
    theory dictates the sign instead.
    """
    if c1 == c2:
        raise ValueError("a face needs two distinct crossings")
    if c1 > c2:
        c1, c2 = c2, c1
    if (alpha >> c1 | alpha >> c2) & 1:
        raise ValueError("face crossings must be unresolved at the base vertex")
    ra = cube.resolution(alpha)
    s1 = {ra.slot_circle[c1, s] for s in range(4)}
    s2 = {ra.slot_circle[c2, s] for s in range(4)}
    p1 = _unit_composite(cube, alpha, c1, c2)
    p2 = _unit_composite(cube, alpha, c2, c1)
    if p1 or p2:
        sigma = _proportionality(p1, p2)
        shared = len(s1 & s2)
        if shared == 0:
            if len(s1) == 2 and len(s2) == 2:
                tag = "i"
            elif len(s1) == 1 and len(s2) == 1:
                tag = "vii"
            else:
                tag = "iv"
        elif len(s1) == 2 and len(s2) == 2:
            tag = "ii" if shared == 1 else ("iii" if sigma == 1 else "ix")
        elif len(s1) == 1 and len(s2) == 1:
            tag = "viii"
        else:
            tag = "v"
        fixed = _FIXED_SIGMA.get(tag)
        if fixed is not None and sigma != fixed:
            raise AssertionError(f"face of shape {tag} compared as {sigma:+d}")
        return FaceClass(tag, sigma)
    if s1 != s2 or len(s1) != 1:
        raise AssertionError("only a double split can have vanishing paths")
    chi = _interleaving_sign(ra, next(iter(s1)), c1, c2)
    tag = "vi" if chi == 1 else "x"
    sigma = chi if cube.theory == "y" else -chi
    return FaceClass(tag, sigma)


def face_edges(alpha: int, c1: int, c2: int):
    """The four edges bounding one face."""
    return (
        (alpha, c1),
        (alpha, c2),
        (alpha | 1 << c1, c2),
        (alpha | 1 << c2, c1),
    )


def _face_system(cube: Cube, index: dict) -> tuple[list[int], list[int]]:
    # Product of the four edge signs must be -sigma: as bits, the row
    # sums to 1 exactly when sigma is +1.
    rows, rhs = [], []
    for alpha, c1, c2 in cube.faces():
        row = 0
        for e in face_edges(alpha, c1, c2):
            row |= 1 << index[e]
        rows.append(row)
        rhs.append(1 if classify_face(cube, alpha, c1, c2).sigma == 1 else 0)
    return rows, rhs


def _signs_from_bits(index: dict, bits: int) -> dict:
    return {e: -1 if bits >> i & 1 else 1 for e, i in index.items()}


def solve_sign_assignment(cube: Cube) -> dict:
    """Canonical coherent edge signs.

    Lexicographic elimination over the edges in (vertex, crossing)
    order with free variables forced to +1, so the answer is a function
    of the cube alone.
    """
    index = {e: i for i, e in enumerate(cube.edges())}
    rows, rhs = _face_system(cube, index)
    sol, _ = solve_gf2(rows, rhs, len(index))
    if sol is None:
        raise ValueError("no coherent edge signs exist")
    return _signs_from_bits(index, sol)


def enumerate_sign_assignments(cube: Cube) -> list[dict]:
    """Every coherent edge-sign choice.

    Refuses to expand a solution space larger than 2^20.
    """
    index = {e: i for i, e in enumerate(cube.edges())}
    rows, rhs = _face_system(cube, index)
    sol, null = solve_gf2(rows, rhs, len(index))
    if sol is None:
        raise ValueError("no coherent edge signs exist")
    if len(null) > 20:
        raise ValueError("sign assignment space too large to enumerate")
    out = []
    for pick in range(1 << len(null)):
        bits = sol
        rest = pick
        i = 0
        while rest:
            if rest & 1:
                bits ^= null[i]
            rest >>= 1
            i += 1
        out.append(_signs_from_bits(index, bits))
    return out


def arrow_flipped_signs(cube: Cube, reversed_crossings) -> dict:
    """Edge signs realizing the other split-ordering arrow at some crossings.

    Reversing the arrow at a crossing swaps the two offspring circles of
    every split along that direction, negating exactly those edge maps
    and flipping the commutation of faces with an odd number of them.
    Signs are solved against the flipped face system and the negations
    folded back in, so assembling with the result over the unchanged
    edge maps yields the reoriented theory's differential.
    """
    flip = set(reversed_crossings)

    def negated(e):
        return e[1] in flip and cube.edge(*e).kind == "split"

    index = {e: i for i, e in enumerate(cube.edges())}
    rows, rhs = _face_system(cube, index)
    for k, (alpha, c1, c2) in enumerate(cube.faces()):
        if sum(negated(e) for e in face_edges(alpha, c1, c2)) % 2:
            rhs[k] ^= 1
    sol, _ = solve_gf2(rows, rhs, len(index))
    if sol is None:
        raise ValueError("no coherent edge signs exist for the flipped arrows")
    eps = _signs_from_bits(index, sol)
    return {e: -v if negated(e) else v for e, v in eps.items()}


def extend_sign_assignment(cube: Cube, pinned: dict) -> dict:
    """Canonical completion of a partial edge-sign choice.

    Raises ValueError when the pins close no coherent assignment.
    """
    index = {e: i for i, e in enumerate(cube.edges())}
    rows, rhs = _face_system(cube, index)
    for e in sorted(pinned):
        rows.append(1 << index[e])
        rhs.append(1 if pinned[e] == -1 else 0)
    sol, _ = solve_gf2(rows, rhs, len(index))
    if sol is None:
        raise ValueError("pinned signs admit no coherent completion")
    return _signs_from_bits(index, sol)


def fast_sign_assignment(cube: Cube) -> dict:
    """Coherent signs built by doubling one crossing at a time.

    Edges along the new direction all get +1 and each copied edge picks
    up the sign that closes its mixed face.  Faces inside the copied
    half then close themselves, because every 3-cube carries an even
    number of sign-reversing faces.  Linear in the number of faces, so
    it reaches cube sizes the elimination solver cannot.
    """
    eps: dict[tuple[int, int], int] = {}
    for k in range(cube.n):
        top = 1 << k
        for alpha in range(top):
            eps[alpha, k] = 1
        for alpha in range(top):
            for c in range(k):
                if alpha >> c & 1:
                    continue
                sigma = classify_face(cube, alpha, c, k).sigma
                eps[alpha | top, c] = -sigma * eps[alpha, c]
    return eps


def verify_sign_assignment(cube: Cube, eps: dict) -> bool:
    """Whether the signed paths around every face cancel."""
    for alpha, c1, c2 in cube.faces():
        prod = 1
        for e in face_edges(alpha, c1, c2):
            prod *= eps[e]
        if prod * classify_face(cube, alpha, c1, c2).sigma != -1:
            return False
    return True
