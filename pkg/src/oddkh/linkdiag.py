"""Planar diagram codes, oriented link diagrams, and their smoothings.

A crossing is a 4-tuple of arc labels listed counterclockwise starting
from the incoming understrand, so the understrand runs from slot 0 to
slot 2 and the overstrand occupies slots 1 and 3.  A crossing is
positive exactly when the overstrand enters at slot 3.

Orientations are not part of the input; they are reconstructed from the
understrand constraints, and crossing signs fall out of that.  Diagrams
may carry extra "formal" crossings (band sites produced by surgery)
which have no over/under data and are skipped by the orientation pass.
"""

from __future__ import annotations

__all__ = [
    "LinkDiagram",
    "Resolution",
    "parse_pd",
    "diagram_to_dict",
    "writhe",
    "resolve",
    "transit_side",
    "mirror",
    "insert_kink",
    "attach_band",
    "smooth_crossings",
    "add_free_circle",
    "delete_free_circle",
    "cable",
]


class LinkDiagram:
    """An oriented link diagram given by its crossing list.

    Parameters
    ----------
    crossings : sequence of 4-tuples of int
        Arc labels, counterclockwise from the incoming understrand.
    free_arcs : sequence of int
        Labels of crossingless unknot components, disjoint from the
        labels used in ``crossings``.
    signs : sequence of int, optional
        Expected crossing signs (+1, -1, and 0 at formal positions).
        When given they pin any components the understrand constraints
        leave free, and every inferable sign is checked against them.
    formal : collection of int
        Indices of crossings that are band sites rather than genuine
        crossings; these get sign 0 and impose no orientation
        constraints.
    """

    __slots__ = (
        "crossings",
        "free_arcs",
        "formal",
        "signs",
        "n",
        "arcs",
        "occurrences",
        "arc_dir",
        "components",
        "n_plus",
        "n_minus",
        "writhe",
    )

    def __init__(self, crossings, free_arcs=(), signs=None, formal=()):
        self.crossings = tuple(tuple(c) for c in crossings)
        self.free_arcs = tuple(sorted(free_arcs))
        self.formal = frozenset(formal)
        self.n = len(self.crossings)
        for c in self.crossings:
            if len(c) != 4 or not all(isinstance(a, int) for a in c):
                raise ValueError(f"crossing {c!r} is not a 4-tuple of ints")
        for i in self.formal:
            if not (0 <= i < self.n):
                raise ValueError(f"formal index {i} out of range")

        occurrences: dict[int, list[tuple[int, int]]] = {}
        for ci, cr in enumerate(self.crossings):
            for s, arc in enumerate(cr):
                occurrences.setdefault(arc, []).append((ci, s))
        for arc, occ in occurrences.items():
            if len(occ) != 2:
                raise ValueError(f"arc {arc} appears {len(occ)} times, expected 2")
        for arc in self.free_arcs:
            if arc in occurrences:
                raise ValueError(f"free arc {arc} also appears at a crossing")
        if len(set(self.free_arcs)) != len(self.free_arcs):
            raise ValueError("duplicate free arc label")
        self.occurrences = {a: tuple(sorted(o)) for a, o in occurrences.items()}
        self.arcs = tuple(sorted(occurrences)) + self.free_arcs

        given = None
        if signs is not None:
            given = tuple(signs)
            if len(given) != self.n:
                raise ValueError("signs length mismatch")
            for i, s in enumerate(given):
                want_formal = i in self.formal
                if want_formal and s != 0:
                    raise ValueError(f"formal crossing {i} must have sign 0")
                if not want_formal and s not in (1, -1):
                    raise ValueError(f"crossing {i} sign must be +1 or -1")

        self.arc_dir, inferred, self.components = self._orient(given)
        if given is not None:
            for i in range(self.n):
                if inferred[i] is not None and inferred[i] != given[i]:
                    raise ValueError(
                        f"crossing {i} has sign {inferred[i]}, {given[i]} was declared"
                    )
        for i in range(self.n):
            if inferred[i] is None:
                raise ValueError(
                    f"sign of crossing {i} is underdetermined; pass signs explicitly"
                )
        self.signs = tuple(inferred)
        self.n_plus = sum(1 for s in self.signs if s == 1)
        self.n_minus = sum(1 for s in self.signs if s == -1)
        self.writhe = self.n_plus - self.n_minus

    def slot_arc(self, c: int, s: int) -> int:
        return self.crossings[c][s]

    def max_arc(self) -> int:
        return max(self.arcs) if self.arcs else 0

    def _orient(self, given):
        """Walk strand components, fix directions, read off signs."""
        slot_arc = {}
        for ci, cr in enumerate(self.crossings):
            for s, arc in enumerate(cr):
                slot_arc[(ci, s)] = arc

        visited: set[int] = set()
        arc_dir: dict[int, tuple | None] = {}
        sign: list[int | None] = [0 if i in self.formal else None for i in range(self.n)]
        components: list[frozenset[int]] = []

        def other_occ(arc, occ):
            a, b = self.occurrences[arc]
            return b if occ == a else a

        def walk(start, closed):
            # Arc steps (arc, from_occ, to_occ); passage records (crossing,
            # entered_slot) at every real crossing the walk runs through.
            steps = []
            passages = []
            cur = start
            while True:
                arc = slot_arc[cur]
                visited.add(arc)
                nxt_occ = other_occ(arc, cur)
                steps.append((arc, cur, nxt_occ))
                ci = nxt_occ[0]
                if ci in self.formal:
                    return steps, passages
                passages.append((ci, nxt_occ[1]))
                out = (ci, nxt_occ[1] ^ 2)
                if closed and out == start:
                    return steps, passages
                cur = out

        def settle(steps, passages, closed):
            votes = set()
            for ci, s in passages:
                if s == 0:
                    votes.add(1)
                elif s == 2:
                    votes.add(-1)
            if len(votes) > 1:
                raise ValueError("inconsistent understrand directions")
            direction = votes.pop() if votes else None
            if direction is None and given is not None:
                pins = set()
                for ci, s in passages:
                    if s in (1, 3) and given[ci] in (1, -1):
                        flow_in = 3 if given[ci] == 1 else 1
                        pins.add(1 if s == flow_in else -1)
                if len(pins) > 1:
                    raise ValueError("declared signs conflict along a strand")
                if pins:
                    direction = pins.pop()
            if direction is None and closed:
                # Component never passes under anything: orient it so its
                # smallest arc flows out of its first listed occurrence.
                a0 = min(a for a, _, _ in steps)
                for a, frm, to in steps:
                    if a == a0:
                        direction = 1 if frm == min(frm, to) else -1
                        break
            for a, frm, to in steps:
                if direction == 1:
                    arc_dir[a] = (frm, to)
                elif direction == -1:
                    arc_dir[a] = (to, frm)
                else:
                    arc_dir[a] = None
            for ci, s in passages:
                if s in (1, 3) and direction is not None:
                    flow_in = s if direction == 1 else s ^ 2
                    sign[ci] = 1 if flow_in == 3 else -1
            components.append(frozenset(a for a, _, _ in steps))

        # Open paths first: they begin at the loose ends of band sites.
        for ci in sorted(self.formal):
            for s in range(4):
                arc = slot_arc[(ci, s)]
                if arc in visited:
                    continue
                steps, passages = walk((ci, s), closed=False)
                settle(steps, passages, closed=False)
        for arc in self.arcs:
            if arc in visited or arc in self.free_arcs:
                continue
            steps, passages = walk(self.occurrences[arc][0], closed=True)
            settle(steps, passages, closed=True)
        for arc in self.free_arcs:
            arc_dir[arc] = None
            components.append(frozenset([arc]))

        components.sort(key=min)
        return arc_dir, sign, tuple(components)

    def self_writhe(self, component: frozenset[int]) -> int:
        """Signed count of the crossings a component makes with itself."""
        total = 0
        for ci, cr in enumerate(self.crossings):
            if ci in self.formal:
                continue
            if cr[0] in component and cr[1] in component:
                total += self.signs[ci]
        return total

    def __eq__(self, other):
        if not isinstance(other, LinkDiagram):
            return NotImplemented
        return (
            self.crossings == other.crossings
            and self.free_arcs == other.free_arcs
            and self.formal == other.formal
            and self.signs == other.signs
        )

    def __hash__(self):
        return hash((self.crossings, self.free_arcs, self.formal, self.signs))

    def __repr__(self):
        extra = f", free={len(self.free_arcs)}" if self.free_arcs else ""
        return f"LinkDiagram({self.n} crossings{extra}, writhe {self.writhe})"


def parse_pd(data, signs=None, free_circles=0) -> LinkDiagram:
    """Build a diagram from a PD code.

    Accepts either a list of crossing 4-tuples or a dict with keys
    ``pd`` and optionally ``signs`` and ``free_circles``.  Free circles
    get fresh arc labels above everything used by the crossings.
    """
    if isinstance(data, dict):
        unknown = set(data) - {"pd", "signs", "free_circles"}
        if unknown:
            raise ValueError(f"unknown keys {sorted(unknown)}")
        pd = data["pd"]
        signs = data.get("signs", signs)
        free_circles = data.get("free_circles", free_circles)
    else:
        pd = data
    pd = [tuple(int(a) for a in row) for row in pd]
    top = max((a for row in pd for a in row), default=0)
    free = tuple(top + 1 + i for i in range(free_circles))
    return LinkDiagram(pd, free_arcs=free, signs=signs)


def diagram_to_dict(diagram: LinkDiagram) -> dict:
    out: dict = {"pd": [list(c) for c in diagram.crossings]}
    if any(diagram.signs):
        out["signs"] = list(diagram.signs)
    if diagram.free_arcs:
        out["free_circles"] = len(diagram.free_arcs)
    return out


def writhe(diagram: LinkDiagram) -> int:
    return diagram.writhe


class Resolution:
    """One complete smoothing of a diagram.

    Circles are walked starting from their smallest arc, in the arc's
    flow direction when it has one, so the walk order is deterministic.
    Each circle records its arcs in walk order and the transits it makes
    through crossings as (crossing, entry_slot, exit_slot) triples.
    """

    __slots__ = ("diagram", "alpha", "circles", "arc_circle", "slot_circle")

    def __init__(self, diagram, alpha, circles):
        self.diagram = diagram
        self.alpha = alpha
        self.circles = circles
        self.arc_circle = {}
        self.slot_circle = {}
        for idx, (arcs, dirs, transits) in enumerate(circles):
            for a in arcs:
                self.arc_circle[a] = idx
            for c, s_in, s_out in transits:
                self.slot_circle[(c, s_in)] = idx
                self.slot_circle[(c, s_out)] = idx

    @property
    def n_circles(self) -> int:
        return len(self.circles)

    def circle_arcs(self, idx: int) -> tuple:
        return self.circles[idx][0]

    def circle_transits(self, idx: int) -> tuple:
        return self.circles[idx][2]

    def circle_key(self, idx: int) -> int:
        return min(self.circles[idx][0])

    def __repr__(self):
        return f"Resolution(alpha={self.alpha:b}, circles={self.n_circles})"


def _smoothing_partner(bit: int, s: int) -> int:
    # 0-smoothing joins (0,1) and (2,3); 1-smoothing joins (0,3) and (1,2).
    if bit == 0:
        return s ^ 1
    return 3 - s


def resolve(diagram: LinkDiagram, alpha: int) -> Resolution:
    """Smooth every crossing of the diagram according to the bits of alpha."""
    if not 0 <= alpha < (1 << diagram.n):
        raise ValueError("alpha out of range")
    slot_arc = {}
    for ci, cr in enumerate(diagram.crossings):
        for s, arc in enumerate(cr):
            slot_arc[(ci, s)] = arc

    visited: set[int] = set()
    circles = []
    for start_arc in diagram.arcs:
        if start_arc in visited:
            continue
        if start_arc in diagram.free_arcs:
            visited.add(start_arc)
            circles.append(((start_arc,), (True,), ()))
            continue
        d = diagram.arc_dir[start_arc]
        if d is not None:
            cur = d[0]
        else:
            cur = diagram.occurrences[start_arc][0]
        start = cur
        arcs, dirs, transits = [], [], []
        while True:
            arc = slot_arc[cur]
            visited.add(arc)
            occ_a, occ_b = diagram.occurrences[arc]
            nxt_occ = occ_b if cur == occ_a else occ_a
            ad = diagram.arc_dir[arc]
            arcs.append(arc)
            dirs.append(ad is None or ad[0] == cur)
            ci, s_in = nxt_occ
            bit = (alpha >> ci) & 1
            s_out = _smoothing_partner(bit, s_in)
            transits.append((ci, s_in, s_out))
            out = (ci, s_out)
            if out == start:
                break
            cur = out
        circles.append((tuple(arcs), tuple(dirs), tuple(transits)))
    circles.sort(key=lambda c: min(c[0]))
    return Resolution(diagram, alpha, circles)


def transit_side(transit) -> int:
    """Which side of a transit the crossing center lies on.

    Walking a circle through a crossing, the smoothing strand turns
    around the crossing center; the center sits to the left of the walk
    (+1) exactly when the exit slot is the entry slot plus one mod 4.
    """
    _, s_in, s_out = transit
    if s_out == (s_in + 1) % 4:
        return 1
    if s_in == (s_out + 1) % 4:
        return -1
    raise ValueError(f"slots {s_in},{s_out} are not a smoothing pair")


def mirror(diagram: LinkDiagram) -> LinkDiagram:
    """Swap every crossing's over and under strands in place.

    Each tuple is rotated to start at its over-entry slot, which becomes
    the new under-entry; arc flows are untouched, all signs flip.
    """
    if diagram.formal:
        raise ValueError("cannot mirror a diagram with band sites")
    out = []
    for cr, sg in zip(diagram.crossings, diagram.signs):
        k = 3 if sg == 1 else 1
        out.append(cr[k:] + cr[:k])
    return LinkDiagram(
        out,
        free_arcs=diagram.free_arcs,
        signs=tuple(-s for s in diagram.signs),
    )


def _cut_arc(diagram: LinkDiagram, arc: int, new_id: int):
    """Split an arc at a point; the tail half keeps the old label.

    Returns the updated crossing list.  The caller owns free-arc
    bookkeeping; cutting a free arc is not meaningful here.
    """
    d = diagram.arc_dir[arc]
    if d is None:
        raise ValueError(f"arc {arc} has no direction")
    head = d[1]
    rows = [list(c) for c in diagram.crossings]
    rows[head[0]][head[1]] = new_id
    return [tuple(r) for r in rows]


def insert_kink(diagram: LinkDiagram, arc: int, sign: int) -> LinkDiagram:
    """Add a curl of the given sign on an arc (one Reidemeister 1 move).

    The strand passes over itself; the curl circle appears in the
    0-smoothing of the new crossing when the sign is positive and in the
    1-smoothing when negative.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if diagram.formal:
        raise ValueError("cannot add a kink to a diagram with band sites")
    top = diagram.max_arc()
    loop = top + 2
    free = diagram.free_arcs
    if arc in free:
        rows = [tuple(c) for c in diagram.crossings]
        free = tuple(a for a in free if a != arc)
        a_in = a_out = arc
    else:
        a_in, a_out = arc, top + 1
        rows = _cut_arc(diagram, arc, a_out)
    if sign == 1:
        kink = (a_in, a_out, loop, loop)
    else:
        kink = (a_in, loop, loop, a_out)
    return LinkDiagram(
        rows + [kink],
        free_arcs=free,
        signs=diagram.signs + (sign,),
    )


def attach_band(diagram: LinkDiagram, arc1: int, arc2: int):
    """Append a formal band site joining two arcs (or one arc to itself).

    Returns (enlarged diagram, index of the new site).  The 0-smoothing
    of the site restores the original diagram; the 1-smoothing performs
    the band surgery.
    """
    top = diagram.max_arc()
    free = list(diagram.free_arcs)
    rows = [tuple(c) for c in diagram.crossings]
    if arc1 == arc2:
        if arc1 in free:
            # Pinching a free circle: two halves, welded on both sides.
            p, q = arc1, top + 1
            free.remove(arc1)
            site = (p, q, q, p)
        else:
            # Two cuts make tail, middle, head pieces; the middle piece
            # lives entirely at the band site.
            p2, p3 = top + 1, top + 2
            rows = _cut_arc(diagram, arc1, p3)
            site = (arc1, p2, p2, p3)
    else:
        halves = []
        for arc in (arc1, arc2):
            if arc in free:
                free.remove(arc)
                halves.append((arc, arc))
            else:
                top += 1
                hd = diagram.arc_dir[arc]
                if hd is None:
                    raise ValueError(f"arc {arc} has no direction")
                rl = [list(c) for c in rows]
                rl[hd[1][0]][hd[1][1]] = top
                rows = [tuple(r) for r in rl]
                halves.append((arc, top))
        (a1i, a1o), (a2i, a2o) = halves
        site = (a1i, a1o, a2i, a2o)
    idx = len(rows)
    signs = diagram.signs + (0,)
    return (
        LinkDiagram(
            rows + [site],
            free_arcs=tuple(free),
            signs=signs,
            formal=diagram.formal | {idx},
        ),
        idx,
    )


def smooth_crossings(diagram: LinkDiagram, choices: dict[int, int]) -> LinkDiagram:
    """Delete crossings, welding their arcs according to the chosen bits.

    A weld that closes an arc onto itself turns it into a free circle.
    Remaining crossings keep their order; indices shift down past the
    deleted ones.
    """
    for c, bit in choices.items():
        if not 0 <= c < diagram.n:
            raise ValueError(f"crossing {c} out of range")
        if bit not in (0, 1):
            raise ValueError("smoothing bit must be 0 or 1")
    # Union-find over arc labels; welds may chain through several sites.
    parent: dict[int, int] = {}

    def find(a):
        while parent.get(a, a) != a:
            parent[a] = parent.get(parent[a], parent[a])
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            # Keep the smaller label.
            lo, hi = min(ra, rb), max(ra, rb)
            parent[hi] = lo

    closed = []
    for c, bit in choices.items():
        cr = diagram.crossings[c]
        for s in (0, 2) if bit == 0 else (0, 1):
            t = _smoothing_partner(bit, s)
            if find(cr[s]) == find(cr[t]):
                closed.append(find(cr[s]))
            else:
                union(cr[s], cr[t])

    rows = []
    signs = []
    formal = set()
    for ci, cr in enumerate(diagram.crossings):
        if ci in choices:
            continue
        if ci in diagram.formal:
            formal.add(len(rows))
        signs.append(diagram.signs[ci])
        rows.append(tuple(find(a) for a in cr))
    used = {a for r in rows for a in r}
    free = set(diagram.free_arcs)
    for a in closed:
        r = find(a)
        if r not in used:
            free.add(r)
    # A welded chain with no remaining occurrences and no closure stays a
    # path only if it ended at a deleted slot, which cannot happen: every
    # weld consumes two slots of a deleted crossing in matched pairs.
    return LinkDiagram(rows, free_arcs=tuple(sorted(free)), signs=tuple(signs), formal=formal)


def add_free_circle(diagram: LinkDiagram):
    """Disjoint union with an unknot circle; returns (diagram, its arc)."""
    arc = diagram.max_arc() + 1
    return (
        LinkDiagram(
            diagram.crossings,
            free_arcs=diagram.free_arcs + (arc,),
            signs=diagram.signs,
            formal=diagram.formal,
        ),
        arc,
    )


def delete_free_circle(diagram: LinkDiagram, arc: int) -> LinkDiagram:
    if arc not in diagram.free_arcs:
        raise ValueError(f"{arc} is not a free circle")
    return LinkDiagram(
        diagram.crossings,
        free_arcs=tuple(a for a in diagram.free_arcs if a != arc),
        signs=diagram.signs,
        formal=diagram.formal,
    )


def cable(diagram: LinkDiagram, strands: int, framing=None) -> LinkDiagram:
    """Replace every component by ``strands`` parallel copies.

    Copies are numbered left to right facing along the flow.  With
    ``framing`` None the blackboard framing is used (no twist regions);
    an int or a per-component list inserts full twists to correct each
    component from its self-writhe to the requested framing.
    """
    if strands < 1:
        raise ValueError("strands must be positive")
    if diagram.formal:
        raise ValueError("cannot cable a diagram with band sites")
    n = strands
    comps = diagram.components
    if framing is None:
        targets = None
    elif isinstance(framing, int):
        targets = [framing] * len(comps)
    else:
        targets = list(framing)
        if len(targets) != len(comps):
            raise ValueError("framing list length must match component count")

    sym_rows: list[tuple] = []
    sym_signs: list[int] = []

    def lane(arc, i):
        return ("lane", arc, i)

    for ci, cr in enumerate(diagram.crossings):
        a, b, c_, d = cr
        sg = diagram.signs[ci]
        # useg(i, j): segment of under-lane i after meeting over-lane at
        # grid column j; oseg(i, j): segment of over-lane j after meeting
        # under-lane i.
        def useg(i, j):
            return ("useg", ci, i, j)

        def oseg(i, j):
            return ("oseg", ci, i, j)

        if sg == 1:
            # Under lane i sweeps over-lanes j = n..1; over lane j sweeps
            # under lanes i = 1..n.
            for i in range(1, n + 1):
                for j in range(1, n + 1):
                    u_in = lane(a, i) if j == n else useg(i, j)
                    u_out = lane(c_, i) if j == 1 else useg(i, j - 1)
                    o_in = lane(d, j) if i == 1 else oseg(i - 1, j)
                    o_out = lane(b, j) if i == n else oseg(i, j)
                    sym_rows.append((u_in, o_out, u_out, o_in))
                    sym_signs.append(1)
        else:
            # Under lane i sweeps j = 1..n; over lane j sweeps i = n..1.
            for i in range(1, n + 1):
                for j in range(1, n + 1):
                    u_in = lane(a, i) if j == 1 else useg(i, j - 1)
                    u_out = lane(c_, i) if j == n else useg(i, j)
                    o_in = lane(b, j) if i == n else oseg(i, j)
                    o_out = lane(d, j) if i == 1 else oseg(i - 1, j)
                    sym_rows.append((u_in, o_in, u_out, o_out))
                    sym_signs.append(-1)

    sym_free: list[tuple] = []
    for arc in diagram.free_arcs:
        for i in range(1, n + 1):
            sym_free.append(lane(arc, i))

    if targets is not None:
        for k, comp in enumerate(comps):
            t = targets[k] - diagram.self_writhe(comp)
            if t == 0 or n < 2:
                continue
            a0 = min(comp)
            starts = [lane(a0, i) for i in range(1, n + 1)]
            if a0 in diagram.free_arcs:
                ends = list(starts)
                for s in starts:
                    sym_free.remove(s)
            else:
                # Cut each lane of a0 at its head side.
                ends = [("twend", k, i) for i in range(1, n + 1)]
                for i in range(1, n + 1):
                    old, new = starts[i - 1], ends[i - 1]
                    # The head occurrence is wherever the lane arc feeds a
                    # grid column, found by direct substitution of one of
                    # its two occurrences: replace the occurrence playing
                    # the "incoming" role.
                    done = False
                    for ri, row in enumerate(sym_rows):
                        sg = sym_signs[ri]
                        in_slots = (0, 3) if sg == 1 else (0, 1)
                        for s in in_slots:
                            if row[s] == old and not done:
                                r = list(row)
                                r[s] = new
                                sym_rows[ri] = tuple(r)
                                done = True
                    if not done:
                        raise AssertionError("lane head not found")
            word = []
            if t > 0:
                for _ in range(n * t):
                    word.extend((kk, 1) for kk in range(1, n))
            else:
                for _ in range(n * (-t)):
                    word.extend((kk, -1) for kk in range(n - 1, 0, -1))
            cur = list(starts)
            for step, (kk, sg) in enumerate(word):
                lo = ("tw", k, step, "l")
                ro = ("tw", k, step, "r")
                left, right = cur[kk - 1], cur[kk]
                if sg == 1:
                    sym_rows.append((right, lo, ro, left))
                else:
                    sym_rows.append((left, right, lo, ro))
                sym_signs.append(sg)
                # Strands swap positions; the left strand's continuation is
                # ro (it crossed to the right) and vice versa.
                cur[kk - 1], cur[kk] = ro, lo
            sub = dict(zip(cur, ends))
            sym_rows = [tuple(sub.get(x, x) for x in row) for row in sym_rows]

    labels = sorted(set(x for row in sym_rows for x in row) | set(sym_free))
    num = {lab: i + 1 for i, lab in enumerate(labels)}
    rows = [tuple(num[x] for x in row) for row in sym_rows]
    free = tuple(sorted(num[x] for x in sym_free))
    return LinkDiagram(rows, free_arcs=free, signs=tuple(sym_signs))
