"""The signed odd Khovanov complex and its homology.

Flattens a cube with a coherent edge-sign choice into bigraded chain
groups, computes integer homology blockwise through Smith normal form,
and carries the chain-map calculus: composition, comparison up to sign,
integral homotopy decision, and induced maps on homology presentations.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cube import Cube, solve_sign_assignment
from .linalg import (
    IntMatrix,
    integer_inverse,
    integer_kernel,
    integer_rank,
    modp_rank,
    smith_normal_form,
    solve_integer,
)

__all__ = [
    "ChainComplex",
    "BigradedHomology",
    "ChainMap",
    "HomologyPresentation",
    "assemble_complex",
    "verify_differential_squares",
    "homology",
    "homology_presentation",
    "graded_euler_characteristic",
    "reduce_coefficients",
    "identity_chain_map",
    "zero_chain_map",
    "is_chain_map",
    "compose",
    "equal_up_to_sign",
    "homotopic_up_to_sign",
    "induced_map_on_homology",
]


class ChainComplex:
    """Chain groups with labeled bases, one differential per degree.

    Basis elements are (vertex, monomial mask) pairs carrying a quantum
    degree; the differential raises homological degree by one and
    preserves quantum degree.
    """

    __slots__ = ("cube", "signs", "n_plus", "n_minus", "_basis", "_qdeg", "_index", "_diff", "_pres")

    def __init__(self, cube: Cube, signs: dict, basis: dict, qdeg: dict, diff: dict):
        self.cube = cube
        self.signs = signs
        self.n_plus = cube.diagram.n_plus
        self.n_minus = cube.diagram.n_minus
        self._basis = basis
        self._qdeg = qdeg
        self._index = {h: {g: i for i, g in enumerate(v)} for h, v in basis.items()}
        self._diff = diff
        self._pres: dict[tuple[int, int], HomologyPresentation] = {}

    def degrees(self) -> list[int]:
        return sorted(self._basis)

    def dim(self, h: int) -> int:
        return len(self._basis.get(h, ()))

    def basis(self, h: int) -> tuple:
        return self._basis.get(h, ())

    def quantum_degrees(self, h: int) -> tuple:
        return self._qdeg.get(h, ())

    def index(self, h: int, gen) -> int:
        return self._index[h][gen]

    def differential(self, h: int) -> IntMatrix:
        d = self._diff.get(h)
        if d is None:
            return IntMatrix.zero(self.dim(h + 1), self.dim(h))
        return d

    def gradings(self) -> list[tuple[int, int]]:
        out = set()
        for h, qs in self._qdeg.items():
            out.update((h, q) for q in qs)
        return sorted(out)

    def q_block(self, h: int, q: int) -> list[int]:
        return [i for i, qq in enumerate(self._qdeg.get(h, ())) if qq == q]

    def same_shape(self, other: "ChainComplex") -> bool:
        return self._basis == other._basis and self._qdeg == other._qdeg


def assemble_complex(cube: Cube, signs: dict | None = None) -> ChainComplex:
    """Flatten a cube along a coherent edge-sign choice.

    With no signs given the canonical assignment is used.  The result
    is validated: every differential entry must preserve quantum degree
    and d squared must vanish, so any face-classification or sign error
    surfaces here rather than in a homology answer.
    """
    if signs is None:
        signs = solve_sign_assignment(cube)
    nm = cube.diagram.n_minus
    shift_q = cube.diagram.n_plus - 2 * nm
    basis: dict[int, list] = {}
    qdeg: dict[int, list] = {}
    for alpha in cube.vertices():
        h = alpha.bit_count() - nm
        circles = cube.resolution(alpha).n_circles
        sub = cube.space(alpha).basis()
        basis.setdefault(h, []).extend((alpha, m) for m in sub)
        qdeg.setdefault(h, []).extend(
            circles - 2 * m.bit_count() + alpha.bit_count() + shift_q for m in sub
        )
    basis = {h: tuple(v) for h, v in basis.items()}
    qdeg = {h: tuple(v) for h, v in qdeg.items()}
    index = {h: {g: i for i, g in enumerate(v)} for h, v in basis.items()}
    diff = {}
    for h, gens in basis.items():
        if h + 1 not in basis:
            continue
        tgt = index[h + 1]
        entries = {}
        for j, (alpha, mask) in enumerate(gens):
            for c in range(cube.n):
                if alpha >> c & 1:
                    continue
                e = signs[alpha, c]
                beta = alpha | 1 << c
                for coeff, out in cube.edge_terms(alpha, c, mask):
                    entries[tgt[beta, out], j] = e * coeff
        diff[h] = IntMatrix(len(basis[h + 1]), len(gens), entries)
    cx = ChainComplex(cube, dict(signs), basis, qdeg, diff)
    _validate(cx)
    return cx


def _validate(c: ChainComplex) -> None:
    for h in c.degrees():
        d = c._diff.get(h)
        if d is None:
            continue
        qs = c.quantum_degrees(h)
        qt = c.quantum_degrees(h + 1)
        for i, j in d.data:
            if qt[i] != qs[j]:
                raise AssertionError("differential entry changes quantum degree")
        nxt = c._diff.get(h + 1)
        if nxt is not None and (nxt * d).data:
            raise AssertionError("d^2 != 0")


def verify_differential_squares(cube: Cube, eps: dict) -> bool:
    """Check d^2 = 0 monomial by monomial, without assembling matrices.

    Streams every face and every basis monomial at its base vertex, so
    memory stays flat on cubes too large to flatten.
    """
    for alpha, c1, c2 in cube.faces():
        s1 = eps[alpha, c1] * eps[alpha | 1 << c1, c2]
        s2 = eps[alpha, c2] * eps[alpha | 1 << c2, c1]
        for mask in range(cube.space(alpha).dim):
            acc: dict[int, int] = {}
            for first, second, s in ((c1, c2, s1), (c2, c1, s2)):
                mid = alpha | 1 << first
                for cm, m in cube.edge_terms(alpha, first, mask):
                    for co, out in cube.edge_terms(mid, second, m):
                        v = acc.get(out, 0) + s * cm * co
                        if v:
                            acc[out] = v
                        else:
                            del acc[out]
            if acc:
                return False
    return True


@dataclass(frozen=True)
class BigradedHomology:
    """Homology table mapping (h, q) to (free rank, invariant factors)."""

    table: dict

    def group(self, h: int, q: int) -> tuple:
        return self.table.get((h, q), (0, ()))

    def total_rank(self) -> int:
        return sum(r for r, _ in self.table.values())

    def to_rows(self) -> list[dict]:
        return [
            {"h": h, "q": q, "rank": r, "torsion": list(t)}
            for (h, q), (r, t) in sorted(self.table.items())
        ]


def _blocks(c: ChainComplex, h: int, q: int):
    cols = c.q_block(h, q)
    prev = c.q_block(h - 1, q)
    nxt = c.q_block(h + 1, q)
    incoming = c.differential(h - 1).submatrix(cols, prev)
    outgoing = c.differential(h).submatrix(nxt, cols)
    return cols, incoming, outgoing


def homology(c: ChainComplex) -> BigradedHomology:
    """Integer homology per bigrading.

    Free rank is dim ker minus the incoming rank; torsion is read off
    the Smith normal form of the incoming block, which is legitimate
    because the torsion of the incoming cokernel already lies in the
    kernel of the outgoing block.
    """
    table = {}
    for h, q in c.gradings():
        cols, incoming, outgoing = _blocks(c, h, q)
        snf_in = smith_normal_form(incoming)
        free = len(cols) - integer_rank(outgoing) - snf_in.rank
        torsion = tuple(abs(d) for d in snf_in.diagonal if abs(d) > 1)
        if free or torsion:
            table[h, q] = (free, torsion)
    return BigradedHomology(table)


def reduce_coefficients(c: ChainComplex, p: int) -> dict:
    """Dimensions of mod-p homology per (h, q)."""
    if p < 2 or any(p % k == 0 for k in range(2, int(p**0.5) + 1)):
        raise ValueError("p must be prime")
    out = {}
    for h, q in c.gradings():
        cols, incoming, outgoing = _blocks(c, h, q)
        dim = len(cols) - modp_rank(outgoing, p) - modp_rank(incoming, p)
        if dim:
            out[h, q] = dim
    return out


def graded_euler_characteristic(c: ChainComplex) -> dict:
    """Coefficient dict {q: int} of the graded Euler characteristic."""
    out: dict[int, int] = {}
    for h in c.degrees():
        s = -1 if h & 1 else 1
        for q in c.quantum_degrees(h):
            out[q] = out.get(q, 0) + s
    return {q: v for q, v in out.items() if v}


class ChainMap:
    """A degree-zero map between two complexes, one matrix per degree.

    `q_shift` is the uniform quantum shift of the map; construction
    checks every entry against it, so maps are homogeneous by fiat.
    """

    __slots__ = ("src", "dst", "q_shift", "blocks")

    def __init__(self, src: ChainComplex, dst: ChainComplex, blocks: dict, q_shift: int = 0):
        self.src = src
        self.dst = dst
        self.q_shift = q_shift
        kept = {}
        for h, m in blocks.items():
            if m.rows != dst.dim(h) or m.cols != src.dim(h):
                raise ValueError(f"block at degree {h} has the wrong shape")
            qs = src.quantum_degrees(h)
            qt = dst.quantum_degrees(h)
            for i, j in m.data:
                if qt[i] != qs[j] + q_shift:
                    raise ValueError("chain map entry breaks the quantum shift")
            if m.data:
                kept[h] = m
        self.blocks = kept

    def block(self, h: int) -> IntMatrix:
        b = self.blocks.get(h)
        if b is None:
            return IntMatrix.zero(self.dst.dim(h), self.src.dim(h))
        return b

    def __eq__(self, other):
        if not isinstance(other, ChainMap):
            return NotImplemented
        if self.q_shift != other.q_shift:
            return False
        hs = set(self.blocks) | set(other.blocks)
        return all(self.block(h) == other.block(h) for h in hs)

    __hash__ = None

    def scale(self, s: int) -> "ChainMap":
        return ChainMap(
            self.src, self.dst, {h: m.scale(s) for h, m in self.blocks.items()}, self.q_shift
        )

    def __add__(self, other: "ChainMap") -> "ChainMap":
        if self.q_shift != other.q_shift:
            raise ValueError("quantum shifts differ")
        hs = set(self.blocks) | set(other.blocks)
        return ChainMap(
            self.src, self.dst, {h: self.block(h) + other.block(h) for h in hs}, self.q_shift
        )

    def __sub__(self, other: "ChainMap") -> "ChainMap":
        return self + other.scale(-1)


def identity_chain_map(c: ChainComplex) -> ChainMap:
    return ChainMap(c, c, {h: IntMatrix.identity(c.dim(h)) for h in c.degrees()})


def zero_chain_map(src: ChainComplex, dst: ChainComplex, q_shift: int = 0) -> ChainMap:
    return ChainMap(src, dst, {}, q_shift)


def is_chain_map(f: ChainMap) -> bool:
    """Whether the blocks commute with both differentials."""
    for h in f.src.degrees():
        left = f.dst.differential(h) * f.block(h)
        right = f.block(h + 1) * f.src.differential(h)
        if left != right:
            return False
    return True


def compose(g: ChainMap, f: ChainMap) -> ChainMap:
    """g after f."""
    if not f.dst.same_shape(g.src):
        raise ValueError("middle complexes do not match")
    hs = set(f.blocks) | set(g.blocks)
    return ChainMap(
        f.src,
        g.dst,
        {h: g.block(h) * f.block(h) for h in hs},
        f.q_shift + g.q_shift,
    )


def _comparable(f: ChainMap, g: ChainMap) -> None:
    if f.q_shift != g.q_shift:
        raise ValueError("quantum shifts differ")
    if not (f.src.same_shape(g.src) and f.dst.same_shape(g.dst)):
        raise ValueError("complexes do not match")


def equal_up_to_sign(f: ChainMap, g: ChainMap):
    """The sign s with f = s*g, or None."""
    _comparable(f, g)
    for s in (1, -1):
        if all(f.block(h) == g.block(h).scale(s) for h in set(f.blocks) | set(g.blocks)):
            return s
    return None


def homotopic_up_to_sign(f: ChainMap, g: ChainMap):
    """Decide f - s*g = dH + Hd over the integers for s in {+1, -1}.

    Returns (s, H) with the witness H as a dict of degree -1 blocks, or
    (None, None).  The linear system is split by quantum degree, which
    the homotopy must respect along with the maps.
    """
    _comparable(f, g)
    src, dst, shift = f.src, f.dst, f.q_shift
    hs = sorted(set(src.degrees()) | {h + 1 for h in src.degrees()})
    var_index: dict[tuple[int, int, int], int] = {}
    for h in hs:
        qs = src.quantum_degrees(h)
        qt = dst.quantum_degrees(h - 1)
        for j, qj in enumerate(qs):
            for k, qk in enumerate(qt):
                if qk == qj + shift:
                    var_index[h, k, j] = len(var_index)
    rows_of: dict[tuple[int, int, int], int] = {}
    for h in src.degrees():
        qs = src.quantum_degrees(h)
        qt = dst.quantum_degrees(h)
        for j, qj in enumerate(qs):
            for i, qi in enumerate(qt):
                if qi == qj + shift:
                    rows_of[h, i, j] = len(rows_of)
    entries: dict[tuple[int, int], int] = {}
    for h in src.degrees():
        dd = dst.differential(h - 1)
        for (i, k), v in dd.data.items():
            for j in range(src.dim(h)):
                col = var_index.get((h, k, j))
                row = rows_of.get((h, i, j))
                if col is not None and row is not None:
                    entries[row, col] = entries.get((row, col), 0) + v
        ds = src.differential(h)
        for (m, j), v in ds.data.items():
            for i in range(dst.dim(h)):
                col = var_index.get((h + 1, i, m))
                row = rows_of.get((h, i, j))
                if col is not None and row is not None:
                    entries[row, col] = entries.get((row, col), 0) + v
    system = IntMatrix(len(rows_of), len(var_index), entries)
    for s in (1, -1):
        b = [0] * len(rows_of)
        ok = True
        for h in set(f.blocks) | set(g.blocks):
            delta = f.block(h) - g.block(h).scale(s)
            for (i, j), v in delta.data.items():
                row = rows_of.get((h, i, j))
                if row is None:
                    ok = False
                    break
                b[row] = v
            if not ok:
                break
        if not ok:
            continue
        sol, _ = solve_integer(system, b)
        if sol is None:
            continue
        witness: dict[int, dict] = {}
        for (h, k, j), col in var_index.items():
            if sol[col]:
                witness.setdefault(h, {})[k, j] = sol[col]
        H = {
            h: IntMatrix(dst.dim(h - 1), src.dim(h), data)
            for h, data in witness.items()
        }
        return s, H
    return None, None


class HomologyPresentation:
    """One (h, q) homology group with explicit cycle generators.

    `orders` holds the invariant factor for each torsion generator and
    0 for each free one; generators are dense vectors in the q-block's
    coordinates.
    """

    __slots__ = ("orders", "_kernel", "_umat", "_gens", "_keep")

    def __init__(self, incoming: IntMatrix, outgoing: IntMatrix):
        dim = outgoing.cols
        kernel = integer_kernel(outgoing)
        k = len(kernel)
        kmat = IntMatrix(dim, k, {
            (i, j): kernel[j][i] for j in range(k) for i in range(dim) if kernel[j][i]
        })
        relations = {}
        for j in range(incoming.cols):
            y, _ = solve_integer(kmat, incoming.column(j))
            if y is None:
                raise AssertionError("incoming image must land in the kernel")
            for i, v in enumerate(y):
                if v:
                    relations[i, j] = v
        snf = smith_normal_form(IntMatrix(k, incoming.cols, relations))
        full = [snf.diagonal[i] if i < len(snf.diagonal) else 0 for i in range(k)]
        uinv = integer_inverse(snf.U)
        keep = [i for i in range(k) if abs(full[i]) != 1]
        self.orders = tuple(abs(full[i]) for i in keep)
        self._kernel = kmat
        self._umat = snf.U
        self._gens = [kmat.apply(uinv.column(i)) for i in keep]
        self._keep = keep

    @property
    def rank(self) -> int:
        return sum(1 for d in self.orders if d == 0)

    @property
    def torsion(self) -> tuple:
        return tuple(d for d in self.orders if d)

    def generator(self, i: int) -> list[int]:
        return list(self._gens[i])

    def coords(self, vec: list[int]) -> list[int]:
        """Coordinates of a cycle over the retained generators."""
        y, _ = solve_integer(self._kernel, vec)
        if y is None:
            raise ValueError("vector is not a cycle in this block")
        w = self._umat.apply(y)
        return [w[p] % d if d else w[p] for p, d in zip(self._keep, self.orders)]


def homology_presentation(c: ChainComplex, h: int, q: int) -> HomologyPresentation:
    pres = c._pres.get((h, q))
    if pres is None:
        _, incoming, outgoing = _blocks(c, h, q)
        pres = HomologyPresentation(incoming, outgoing)
        c._pres[h, q] = pres
    return pres


def induced_map_on_homology(f: ChainMap) -> dict:
    """Matrices of the induced map, per bigrading, in presentation coordinates.

    Keys run over the source gradings with nonzero homology; torsion
    target coordinates are reduced into [0, order).
    """
    if not is_chain_map(f):
        raise ValueError("not a chain map")
    out = {}
    for h, q in f.src.gradings():
        ps = homology_presentation(f.src, h, q)
        if not ps.orders:
            continue
        pd = homology_presentation(f.dst, h, q + f.q_shift)
        block = f.block(h).submatrix(
            f.dst.q_block(h, q + f.q_shift), f.src.q_block(h, q)
        )
        entries = {}
        for j in range(len(ps.orders)):
            image = block.apply(ps.generator(j))
            for i, v in enumerate(pd.coords(image)):
                if v:
                    entries[i, j] = v
        out[h, q] = IntMatrix(len(pd.orders), len(ps.orders), entries)
    return out
