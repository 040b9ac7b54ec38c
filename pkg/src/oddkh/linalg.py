"""Exact linear algebra over the integers and over GF(2).

Everything downstream (differentials, homology, chain-map and homotopy
decisions) reduces to the four operations exported here.  Matrices are
sparse dictionaries of arbitrary-precision Python integers; there is no
floating point anywhere in this module.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "IntMatrix",
    "SnfResult",
    "smith_normal_form",
    "solve_integer",
    "integer_kernel",
    "integer_rank",
    "integer_inverse",
    "solve_gf2",
    "gf2_rank",
    "modp_rank",
]

# Toggled by the test suite; when set, every smith_normal_form call
# re-multiplies U*A*V and compares with D before returning.
VERIFY_SNF = False


class IntMatrix:
    """A sparse rows x cols integer matrix.

    Entries are stored in a dict keyed by (row, col); zeros are never
    stored.  Instances are treated as immutable by every public
    function in the package (internal algorithms copy the dict).
    """

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, entries: dict[tuple[int, int], int] | None = None):
        if rows < 0 or cols < 0:
            raise ValueError("negative dimensions")
        self.rows = rows
        self.cols = cols
        data: dict[tuple[int, int], int] = {}
        if entries:
            for (r, c), v in entries.items():
                if not (0 <= r < rows and 0 <= c < cols):
                    raise ValueError(f"entry ({r},{c}) out of range for {rows}x{cols}")
                if v:
                    data[(r, c)] = v
        self.data = data

    @classmethod
    def zero(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def from_rows(cls, rows_list: list[list[int]]) -> "IntMatrix":
        rows = len(rows_list)
        cols = len(rows_list[0]) if rows else 0
        entries = {}
        for i, row in enumerate(rows_list):
            if len(row) != cols:
                raise ValueError("ragged rows")
            for j, v in enumerate(row):
                if v:
                    entries[(i, j)] = v
        return cls(rows, cols, entries)

    def to_rows(self) -> list[list[int]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.data.items():
            out[r][c] = v
        return out

    def __getitem__(self, rc: tuple[int, int]) -> int:
        return self.data.get(rc, 0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.rows == other.rows and self.cols == other.cols and self.data == other.data

    def __hash__(self):
        raise TypeError("unhashable")

    def __repr__(self) -> str:
        return f"IntMatrix({self.rows}x{self.cols}, {len(self.data)} entries)"

    def is_zero(self) -> bool:
        return not self.data

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, {k: -v for k, v in self.data.items()})

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        data = dict(self.data)
        for k, v in other.data.items():
            w = data.get(k, 0) + v
            if w:
                data[k] = w
            else:
                data.pop(k, None)
        return IntMatrix(self.rows, self.cols, data)

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self + (-other)

    def scale(self, s: int) -> "IntMatrix":
        if s == 0:
            return IntMatrix.zero(self.rows, self.cols)
        return IntMatrix(self.rows, self.cols, {k: s * v for k, v in self.data.items()})

    def __mul__(self, other: "IntMatrix") -> "IntMatrix":
        """Matrix product self * other (self.cols must equal other.rows)."""
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} * {other.rows}x{other.cols}")
        # Row-index the right factor once; iterate left entries.
        right_rows: dict[int, list[tuple[int, int]]] = {}
        for (r, c), v in other.data.items():
            right_rows.setdefault(r, []).append((c, v))
        acc: dict[tuple[int, int], int] = {}
        for (r, k), v in self.data.items():
            hits = right_rows.get(k)
            if not hits:
                continue
            for c, w in hits:
                key = (r, c)
                s = acc.get(key, 0) + v * w
                if s:
                    acc[key] = s
                else:
                    acc.pop(key, None)
        return IntMatrix(self.rows, other.cols, acc)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows, {(c, r): v for (r, c), v in self.data.items()})

    def apply(self, vec: list[int]) -> list[int]:
        """self * vec for a dense column vector."""
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        out = [0] * self.rows
        for (r, c), v in self.data.items():
            x = vec[c]
            if x:
                out[r] += v * x
        return out

    def column(self, c: int) -> list[int]:
        out = [0] * self.rows
        for (r, cc), v in self.data.items():
            if cc == c:
                out[r] = v
        return out

    def submatrix(self, row_idx: list[int], col_idx: list[int]) -> "IntMatrix":
        rpos = {r: i for i, r in enumerate(row_idx)}
        cpos = {c: j for j, c in enumerate(col_idx)}
        entries = {}
        for (r, c), v in self.data.items():
            if r in rpos and c in cpos:
                entries[(rpos[r], cpos[c])] = v
        return IntMatrix(len(row_idx), len(col_idx), entries)


@dataclass(frozen=True)
class SnfResult:
    """Smith normal form U*A*V = D with U, V unimodular.

    ``diagonal`` lists the nonnegative elementary divisors d1 | d2 | ...
    including trailing zeros up to min(rows, cols).
    """

    D: IntMatrix
    U: IntMatrix
    V: IntMatrix
    diagonal: tuple[int, ...]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)

    def torsion(self) -> tuple[int, ...]:
        return tuple(d for d in self.diagonal if d not in (0, 1))


def smith_normal_form(A: IntMatrix) -> SnfResult:
    """Diagonalize A by unimodular row and column operations.

    Parameters
    ----------
    A : IntMatrix
        Any integer matrix, including empty ones.

    Returns
    -------
    SnfResult
        With U*A*V = D exactly, |det U| = |det V| = 1, and the diagonal
        of D a nonnegative divisibility chain.

    Notes
    -----
    Pivoting picks the entry of smallest absolute value, ties broken by
    lowest (row, col), which keeps the result deterministic and tames
    coefficient growth at this scale.
    """
    rows, cols = A.rows, A.cols
    a: dict[tuple[int, int], int] = dict(A.data)
    # Row and column index sets per line, for sparse pivot hunting.
    row_support: dict[int, set[int]] = {}
    col_support: dict[int, set[int]] = {}
    for (r, c) in a:
        row_support.setdefault(r, set()).add(c)
        col_support.setdefault(c, set()).add(r)

    u: dict[tuple[int, int], int] = {(i, i): 1 for i in range(rows)}
    v: dict[tuple[int, int], int] = {(j, j): 1 for j in range(cols)}

    def row_op(dst: int, src: int, m: int):
        # row dst += m * row src  (applied to a and u)
        if m == 0:
            return
        for c in list(row_support.get(src, ())):
            key = (dst, c)
            w = a.get(key, 0) + m * a[(src, c)]
            if w:
                if key not in a:
                    row_support.setdefault(dst, set()).add(c)
                    col_support.setdefault(c, set()).add(dst)
                a[key] = w
            elif key in a:
                del a[key]
                row_support[dst].discard(c)
                col_support[c].discard(dst)
        for c in range(rows):
            key = (dst, c)
            w = u.get(key, 0) + m * u.get((src, c), 0)
            if w:
                u[key] = w
            else:
                u.pop(key, None)

    def col_op(dst: int, src: int, m: int):
        if m == 0:
            return
        for r in list(col_support.get(src, ())):
            key = (r, dst)
            w = a.get(key, 0) + m * a[(r, src)]
            if w:
                if key not in a:
                    row_support.setdefault(r, set()).add(dst)
                    col_support.setdefault(dst, set()).add(r)
                a[key] = w
            elif key in a:
                del a[key]
                row_support[r].discard(dst)
                col_support[dst].discard(r)
        for r in range(cols):
            key = (r, dst)
            w = v.get(key, 0) + m * v.get((r, src), 0)
            if w:
                v[key] = w
            else:
                v.pop(key, None)

    def row_swap(i: int, j: int):
        if i == j:
            return
        ci, cj = row_support.get(i, set()), row_support.get(j, set())
        moved = {}
        for c in ci | cj:
            vi, vj = a.pop((i, c), 0), a.pop((j, c), 0)
            if vj:
                moved[(i, c)] = vj
            if vi:
                moved[(j, c)] = vi
            col_support[c].discard(i)
            col_support[c].discard(j)
        for (r, c), val in moved.items():
            a[(r, c)] = val
            col_support[c].add(r)
        row_support[i] = {c for (r, c) in moved if r == i}
        row_support[j] = {c for (r, c) in moved if r == j}
        for c in range(rows):
            u[(i, c)], u[(j, c)] = u.get((j, c), 0), u.get((i, c), 0)
            for k in ((i, c), (j, c)):
                if not u.get(k, 0):
                    u.pop(k, None)

    def col_swap(i: int, j: int):
        if i == j:
            return
        ri, rj = col_support.get(i, set()), col_support.get(j, set())
        moved = {}
        for r in ri | rj:
            vi, vj = a.pop((r, i), 0), a.pop((r, j), 0)
            if vj:
                moved[(r, i)] = vj
            if vi:
                moved[(r, j)] = vi
            row_support[r].discard(i)
            row_support[r].discard(j)
        for (r, c), val in moved.items():
            a[(r, c)] = val
            row_support[r].add(c)
        col_support[i] = {r for (r, c) in moved if c == i}
        col_support[j] = {r for (r, c) in moved if c == j}
        for r in range(cols):
            v[(r, i)], v[(r, j)] = v.get((r, j), 0), v.get((r, i), 0)
            for k in ((r, i), (r, j)):
                if not v.get(k, 0):
                    v.pop(k, None)

    def negate_row(i: int):
        for c in list(row_support.get(i, ())):
            a[(i, c)] = -a[(i, c)]
        for c in range(rows):
            if (i, c) in u:
                u[(i, c)] = -u[(i, c)]

    t = 0
    limit = min(rows, cols)
    while t < limit:
        # Smallest nonzero entry in the remaining block.
        pivot = None
        best = None
        for (r, c), val in a.items():
            if r < t or c < t:
                continue
            key = (abs(val), r, c)
            if best is None or key < best:
                best = key
                pivot = (r, c)
        if pivot is None:
            break
        pr, pc = pivot
        row_swap(t, pr)
        col_swap(t, pc)
        # Clear row and column t; restart if a reduction shrinks entries.
        while True:
            p = a[(t, t)]
            dirty = False
            for r in list(col_support.get(t, ())):
                if r == t:
                    continue
                q = a[(r, t)] // p
                row_op(r, t, -q)
                if (r, t) in a:
                    dirty = True
            for c in list(row_support.get(t, ())):
                if c == t:
                    continue
                q = a[(t, c)] // p
                col_op(c, t, -q)
                if (t, c) in a:
                    dirty = True
            if not dirty:
                break
            # A nonzero remainder survived; it is smaller than p, make it
            # the pivot and sweep again.
            small = None
            sbest = None
            for r in list(col_support.get(t, ())):
                if r != t and (r, t) in a:
                    k = (abs(a[(r, t)]), r)
                    if sbest is None or k < sbest:
                        sbest, small = k, ("r", r)
            for c in list(row_support.get(t, ())):
                if c != t and (t, c) in a:
                    k = (abs(a[(t, c)]), c)
                    if sbest is None or k < sbest:
                        sbest, small = k, ("c", c)
            if small is None:
                break
            kind, idx = small
            if kind == "r":
                row_swap(t, idx)
            else:
                col_swap(t, idx)
        if a[(t, t)] < 0:
            negate_row(t)
        t += 1

    # Enforce the divisibility chain d_i | d_{i+1}.  Rows and columns
    # i, i+1 are diagonal here, so each repair is a closed 2x2 problem.
    changed = True
    while changed:
        changed = False
        for i in range(limit - 1):
            di = a.get((i, i), 0)
            dj = a.get((i + 1, i + 1), 0)
            if di and dj and dj % di != 0:
                changed = True
                col_op(i, i + 1, 1)
                while a.get((i + 1, i), 0):
                    pii = a.get((i, i), 0)
                    pji = a[(i + 1, i)]
                    if pii == 0 or abs(pji) < abs(pii):
                        row_swap(i, i + 1)
                        continue
                    row_op(i + 1, i, -(pji // pii))
                pii = a[(i, i)]
                pic = a.get((i, i + 1), 0)
                if pic:
                    # pic is a multiple of dj, hence of the new pivot.
                    col_op(i + 1, i, -(pic // pii))
                if a.get((i, i), 0) < 0:
                    negate_row(i)
                if a.get((i + 1, i + 1), 0) < 0:
                    negate_row(i + 1)

    diagonal = tuple(a.get((i, i), 0) for i in range(limit))
    D = IntMatrix(rows, cols, {(i, i): d for i, d in enumerate(diagonal) if d})
    U = IntMatrix(rows, rows, u)
    V = IntMatrix(cols, cols, v)
    result = SnfResult(D=D, U=U, V=V, diagonal=diagonal)
    if VERIFY_SNF:
        if U * A * V != D:
            raise AssertionError("SNF verification failed: U*A*V != D")
    return result


def integer_rank(A: IntMatrix) -> int:
    """Rank of A over the rationals (equal to the rank over Z)."""
    return smith_normal_form(A).rank


def integer_inverse(A: IntMatrix) -> IntMatrix:
    """Inverse of a unimodular square matrix."""
    if A.rows != A.cols:
        raise ValueError("only square matrices can be inverted")
    snf = smith_normal_form(A)
    if any(d != 1 for d in snf.diagonal):
        raise ValueError("matrix is not unimodular")
    # U A V = I, so the inverse is V U.
    return snf.V * snf.U


def integer_kernel(A: IntMatrix, snf: SnfResult | None = None) -> list[list[int]]:
    """A basis of the integer kernel of A, as dense column vectors."""
    if snf is None:
        snf = smith_normal_form(A)
    basis = []
    for j in range(A.cols):
        d = snf.diagonal[j] if j < len(snf.diagonal) else 0
        if d == 0:
            basis.append(snf.V.column(j))
    return basis


def solve_integer(A: IntMatrix, b: list[int]) -> tuple[list[int] | None, list[list[int]]]:
    """Solve A x = b over the integers.

    Returns
    -------
    (solution, kernel_basis)
        ``solution`` is one integer solution or None when the system has
        no integral solution; ``kernel_basis`` is a basis of the integer
        kernel of A (returned in both cases).
    """
    if len(b) != A.rows:
        raise ValueError("right-hand side length mismatch")
    snf = smith_normal_form(A)
    kernel = integer_kernel(A, snf)
    ub = snf.U.apply(b)
    y = [0] * A.cols
    n = min(A.rows, A.cols)
    for i in range(A.rows):
        d = snf.diagonal[i] if i < n else 0
        rhs = ub[i]
        if d == 0:
            if rhs != 0:
                return None, kernel
        else:
            if rhs % d != 0:
                return None, kernel
            y[i] = rhs // d
    x = snf.V.apply(y)
    return x, kernel


def solve_gf2(rows: list[int], b: list[int], ncols: int) -> tuple[int | None, list[int]]:
    """Solve a GF(2) linear system given as bitmask rows.

    Parameters
    ----------
    rows : list[int]
        Each entry is a bitmask over ``ncols`` variables (bit j set means
        variable j appears in the equation).
    b : list[int]
        Right-hand side bits, one per row.
    ncols : int
        Number of variables.

    Returns
    -------
    (solution, nullspace_basis)
        ``solution`` is a bitmask assignment or None if inconsistent;
        ``nullspace_basis`` is a list of bitmasks spanning the solution
        space of the homogeneous system.
    """
    if len(rows) != len(b):
        raise ValueError("row/rhs length mismatch")
    # Echelon form driven by lowest set bits, augmented bit at ncols.
    varmask = (1 << ncols) - 1
    pivots: dict[int, int] = {}  # pivot column -> row whose lowest bit it is
    consistent = True
    for w in (r | (bb << ncols) for r, bb in zip(rows, b)):
        while True:
            low = w & varmask
            if low == 0:
                if w:
                    consistent = False
                break
            col = (low & -low).bit_length() - 1
            if col in pivots:
                w ^= pivots[col]
            else:
                pivots[col] = w
                break
    # Back-substitute to reduced form, highest pivot first.  A pivot row
    # processed later only ever gains free-column bits from this, so
    # stale scan bits are harmless: they fail the pivot test and skip.
    for col in sorted(pivots, reverse=True):
        w = pivots[col]
        scan = (w & varmask) ^ (1 << col)
        while scan:
            b2 = (scan & -scan).bit_length() - 1
            scan ^= 1 << b2
            if b2 in pivots:
                w ^= pivots[b2]
        pivots[col] = w
    nullspace = _gf2_nullspace(pivots, ncols)
    if not consistent:
        return None, nullspace
    sol = 0
    for col, w in pivots.items():
        if (w >> ncols) & 1:
            sol |= 1 << col
    return sol, nullspace


def _gf2_nullspace(pivots: dict[int, int], ncols: int) -> list[int]:
    free_cols = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free_cols:
        vec = 1 << f
        for col, w in pivots.items():
            if (w >> f) & 1:
                vec |= 1 << col
        basis.append(vec)
    return basis


def gf2_rank(rows: list[int]) -> int:
    """Rank of a GF(2) matrix given as bitmask rows."""
    pivots: dict[int, int] = {}
    for w in rows:
        while w:
            col = (w & -w).bit_length() - 1
            if col in pivots:
                w ^= pivots[col]
            else:
                pivots[col] = w
                break
    return len(pivots)


def modp_rank(A: IntMatrix, p: int) -> int:
    """Rank of A over the prime field GF(p)."""
    if p == 2:
        rows_mask: dict[int, int] = {}
        for (r, c), v in A.data.items():
            if v & 1:
                rows_mask[r] = rows_mask.get(r, 0) ^ (1 << c)
        return gf2_rank(list(rows_mask.values()))
    rows: dict[int, dict[int, int]] = {}
    for (r, c), v in A.data.items():
        w = v % p
        if w:
            rows.setdefault(r, {})[c] = w
    pivots: dict[int, dict[int, int]] = {}
    rank = 0
    for row in rows.values():
        row = dict(row)
        while row:
            col = min(row)
            if col in pivots:
                piv = pivots[col]
                factor = (row[col] * pow(piv[col], -1, p)) % p
                for c2, v2 in piv.items():
                    w = (row.get(c2, 0) - factor * v2) % p
                    if w:
                        row[c2] = w
                    else:
                        row.pop(c2, None)
            else:
                pivots[col] = row
                rank += 1
                break
    return rank
