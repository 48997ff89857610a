"""Exact sparse/dense linear algebra: F_q rank and kernels, GF(2)
bitmask elimination, integer Smith normal form, and homology of
complexes of finitely presented abelian groups.

Matrices act on column vectors: an r x c matrix is a map Z^c -> Z^r.
All integer work is exact big-integer arithmetic; p-local questions are
answered through Smith forms and valuations, never floating point.
"""

from __future__ import annotations

from math import gcd


class DimensionMismatch(ValueError):
    pass


class SparseMatrix:
    """Immutable sparse matrix: entries maps (row, col) to a nonzero value."""

    def __init__(self, rows, cols, entries):
        self.rows = rows
        self.cols = cols
        clean = {}
        for (r, c), v in entries.items():
            if not (0 <= r < rows and 0 <= c < cols):
                raise DimensionMismatch(
                    f"entry ({r},{c}) outside declared {rows}x{cols} shape")
            if v != 0 and v != () and v is not None:
                clean[(r, c)] = v
        self.entries = clean

    @classmethod
    def from_rows(cls, dense):
        rows = len(dense)
        cols = len(dense[0]) if rows else 0
        entries = {}
        for i, row in enumerate(dense):
            if len(row) != cols:
                raise DimensionMismatch("ragged rows")
            for j, v in enumerate(row):
                if v:
                    entries[(i, j)] = v
        return cls(rows, cols, entries)

    def to_dense(self, zero=0):
        out = [[zero] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def __repr__(self):
        return f"SparseMatrix({self.rows}x{self.cols}, {len(self.entries)} entries)"


# ---------------------------------------------------------------------------
# GF(2) bitmask elimination.  A "row" is a Python int whose bit j is the
# entry in column j; XOR is row addition.
# ---------------------------------------------------------------------------

class GF2RowSpace:
    """Incremental echelon form over GF(2) with combination tags.

    insert() adds a row (tracking the tag of how it was built);
    reduce() expresses a vector against the current space.
    """

    def __init__(self):
        self.pivots = {}  # pivot column -> (row, tag)

    def reduce(self, row, tag=0):
        while row:
            p = row.bit_length() - 1
            hit = self.pivots.get(p)
            if hit is None:
                return row, tag
            row ^= hit[0]
            tag ^= hit[1]
        return 0, tag

    def insert(self, row, tag=0):
        """Insert a row; returns (residual, tag) after reduction.

        Residual 0 means the row was already in the span.
        """
        row, tag = self.reduce(row, tag)
        if row:
            self.pivots[row.bit_length() - 1] = (row, tag)
        return row, tag

    def contains(self, row):
        return self.reduce(row)[0] == 0

    @property
    def rank(self):
        return len(self.pivots)


def gf2_rank(rows):
    space = GF2RowSpace()
    for r in rows:
        space.insert(r)
    return space.rank


def gf2_left_kernel(rows):
    """Kernel of i -> rows[i]: bitmasks over row indices summing to zero."""
    space = GF2RowSpace()
    kernel = []
    for i, r in enumerate(rows):
        residual, tag = space.insert(r, 1 << i)
        if residual == 0:
            kernel.append(tag)
    return kernel


def gf2_solve(rows, target):
    """Combination bitmask x with XOR_{i in x} rows[i] == target, or None."""
    space = GF2RowSpace()
    for i, r in enumerate(rows):
        space.insert(r, 1 << i)
    residual, tag = space.reduce(target)
    return tag if residual == 0 else None


# ---------------------------------------------------------------------------
# Dense elimination over an arbitrary field ring (vectors are lists).
# ---------------------------------------------------------------------------

class FieldRowSpace:
    """Echelon row space over a field Ring, with combination tags."""

    def __init__(self, field, width):
        self.field = field
        self.width = width
        self.pivots = {}  # pivot col -> (row list, tag dict)

    def reduce(self, row, tag=None):
        F = self.field
        row = list(row)
        tag = dict(tag or {})
        for j in range(self.width):
            if F.is_zero(row[j]):
                continue
            hit = self.pivots.get(j)
            if hit is None:
                continue
            prow, ptag = hit
            c = row[j]
            for k in range(j, self.width):
                if not F.is_zero(prow[k]):
                    row[k] = F.sub(row[k], F.mul(c, prow[k]))
            for key, v in ptag.items():
                tag[key] = F.sub(tag.get(key, F.zero()), F.mul(c, v))
                if F.is_zero(tag[key]):
                    del tag[key]
        return row, tag

    def leading(self, row):
        F = self.field
        for j in range(self.width):
            if not F.is_zero(row[j]):
                return j
        return None

    def insert(self, row, tag=None):
        F = self.field
        row, tag = self.reduce(row, tag)
        j = self.leading(row)
        if j is None:
            return None, tag
        inv = F.inv(row[j])
        row = [F.mul(inv, x) for x in row]
        tag = {k: F.mul(inv, v) for k, v in tag.items()}
        self.pivots[j] = (row, tag)
        return j, tag

    def contains(self, row):
        reduced, _ = self.reduce(row)
        return self.leading(reduced) is None

    @property
    def rank(self):
        return len(self.pivots)


def field_rank_kernel(rows, ncols, field):
    """(rank, left-kernel basis) of the map i -> rows[i] over a field."""
    space = FieldRowSpace(field, ncols)
    kernel = []
    for i, row in enumerate(rows):
        j, tag = space.insert(row, {i: field.one()})
        if j is None:
            tag[i] = field.one()
            kernel.append(tag)
    return space.rank, kernel


def fp_rank_kernel(M, field):
    """Rank and right-kernel basis of a SparseMatrix over a finite field.

    Returns (rank, basis) where each basis vector v (a list of field
    elements, length M.cols) satisfies M v = 0; rank + len(basis) == cols.
    """
    # Work with columns as "rows" so the left-kernel machinery yields M v = 0.
    cols = [[field.zero()] * M.rows for _ in range(M.cols)]
    for (r, c), v in M.entries.items():
        cols[c][r] = v
    if getattr(field, "q", None) == 2 or getattr(field, "m", None) == 2:
        bit_cols = []
        for col in cols:
            row = 0
            for i, v in enumerate(col):
                if v % 2:
                    row |= 1 << i
            bit_cols.append(row)
        kernel_tags = gf2_left_kernel(bit_cols)
        basis = []
        for tag in kernel_tags:
            basis.append([1 if tag >> j & 1 else 0 for j in range(M.cols)])
        return M.cols - len(basis), basis
    rank, kernel = field_rank_kernel(cols, M.rows, field)
    basis = []
    for tag in kernel:
        basis.append([tag.get(j, field.zero()) for j in range(M.cols)])
    return rank, basis


# ---------------------------------------------------------------------------
# Integer Smith normal form.
# ---------------------------------------------------------------------------

def _xgcd(a, b):
    x, nx, y, ny, g, ng = 1, 0, 0, 1, a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    if g < 0:
        x, y, g = -x, -y, -g
    return g, x, y


class SmithForm:
    """U * A * V == diag(factors) with U, V unimodular.

    factors carries the full diagonal of nonzero invariant factors,
    d_1 | d_2 | ... ; rank == len(factors).
    """

    def __init__(self, factors, U, V, rows, cols):
        self.factors = factors
        self.U = U
        self.V = V
        self.rows = rows
        self.cols = cols

    @property
    def rank(self):
        return len(self.factors)

    def kernel_basis(self):
        """Columns of V spanning ker(A) as a saturated sublattice."""
        r = self.rank
        return [[self.V[i][j] for i in range(self.cols)]
                for j in range(r, self.cols)]

    def cokernel(self):
        """(torsion orders > 1, free rank) of Z^rows / col-span(A)."""
        torsion = [d for d in self.factors if d > 1]
        return torsion, self.rows - self.rank


def smith_normal_form(M):
    """Smith normal form of an integer matrix (SparseMatrix or dense rows)."""
    if isinstance(M, SparseMatrix):
        A = M.to_dense()
        rows, cols = M.rows, M.cols
    else:
        A = [list(r) for r in M]
        rows = len(A)
        cols = len(A[0]) if rows else 0
    U = [[int(i == j) for j in range(rows)] for i in range(rows)]
    V = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def row_op(i1, i2, j0):
        a, b = A[i1][j0], A[i2][j0]
        if b == 0:
            return
        if a != 0 and b % a == 0:
            q = b // a
            for j in range(cols):
                A[i2][j] -= q * A[i1][j]
            for j in range(rows):
                U[i2][j] -= q * U[i1][j]
            return
        g, x, y = _xgcd(a, b)
        ag, bg = a // g, b // g
        for j in range(cols):
            r1, r2 = A[i1][j], A[i2][j]
            A[i1][j] = x * r1 + y * r2
            A[i2][j] = -bg * r1 + ag * r2
        for j in range(rows):
            r1, r2 = U[i1][j], U[i2][j]
            U[i1][j] = x * r1 + y * r2
            U[i2][j] = -bg * r1 + ag * r2

    def col_op(j1, j2, i0):
        a, b = A[i0][j1], A[i0][j2]
        if b == 0:
            return
        if a != 0 and b % a == 0:
            q = b // a
            for i in range(rows):
                A[i][j2] -= q * A[i][j1]
            for i in range(cols):
                V[i][j2] -= q * V[i][j1]
            return
        g, x, y = _xgcd(a, b)
        ag, bg = a // g, b // g
        for i in range(rows):
            c1, c2 = A[i][j1], A[i][j2]
            A[i][j1] = x * c1 + y * c2
            A[i][j2] = -bg * c1 + ag * c2
        for i in range(cols):
            c1, c2 = V[i][j1], V[i][j2]
            V[i][j1] = x * c1 + y * c2
            V[i][j2] = -bg * c1 + ag * c2

    n = min(rows, cols)
    for k in range(n):
        # choose the smallest-magnitude nonzero pivot in the trailing block
        pivot = None
        best = None
        for i in range(k, rows):
            for j in range(k, cols):
                v = abs(A[i][j])
                if v and (best is None or v < best):
                    best = v
                    pivot = (i, j)
                    if v == 1:
                        break
            if best == 1:
                break
        if pivot is None:
            break
        pi, pj = pivot
        if pi != k:
            A[k], A[pi] = A[pi], A[k]
            U[k], U[pi] = U[pi], U[k]
        if pj != k:
            for i in range(rows):
                A[i][k], A[i][pj] = A[i][pj], A[i][k]
            for i in range(cols):
                V[i][k], V[i][pj] = V[i][pj], V[i][k]
        while True:
            for i in range(k + 1, rows):
                row_op(k, i, k)
            if all(A[k][j] == 0 for j in range(k + 1, cols)):
                if all(A[i][k] == 0 for i in range(k + 1, rows)):
                    break
                continue
            for j in range(k + 1, cols):
                col_op(k, j, k)
            if all(A[i][k] == 0 for i in range(k + 1, rows)):
                if all(A[k][j] == 0 for j in range(k + 1, cols)):
                    break

    # collect the diagonal, push zeros to the end
    diag = [A[i][i] for i in range(n)]
    order = sorted(range(n), key=lambda i: diag[i] == 0)
    if order != list(range(n)):
        Ap = [[0] * cols for _ in range(rows)]
        for new_i, old_i in enumerate(order):
            Ap[new_i][new_i] = diag[old_i]
        perm_rows = list(order) + list(range(n, rows))
        U = [U[i] for i in perm_rows]
        newV = [[0] * cols for _ in range(cols)]
        perm_cols = list(order) + list(range(n, cols))
        for new_j, old_j in enumerate(perm_cols):
            for i in range(cols):
                newV[i][new_j] = V[i][old_j]
        V = newV
        A = Ap
        diag = [A[i][i] for i in range(n)]

    # enforce the divisibility chain d_i | d_{i+1}
    r = sum(1 for d in diag if d != 0)

    def fix_sign(i):
        if A[i][i] < 0:
            for j in range(cols):
                A[i][j] = -A[i][j]
            for j in range(rows):
                U[i][j] = -U[i][j]

    for i in range(r):
        fix_sign(i)
    changed = True
    while changed:
        changed = False
        for i in range(r - 1):
            a, b = A[i][i], A[i + 1][i + 1]
            if b % a != 0:
                changed = True
                # col_i += col_{i+1}; then clear the 2x2 block again
                for t in range(rows):
                    A[t][i] += A[t][i + 1]
                for t in range(cols):
                    V[t][i] += V[t][i + 1]
                while True:
                    for ii in range(i + 1, rows):
                        row_op(i, ii, i)
                    if all(A[i][jj] == 0 for jj in range(i + 1, cols)):
                        break
                    for jj in range(i + 1, cols):
                        col_op(i, jj, i)
                    if all(A[t][i] == 0 for t in range(i + 1, rows)):
                        break
                fix_sign(i)
                fix_sign(i + 1)
    factors = [A[i][i] for i in range(r)]
    return SmithForm(factors, U, V, rows, cols)


def integer_kernel(M):
    """Basis of the right kernel {x : Mx = 0} of an integer matrix."""
    return smith_normal_form(M).kernel_basis()


def integer_solve(snf, b):
    """Solve A x = b given the SmithForm of A; None if unsolvable."""
    rows, cols = snf.rows, snf.cols
    ub = [sum(snf.U[i][j] * b[j] for j in range(rows)) for i in range(rows)]
    y = [0] * cols
    for i in range(rows):
        if i < snf.rank:
            d = snf.factors[i]
            if ub[i] % d != 0:
                return None
            y[i] = ub[i] // d
        elif ub[i] != 0:
            return None
    return [sum(snf.V[i][j] * y[j] for j in range(cols)) for i in range(cols)]


def cokernel_structure(M, nrows=None):
    """Structure of Z^rows / column-span(M): (torsion orders > 1, free rank)."""
    if isinstance(M, SparseMatrix):
        snf = smith_normal_form(M)
        return snf.cokernel()
    rows = len(M) if nrows is None else nrows
    if not M or not M[0]:
        return [], rows
    snf = smith_normal_form(M)
    return snf.cokernel()


def lattice_column_basis(G):
    """Basis (list of columns) of the lattice spanned by the columns of G."""
    rows = len(G)
    cols = len(G[0]) if rows else 0
    if cols == 0:
        return []
    snf = smith_normal_form(G)
    # G = U^-1 D V^-1; column span has basis d_i * (U^-1 e_i).
    Uinv = _invert_unimodular(snf.U)
    basis = []
    for i in range(snf.rank):
        d = snf.factors[i]
        basis.append([d * Uinv[t][i] for t in range(rows)])
    return basis


def _invert_unimodular(U):
    from fractions import Fraction

    n = len(U)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(U)]
    for k in range(n):
        piv = next(i for i in range(k, n) if A[i][k] != 0)
        A[k], A[piv] = A[piv], A[k]
        inv = 1 / A[k][k]
        A[k] = [x * inv for x in A[k]]
        for i in range(n):
            if i != k and A[i][k] != 0:
                c = A[i][k]
                A[i] = [a - c * b for a, b in zip(A[i], A[k])]
    out = []
    for row in A:
        vals = row[n:]
        if any(v.denominator != 1 for v in vals):
            raise ArithmeticError("matrix is not unimodular")
        out.append([int(v) for v in vals])
    return out


def homology_of_presented_complex(d_prev, d_this, rel_this, rel_next,
                                  n_prev, n_this, n_next):
    """Cohomology at the middle term of
    C_prev --d_prev--> C_this --d_this--> C_next, where each term is
    Z^n modulo the subgroup generated by its relation columns.

    d_prev has n_prev columns (length n_this each); d_this has n_this
    columns (length n_next each); rel_* are relation columns for the
    named term.  Returns (torsion orders > 1, free rank).
    """
    if n_this == 0:
        return [], 0
    # kernel of the induced map C_this -> C_next / rel_next:
    # solutions x of d_this x = rel_next y, via the kernel of [d_this | rel_next]
    if n_next == 0:
        gens_K = [[int(i == j) for i in range(n_this)] for j in range(n_this)]
    else:
        aug_cols = list(d_this) + list(rel_next)
        Arows = [[col[i] for col in aug_cols] for i in range(n_next)]
        ker = integer_kernel(Arows)
        gens_K = [[vec[j] for j in range(n_this)] for vec in ker]
    if not gens_K:
        return [], 0
    KB = lattice_column_basis([[g[i] for g in gens_K] for i in range(n_this)])
    if not KB:
        return [], 0
    r = len(KB)
    B = [[KB[j][i] for j in range(r)] for i in range(n_this)]  # n_this x r
    snfB = smith_normal_form(B)
    sub_gens = list(d_prev) + list(rel_this)
    W_cols = []
    for g in sub_gens:
        z = integer_solve(snfB, g)
        if z is None:
            raise ArithmeticError("subgroup generator escapes the kernel lattice")
        W_cols.append(z[:r])
    if not W_cols:
        return [], r
    W = [[col[i] for col in W_cols] for i in range(r)]
    snfW = smith_normal_form(W)
    torsion = [d for d in snfW.factors if d > 1]
    return torsion, r - snfW.rank


def p_part(n, p):
    """Largest power of p dividing n."""
    out = 1
    while n % p == 0:
        n //= p
        out *= p
    return out
