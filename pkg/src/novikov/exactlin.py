"""Exact sparse linear algebra over the rationals.

Everything downstream (twisted Betti numbers, long exact sequences, the
blow-up dimension checks) reduces to rank / kernel / solve on sparse
matrices with rational entries, computed exactly.  No floating point
appears anywhere in this package.

Vectors are sparse dicts ``{index: rational}`` with no stored zeros.
"""

from __future__ import annotations

import heapq
from typing import Iterable, Mapping

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover
    from fractions import Fraction as Q

QZERO = Q(0)
QONE = Q(1)


def rational_from_string(s):
    """Parse 'p/q' or 'p' into an exact rational."""
    s = s.strip()
    if "/" in s:
        p, q = s.split("/", 1)
        return Q(int(p), int(q))
    return Q(int(s))


def rational_to_string(x):
    x = Q(x)
    if x.denominator == 1:
        return str(x.numerator)
    return "%d/%d" % (x.numerator, x.denominator)


class SparseMatrix:
    """Immutable sparse rational matrix, stored as {(row, col): value}."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Mapping | None = None):
        self.rows = rows
        self.cols = cols
        ent = {}
        if entries:
            for (r, c), v in entries.items():
                if not (0 <= r < rows and 0 <= c < cols):
                    raise IndexError("entry (%d, %d) out of bounds" % (r, c))
                v = Q(v)
                if v:
                    ent[(r, c)] = v
        self.entries = ent

    @classmethod
    def from_row_dicts(cls, row_dicts: list[dict], cols: int) -> "SparseMatrix":
        m = cls(len(row_dicts), cols)
        for r, row in enumerate(row_dicts):
            for c, v in row.items():
                if v:
                    if not 0 <= c < cols:
                        raise IndexError("column %d out of bounds" % c)
                    m.entries[(r, c)] = Q(v)
        return m

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(n, n, {(i, i): QONE for i in range(n)})

    @classmethod
    def zero(cls, rows: int, cols: int) -> "SparseMatrix":
        return cls(rows, cols)

    @classmethod
    def from_columns(cls, columns: list[dict], rows: int) -> "SparseMatrix":
        m = cls(rows, len(columns))
        for c, col in enumerate(columns):
            for r, v in col.items():
                if v:
                    m.entries[(r, c)] = Q(v)
        return m

    def nnz(self) -> int:
        return len(self.entries)

    def row_dicts(self) -> list[dict]:
        out = [dict() for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def column(self, c: int) -> dict:
        return {r: v for (r, cc), v in self.entries.items() if cc == c}

    def transpose(self) -> "SparseMatrix":
        t = SparseMatrix(self.cols, self.rows)
        for (r, c), v in self.entries.items():
            t.entries[(c, r)] = v
        return t

    def mul_vec(self, x: Mapping) -> dict:
        """Matrix times sparse vector (dict col -> value)."""
        out = {}
        if not x:
            return out
        for (r, c), v in self.entries.items():
            xv = x.get(c)
            if xv:
                out[r] = out.get(r, QZERO) + v * xv
        return {r: v for r, v in out.items() if v}

    def matmul(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        orows = other.row_dicts()
        out = SparseMatrix(self.rows, other.cols)
        acc: dict = {}
        for (r, c), v in self.entries.items():
            for c2, v2 in orows[c].items():
                k = (r, c2)
                acc[k] = acc.get(k, QZERO) + v * v2
        out.entries.update({k: v for k, v in acc.items() if v})
        return out

    def hstack(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.rows != other.rows:
            raise ValueError("row mismatch")
        m = SparseMatrix(self.rows, self.cols + other.cols)
        m.entries.update(self.entries)
        for (r, c), v in other.entries.items():
            m.entries[(r, c + self.cols)] = v
        return m

    def vstack(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.cols != other.cols:
            raise ValueError("column mismatch")
        m = SparseMatrix(self.rows + other.rows, self.cols)
        m.entries.update(self.entries)
        for (r, c), v in other.entries.items():
            m.entries[(r + self.rows, c)] = v
        return m

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other):
        return (isinstance(other, SparseMatrix) and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def __repr__(self):
        return "SparseMatrix(%dx%d, nnz=%d)" % (self.rows, self.cols, self.nnz())


def _is_unit(v) -> bool:
    return v.denominator == 1 and v.numerator in (1, -1)


class Factorization:
    """Sparse fraction-aware Gaussian elimination with Markowitz-style pivoting.

    Pivot choice: among the sparsest active rows, minimize
    (row_nnz - 1) * (col_nnz - 1), preferring +-1 pivots, ties broken by
    lowest (column, row) index.  Fully deterministic.

    After elimination the pivot rows (in elimination order) contain no
    earlier pivot column, so kernel vectors and solutions come out of a
    single reverse back-substitution pass.
    """

    # Number of candidate rows inspected per pivot step; bounds the cost of
    # pivot selection while keeping fill low in practice.
    CANDIDATES = 24

    def __init__(self, m: SparseMatrix, record_ops: bool = True):
        self.mrows = m.rows
        self.cols = m.cols
        self.record_ops = record_ops
        self.ops: list = []  # (target_row, pivot_row, factor) in order
        self.pivots: list = []  # (row, col) in elimination order
        self.pivot_rows: dict = {}  # row -> final row dict
        self._eliminate(m.row_dicts())
        self.rank = len(self.pivots)
        self.pivot_col_set = {c for _, c in self.pivots}
        self.free_cols = [c for c in range(self.cols)
                          if c not in self.pivot_col_set]

    def _eliminate(self, rows: list[dict]) -> None:
        ncols = self.cols
        col_rows: list[set] = [set() for _ in range(ncols)]
        for r, row in enumerate(rows):
            for c in row:
                col_rows[c].add(r)
        active = set(i for i, row in enumerate(rows) if row)
        heap = [(len(rows[r]), r) for r in sorted(active)]
        heapq.heapify(heap)
        ops = self.ops
        record = self.record_ops

        while True:
            # gather candidate rows of minimal current size
            cand = []
            stale = []
            while heap and len(cand) < self.CANDIDATES:
                n, r = heapq.heappop(heap)
                if r not in active:
                    continue
                if n != len(rows[r]):
                    stale.append((len(rows[r]), r))
                    continue
                cand.append(r)
                if cand and heap and heap[0][0] > n and len(cand) >= 4:
                    break
            for item in stale:
                heapq.heappush(heap, item)
            if not cand:
                break
            best = None
            for r in cand:
                row = rows[r]
                rn = len(row) - 1
                for c, v in row.items():
                    key = (rn * (len(col_rows[c]) - 1), not _is_unit(v), c, r)
                    if best is None or key < best[0]:
                        best = (key, r, c)
            # push unused candidates back
            _, pr, pc = best
            for r in cand:
                if r != pr:
                    heapq.heappush(heap, (len(rows[r]), r))

            active.discard(pr)
            prow = rows[pr]
            for c in prow:
                col_rows[c].discard(pr)
            self.pivots.append((pr, pc))
            self.pivot_rows[pr] = prow
            pv = prow[pc]
            targets = list(col_rows[pc])
            targets.sort()
            for tr in targets:
                trow = rows[tr]
                f = trow[pc] / pv
                if record:
                    ops.append((tr, pr, f))
                for c, v in prow.items():
                    nv = trow.get(c)
                    if nv is None:
                        nv = -f * v
                        if nv:
                            trow[c] = nv
                            col_rows[c].add(tr)
                    else:
                        nv = nv - f * v
                        if nv:
                            trow[c] = nv
                        else:
                            del trow[c]
                            col_rows[c].discard(tr)
                if trow:
                    heapq.heappush(heap, (len(trow), tr))
                else:
                    active.discard(tr)

    def kernel_vector(self, free_col: int) -> dict:
        """Kernel basis vector with 1 in the given free column."""
        x = {free_col: QONE}
        for pr, pc in reversed(self.pivots):
            row = self.pivot_rows[pr]
            s = QZERO
            if len(row) < len(x):
                for c, v in row.items():
                    if c != pc:
                        xv = x.get(c)
                        if xv:
                            s += v * xv
            else:
                for c, xv in x.items():
                    if c != pc:
                        v = row.get(c)
                        if v:
                            s += v * xv
            if s:
                x[pc] = -s / row[pc]
        return x

    def kernel_basis(self) -> list[dict]:
        return [self.kernel_vector(c) for c in self.free_cols]

    def solve(self, b: Mapping) -> dict | None:
        """Some x with M x = b, or None if b is not in the image.

        Deterministic: free variables are set to zero and pivots are
        back-substituted in reverse elimination order.
        """
        if not self.record_ops:
            raise RuntimeError("factorization built without operation log")
        bb = {r: Q(v) for r, v in b.items() if v}
        for tr, pr, f in self.ops:
            pv = bb.get(pr)
            if pv:
                nv = bb.get(tr, QZERO) - f * pv
                if nv:
                    bb[tr] = nv
                else:
                    bb.pop(tr, None)
        pivot_row_ids = set(self.pivot_rows)
        for r, v in bb.items():
            if r not in pivot_row_ids and v:
                return None
        x: dict = {}
        for pr, pc in reversed(self.pivots):
            row = self.pivot_rows[pr]
            s = QZERO
            for c, v in row.items():
                if c != pc:
                    xv = x.get(c)
                    if xv:
                        s += v * xv
            val = (bb.get(pr, QZERO) - s) / row[pc]
            if val:
                x[pc] = val
        return x


def rank(m: SparseMatrix) -> int:
    """Exact rank over the rationals."""
    return Factorization(m, record_ops=False).rank


def kernel_basis(m: SparseMatrix) -> list[dict]:
    """Basis of the right kernel; len = cols - rank, each vector exact."""
    return Factorization(m).kernel_basis()


def solve(m: SparseMatrix, b: Mapping | Iterable) -> dict | None:
    """Some exact solution of M x = b, or None when b is not in the image."""
    if not isinstance(b, Mapping):
        b = {i: v for i, v in enumerate(b) if v}
    return Factorization(m).solve(b)


class EchelonReducer:
    """Incremental row space: add vectors, reduce vectors modulo the span.

    Pivot rows are kept fully reduced against each other, so reduction is a
    single pass over pivot columns.  Used for choosing cohomology
    representatives independent modulo a coboundary image.
    """

    def __init__(self):
        self.pivot_rows: dict = {}  # pivot col -> row dict (row[pc] != 0)

    def reduce(self, v: Mapping) -> dict:
        v = {c: Q(x) for c, x in v.items() if x}
        for pc, row in self.pivot_rows.items():
            xv = v.get(pc)
            if xv:
                f = xv / row[pc]
                for c, rv in row.items():
                    nv = v.get(c, QZERO) - f * rv
                    if nv:
                        v[c] = nv
                    else:
                        v.pop(c, None)
        return v

    def add(self, v: Mapping) -> bool:
        """Reduce v and absorb the residual; True if the span grew."""
        r = self.reduce(v)
        if not r:
            return False
        pc = min(r)
        for opc, orow in self.pivot_rows.items():
            xv = orow.get(pc)
            if xv:
                f = xv / r[pc]
                for c, rv in r.items():
                    nv = orow.get(c, QZERO) - f * rv
                    if nv:
                        orow[c] = nv
                    else:
                        orow.pop(c, None)
        self.pivot_rows[pc] = r
        return True

    @property
    def rank(self) -> int:
        return len(self.pivot_rows)
