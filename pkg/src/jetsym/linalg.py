"""Exact linear algebra over GaussScalar: reduced row echelon form, solving,
rank, and nullspace bases.

Pivoting is deterministic (first nonzero entry in column order), and since
the reduced row echelon form of a matrix is unique, every result here is
bit-stable across runs.  Rows are held sparsely as {column: coefficient}
dictionaries; the reduction keeps full Gauss-Jordan form incrementally, so
inserting a row only ever touches columns that are actually populated.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .scalars import GaussScalar, ZERO, ONE


class LinearSystemExact:
    """An exact linear system matrix*x = rhs with labeled columns."""

    def __init__(self, rows, rhs, column_labels=None, ncols=None):
        self.rows: list[dict[int, GaussScalar]] = []
        for row in rows:
            if isinstance(row, dict):
                self.rows.append({c: v for c, v in row.items() if not v.is_zero()})
            else:
                self.rows.append({c: v for c, v in enumerate(row) if not v.is_zero()})
        self.rhs: list[GaussScalar] = list(rhs)
        if len(self.rhs) != len(self.rows):
            raise ValueError("rhs length does not match row count")
        if column_labels is not None:
            self.column_labels = list(column_labels)
            self.ncols = len(self.column_labels)
            if ncols is not None and ncols != self.ncols:
                raise ValueError("ncols disagrees with column_labels")
        else:
            if ncols is None:
                ncols = 1 + max((max(r) for r in self.rows if r), default=-1)
            self.ncols = ncols
            self.column_labels = list(range(ncols))

    def residual(self, x: list[GaussScalar]) -> list[GaussScalar]:
        out = []
        for row, b in zip(self.rows, self.rhs):
            acc = ZERO
            for c, v in row.items():
                acc = acc + v * x[c]
            out.append(acc - b)
        return out


@dataclass
class LinearSolveResult:
    consistent: bool
    particular: list[GaussScalar] | None = None
    nullspace: list[list[GaussScalar]] = field(default_factory=list)
    pivot_columns: list[int] = field(default_factory=list)
    inconsistent_row: int | None = None  # 0-based index into the input rows

    @property
    def rank(self) -> int:
        return len(self.pivot_columns)

    def unique(self) -> list[GaussScalar]:
        if not self.consistent:
            raise ValueError("system is inconsistent")
        if self.nullspace:
            raise ValueError("system is underdetermined")
        return self.particular

    def message(self) -> str:
        if self.consistent:
            return "consistent"
        return f"inconsistent system: no solution at row {self.inconsistent_row + 1}"


class _Reducer:
    """Incrementally maintained reduced row echelon form of inserted rows."""

    def __init__(self):
        self.pivots: dict[int, tuple[dict[int, GaussScalar], GaussScalar]] = {}

    def reduce(self, row: dict[int, GaussScalar], b: GaussScalar):
        """Reduce (row | b) against the current pivots, in place semantics."""
        row = dict(row)
        hit = sorted(c for c in row if c in self.pivots)
        for c in hit:
            factor = row.pop(c)
            if factor.is_zero():
                continue
            prow, pb = self.pivots[c]
            for cc, vv in prow.items():
                if cc == c:
                    continue
                acc = row.get(cc)
                nv = (acc - factor * vv) if acc is not None else -(factor * vv)
                if nv.is_zero():
                    row.pop(cc, None)
                else:
                    row[cc] = nv
            b = b - factor * pb
        return row, b

    def insert(self, row: dict[int, GaussScalar], b: GaussScalar) -> bool:
        """Insert a row; returns True if it added a new pivot.

        Raises _Inconsistent if the row reduces to 0 = nonzero.
        """
        row, b = self.reduce(row, b)
        if not row:
            if not b.is_zero():
                raise _Inconsistent()
            return False
        pc = min(row)
        inv = row[pc].inverse()
        row = {c: v * inv for c, v in row.items()}
        b = b * inv
        # Keep full Gauss-Jordan form: clear this column from earlier pivots.
        for c, (prow, pb) in self.pivots.items():
            f = prow.get(pc)
            if f is None:
                continue
            del prow[pc]
            for cc, vv in row.items():
                if cc == pc:
                    continue
                acc = prow.get(cc)
                nv = (acc - f * vv) if acc is not None else -(f * vv)
                if nv.is_zero():
                    prow.pop(cc, None)
                else:
                    prow[cc] = nv
            self.pivots[c] = (prow, pb - f * b)
        self.pivots[pc] = (row, b)
        return True


class _Inconsistent(Exception):
    pass


def solve_linear_exact(system: LinearSystemExact) -> LinearSolveResult:
    """Solve exactly: particular solution plus a nullspace basis, or an
    inconsistency report naming the offending input row."""
    red = _Reducer()
    for idx, (row, b) in enumerate(zip(system.rows, system.rhs)):
        try:
            red.insert(row, b)
        except _Inconsistent:
            return LinearSolveResult(consistent=False, inconsistent_row=idx)
    ncols = system.ncols
    pivot_cols = sorted(red.pivots)
    free_cols = [c for c in range(ncols) if c not in red.pivots]
    particular = [ZERO] * ncols
    for c in pivot_cols:
        particular[c] = red.pivots[c][1]
    nullspace = []
    for f in free_cols:
        vec = [ZERO] * ncols
        vec[f] = ONE
        for c in pivot_cols:
            entry = red.pivots[c][0].get(f)
            if entry is not None:
                vec[c] = -entry
        nullspace.append(vec)
    return LinearSolveResult(
        consistent=True,
        particular=particular,
        nullspace=nullspace,
        pivot_columns=pivot_cols,
    )


def sparse_rank(rows) -> int:
    """Rank of a collection of sparse {column: coefficient} rows."""
    red = _Reducer()
    rank = 0
    for row in rows:
        if red.insert(dict(row), ZERO):
            rank += 1
    return rank


def express_in_span(basis_rows, target_row):
    """Exact coordinates of target in the span of basis rows, or None.

    basis_rows and target_row are sparse {column: GaussScalar} vectors.
    """
    cols = set(target_row)
    for r in basis_rows:
        cols.update(r)
    col_list = sorted(cols)
    # One linear system: sum_k a_k * basis_k = target, unknowns a_k.
    rows = []
    rhs = []
    for c in col_list:
        rows.append({k: br[c] for k, br in enumerate(basis_rows) if c in br})
        rhs.append(target_row.get(c, ZERO))
    sys = LinearSystemExact(rows, rhs, ncols=len(basis_rows))
    result = solve_linear_exact(sys)
    if not result.consistent:
        return None
    return result.particular
