"""Jet coordinates, completely overdetermined second-order PDE systems, total
derivatives, and the involutivity (cross-derivative compatibility) check.

A system prescribes every second derivative:  u^k_{ij} = F^k_{ij}(x, u, u^(1))
with F symmetric in (i, j).  Only the representative with i <= j is stored,
so the symmetry is structural.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import rings
from .poly import Poly
from .rings import VarTable, jet_table, jet_var, u_var, x_var
from .scalars import GaussScalar


class JetOrderError(ValueError):
    """An operation would need jet variables beyond the table's maximum order."""


class JetContext:
    """A jet variable table plus convenience accessors."""

    def __init__(self, table: VarTable):
        if table.n < 1 or table.m < 1:
            raise ValueError("jet context needs n >= 1 and m >= 1")
        if table.max_jet_order < 2:
            raise ValueError("jet context needs max_jet_order >= 2")
        self.table = table

    @staticmethod
    def create(n: int, m: int, max_jet_order: int = 3) -> "JetContext":
        return JetContext(jet_table(n, m, max_jet_order))

    @property
    def n(self) -> int:
        return self.table.n

    @property
    def m(self) -> int:
        return self.table.m

    @property
    def max_jet_order(self) -> int:
        return self.table.max_jet_order

    def x(self, i: int) -> Poly:
        return Poly.var(self.table, x_var(i))

    def u(self, mu: int) -> Poly:
        return Poly.var(self.table, u_var(mu))

    def jet(self, mu: int, *indices: int) -> Poly:
        return Poly.var(self.table, jet_var(mu, tuple(indices)))

    def zero(self) -> Poly:
        return Poly.zero(self.table)

    def const(self, value) -> Poly:
        if not isinstance(value, GaussScalar):
            value = GaussScalar(value)
        return Poly.const(self.table, value)


def jet_order_of_poly(f: Poly) -> int:
    return max((f.table.jet_order_of(v) for v in f.variables()), default=0)


def xu_only(f: Poly) -> bool:
    return all(v[0] in (rings.X, rings.U, rings.COEF) for v in f.variables())


class PDESystem:
    """The table F^k_{ij}, i <= j, of jet functions in (x, u, u^(1)) only."""

    def __init__(self, ctx: JetContext, entries: dict | None = None):
        self.ctx = ctx
        self.entries: dict[tuple[int, int, int], Poly] = {}
        n, m = ctx.n, ctx.m
        entries = entries or {}
        for (k, i, j), f in entries.items():
            if not (1 <= k <= m and 1 <= i <= n and 1 <= j <= n):
                raise ValueError(f"entry index ({k},{i},{j}) out of range")
            key = (k, i, j) if i <= j else (k, j, i)
            if key in self.entries and not (self.entries[key] - f).is_zero():
                raise ValueError(f"conflicting entries for F^{k}_{{{i}{j}}}")
            if f.table is not ctx.table:
                f = f.convert(ctx.table)
            if jet_order_of_poly(f) > 1:
                raise ValueError(
                    f"F^{k}_{{{i}{j}}} mentions jet variables of order above one"
                )
            self.entries[key] = f
        zero = Poly.zero(ctx.table)
        for k in range(1, m + 1):
            for i in range(1, n + 1):
                for j in range(i, n + 1):
                    self.entries.setdefault((k, i, j), zero)

    def F(self, k: int, i: int, j: int) -> Poly:
        if i > j:
            i, j = j, i
        return self.entries[(k, i, j)]

    def is_flat(self) -> bool:
        return all(f.is_zero() for f in self.entries.values())

    def second_jet_bindings(self) -> dict:
        """The substitution u^k_{ij} -> F^k_{ij} over this context's table."""
        out = {}
        for (k, i, j), f in self.entries.items():
            out[jet_var(k, (i, j))] = f
        return out

    def translated(self, point: dict) -> "PDESystem":
        """The system recentered so that the given (x, u) point becomes the origin."""
        shift = {}
        for vid, val in point.items():
            if vid[0] not in (rings.X, rings.U):
                raise ValueError("base point assigns only x and u variables")
            if not isinstance(val, GaussScalar):
                val = GaussScalar(val)
            if not val.is_zero():
                shift[vid] = Poly.var(self.ctx.table, vid) + Poly.const(self.ctx.table, val)
        if not shift:
            return self
        moved = {key: f.substitute(shift) for key, f in self.entries.items()}
        return PDESystem(self.ctx, moved)


def total_derivative(ctx: JetContext, f: Poly, i: int) -> Poly:
    """D_i f, treating u and all jet variables as functions of x.

    Raises JetOrderError if the result would need jets beyond the table's
    maximum order.  Auxiliary (non-jet) variables are treated as constants.
    """
    table = f.table
    if not (1 <= i <= ctx.n):
        raise ValueError(f"direction {i} out of range")
    out = Poly.zero(table, None if f.bound is None else f.bound - 1)
    for vid in f.variables():
        kind = vid[0]
        if kind == rings.X:
            if vid[1] == i:
                out = out + f.differentiate(vid)
            continue
        if kind == rings.U:
            lift = jet_var(vid[1], (i,))
        elif kind == rings.JET:
            mu, idx = vid[1], vid[2]
            if len(idx) + 1 > ctx.max_jet_order:
                d = f.differentiate(vid)
                if d.is_zero():
                    continue
                raise JetOrderError(
                    f"D_{i} needs jet order {len(idx) + 1}, table allows {ctx.max_jet_order}"
                )
            lift = jet_var(mu, idx + (i,))
        else:
            continue  # auxiliary variables are constant under D_i
        d = f.differentiate(vid)
        if d.is_zero():
            continue
        out = out + Poly.var(table, lift) * d
    return out


def restricted_total_derivative(sys: PDESystem, f: Poly, i: int) -> Poly:
    """The total derivative along solutions: second jets replaced by F.

    f must involve only (x, u, first-jet) variables; so does the result.
    """
    table = f.table
    if jet_order_of_poly(f) > 1:
        raise ValueError("restricted total derivative needs a first-order jet function")
    out = Poly.zero(table, None if f.bound is None else f.bound - 1)
    for vid in f.variables():
        kind = vid[0]
        if kind == rings.X:
            if vid[1] == i:
                out = out + f.differentiate(vid)
            continue
        if kind == rings.U:
            lift = Poly.var(table, jet_var(vid[1], (i,)))
        elif kind == rings.JET:
            mu, (j,) = vid[1], vid[2]
            lift = sys.F(mu, i, j)
            if lift.table is not table:
                lift = lift.convert(table)
        else:
            continue
        d = f.differentiate(vid)
        if d.is_zero():
            continue
        out = out + lift * d
    return out


@dataclass
class InvolutivityVerdict:
    involutive: bool
    failures: list  # (k, i, j, l, difference Poly)

    def __bool__(self) -> bool:
        return self.involutive


def involutivity_check(sys: PDESystem) -> InvolutivityVerdict:
    """Cross-derivative compatibility of the prescribed second derivatives.

    The system is involutive iff D_l F^k_{ij} and D_i F^k_{lj} agree along
    solutions for all k, i, j, l.  For truncated entries the comparison is
    modulo the truncation bound.  Failures carry the nonzero difference.
    """
    failures = []
    n, m = sys.ctx.n, sys.ctx.m
    for k in range(1, m + 1):
        for i in range(1, n + 1):
            for l in range(i + 1, n + 1):
                for j in range(1, n + 1):
                    left = restricted_total_derivative(sys, sys.F(k, i, j), l)
                    right = restricted_total_derivative(sys, sys.F(k, l, j), i)
                    diff = left - right
                    if not diff.is_zero():
                        failures.append((k, i, j, l, diff))
    return InvolutivityVerdict(not failures, failures)
