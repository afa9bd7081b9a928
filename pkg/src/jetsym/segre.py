"""From hypersurface defining series to PDE systems, and infinitesimal CR
automorphisms of hyperquadrics.

A Levi nondegenerate hypersurface in normal form is cut out by

    w + wb + sum_j eps_j z_j zb_j + R(Z, Zb) = 0,        R = o(|Z|^2).

Attaching to each parameter point the complex hypersurface obtained by
freezing the conjugated argument produces a family of graphs u(x).  Viewing
x = z as independent and u = w as dependent variables, the family is cut
out by

    u + s_{n+1} + sum_j eps_j x_j s_j + R((x, u), s) = 0

with parameters s_1..s_{n+1}.  Differentiating in x and eliminating the
parameters yields a completely overdetermined second-order system for u,
derived here by one exact implicit solve.

Conjugated variables are independent polynomial variables; reality of a
defining polynomial is a checked invariant and "Re" is the formal half sum
under the conjugation involution, so no numerical evaluation ever occurs.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import rings
from .determining import monomials_up_to
from .jets import JetContext, PDESystem, total_derivative
from .linalg import LinearSystemExact, solve_linear_exact, sparse_rank
from .poly import Poly, mono_degree, mono_sort_key
from .rings import COEF, VarTable, W, Z, conjugate_id, cr_table, jet_table, jet_var, u_var, x_var, zeta_var
from .scalars import GaussScalar, I, ONE, ZERO
from .series import implicit_series_solve


@dataclass(frozen=True)
class Signature:
    eps: tuple[int, ...]

    def __post_init__(self):
        if len(self.eps) < 1:
            raise ValueError("signature needs at least one entry")
        if any(e not in (1, -1) for e in self.eps):
            raise ValueError("signature entries must be +1 or -1")

    @property
    def n(self) -> int:
        return len(self.eps)

    @staticmethod
    def parse(text: str) -> "Signature":
        mapping = {"+": 1, "-": -1}
        try:
            return Signature(tuple(mapping[c] for c in text))
        except KeyError:
            raise ValueError(f"signature must consist of '+' and '-', got {text!r}") from None

    def __str__(self) -> str:
        return "".join("+" if e == 1 else "-" for e in self.eps)


def defining_table(n: int) -> VarTable:
    """Variables for the parameter elimination: the (n, 1) jet table extended
    by the family parameters s_1..s_{n+1}."""
    return jet_table(n, 1, 2).extend([zeta_var(k) for k in range(1, n + 2)])


class DefiningSeries:
    """Signature plus the higher-order part R of a defining series.

    R lives on defining_table(n) in the variables (x, u, s) only, and every
    monomial must have total degree at least 3.
    """

    def __init__(self, signature: Signature, R: Poly | None = None):
        self.signature = signature
        n = signature.n
        self.table = defining_table(n)
        if R is None:
            R = Poly.zero(self.table)
        if R.table is not self.table:
            R = R.convert(self.table)
        for vid in R.variables():
            if vid[0] == rings.JET:
                raise ValueError("R cannot mention jet variables")
        for mono in R.terms:
            if mono_degree(mono) < 3:
                raise ValueError("every monomial of R must have total degree >= 3")
        self.R = R

    @property
    def n(self) -> int:
        return self.signature.n


def hyperquadric(signature: Signature) -> DefiningSeries:
    return DefiningSeries(signature)


def segre_system(defn: DefiningSeries, order: int, ctx: JetContext | None = None) -> PDESystem:
    """Eliminate the family parameters and return the second-order system.

    The defining relation, its first total derivatives, and their total
    derivatives are solved jointly for the parameters and the second jets;
    the second-jet components of the solution are the right sides F_{ij},
    truncated at ``order``.  The result is involutive by construction (up to
    the truncation order), which involutivity_check confirms.
    """
    n = defn.n
    table = defn.table
    ectx = JetContext(table)
    eps = defn.signature.eps
    R = defn.R
    Ru = R.differentiate(u_var(1))

    equations = []
    unknowns = []
    first = []
    for k in range(1, n + 1):
        p_k = Poly.var(table, jet_var(1, (k,)))
        eq = (
            p_k
            + Poly.var(table, zeta_var(k)).scale(GaussScalar(eps[k - 1]))
            + R.differentiate(x_var(k))
            + Ru * p_k
        )
        first.append(eq)
        equations.append(eq)
        unknowns.append(zeta_var(k))
    relation = Poly.var(table, u_var(1)) + Poly.var(table, zeta_var(n + 1)) + R
    for j in range(1, n + 1):
        relation = relation + (
            Poly.var(table, x_var(j)) * Poly.var(table, zeta_var(j))
        ).scale(GaussScalar(eps[j - 1]))
    equations.append(relation)
    unknowns.append(zeta_var(n + 1))
    for k in range(1, n + 1):
        for j in range(k, n + 1):
            equations.append(total_derivative(ectx, first[k - 1], j))
            unknowns.append(jet_var(1, (k, j)))

    solution = implicit_series_solve(equations, unknowns, order)

    if ctx is None:
        ctx = JetContext.create(n, 1)
    entries = {}
    for k in range(1, n + 1):
        for j in range(k, n + 1):
            entries[(1, k, j)] = solution[jet_var(1, (k, j))].convert(ctx.table)
    return PDESystem(ctx, entries)


# ---------------------------------------------------------------------------
# CR side: tangency and automorphism algebras
# ---------------------------------------------------------------------------


def conjugate_poly(f: Poly) -> Poly:
    """Formal conjugation: swap each variable with its conjugate partner,
    conjugate the coefficients, leave auxiliary (real) unknowns fixed."""
    table = f.table
    out = {}
    for mono, coeff in f.terms.items():
        pairs = []
        for p, e in mono:
            vid = table.ids[p]
            if vid[0] == COEF:
                pairs.append((p, e))
            else:
                pairs.append((table.index(conjugate_id(vid)), e))
        out[tuple(sorted(pairs))] = coeff.conjugate()
    return Poly(table, out, f.bound)


class RealDefiningPolynomial:
    """A real-valued defining polynomial in (z, zb, w, wb)."""

    def __init__(self, rho: Poly):
        diff = rho - conjugate_poly(rho)
        if not diff.is_zero():
            raise ValueError("defining polynomial is not real")
        self.rho = rho

    @property
    def table(self) -> VarTable:
        return self.rho.table


def hyperquadric_rho(signature: Signature, table: VarTable | None = None) -> RealDefiningPolynomial:
    n = signature.n
    if table is None:
        table = cr_table(n)
    rho = Poly.var(table, (W,)) + Poly.var(table, (rings.WBAR,))
    for j, e in enumerate(signature.eps, start=1):
        rho = rho + (
            Poly.var(table, (Z, j)) * Poly.var(table, (rings.ZBAR, j))
        ).scale(GaussScalar(e))
    return RealDefiningPolynomial(rho)


class HoloField:
    """sum_j a_j(z, w) d/dz_j + b(z, w) d/dw on parameter space."""

    def __init__(self, table: VarTable, coeffs):
        self.table = table
        self.coeffs = tuple(coeffs)
        for f in self.coeffs:
            if f.table is not table:
                raise ValueError("coefficients must share the field's table")
            for vid in f.variables():
                if vid[0] not in (Z, W, COEF):
                    raise ValueError("holomorphic field coefficients live in (z, w) only")

    @property
    def n(self) -> int:
        return len(self.coeffs) - 1

    def apply_to(self, f: Poly) -> Poly:
        out = Poly.zero(f.table, f.bound)
        for j in range(1, self.n + 1):
            d = f.differentiate((Z, j))
            if not d.is_zero():
                out = out + self.coeffs[j - 1] * d
        d = f.differentiate((W,))
        if not d.is_zero():
            out = out + self.coeffs[-1] * d
        return out

    def scale(self, s: GaussScalar) -> "HoloField":
        return HoloField(self.table, tuple(f.scale(s) for f in self.coeffs))

    def __add__(self, other: "HoloField") -> "HoloField":
        return HoloField(self.table, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def is_zero(self) -> bool:
        return all(f.is_zero() for f in self.coeffs)

    def __repr__(self) -> str:
        return "<HoloField " + ", ".join(str(f) for f in self.coeffs) + ">"


def reduce_by_rho(f: Poly, rho: Poly) -> Poly:
    """Remainder of f under exact division by rho, eliminating w.

    rho must contain the monomial w with invertible coefficient; since rho
    is then monic in w after normalization, the remainder is the unique
    normal form with no w, and it vanishes exactly when f lies in the ideal
    (rho).  If the rest of rho also involves w, a truncation bound is
    required for termination and membership is modulo the bound.
    """
    table = f.table
    wpos = table.index((W,))
    wmono = ((wpos, 1),)
    unit = rho.terms.get(wmono, ZERO)
    if unit.is_zero():
        raise ValueError("division inapplicable: defining polynomial has no leading w term")
    rho = rho.scale(unit.inverse())
    tail_has_w = any(
        any(p == wpos for p, _ in mono) for mono in rho.terms if mono != wmono
    )
    if tail_has_w and f.bound is None and rho.bound is None:
        raise ValueError(
            "reduction requires a truncation bound when the tail of rho involves w"
        )

    def pick(poly: Poly):
        best = None
        for mono in poly.terms:
            wexp = next((e for p, e in mono if p == wpos), 0)
            if wexp == 0:
                continue
            key = (mono_degree(mono), -wexp, mono)
            if best is None or key < best[0]:
                best = (key, mono, wexp)
        return best

    current = f
    while True:
        found = pick(current)
        if found is None:
            return current
        _, mono, wexp = found
        coeff = current.terms[mono]
        cof_pairs = tuple(
            (p, e - 1 if p == wpos else e) for p, e in mono if not (p == wpos and e == 1)
        )
        cofactor = Poly(current.table, {cof_pairs: coeff}, current.bound)
        current = current - cofactor * rho


def cr_tangency_check(X: HoloField, rho: RealDefiningPolynomial) -> bool:
    """True iff twice the real part of X(rho) lies in the ideal (rho), i.e.
    the real part of X is tangent to the hypersurface."""
    xrho = X.apply_to(rho.rho)
    f = xrho + conjugate_poly(xrho)
    return reduce_by_rho(f, rho.rho).is_zero()


@dataclass
class CRAutomorphismAlgebra:
    signature: Signature
    basis: list[HoloField]
    table: VarTable

    @property
    def real_dimension(self) -> int:
        return len(self.basis)


def cr_automorphism_algebra(signature: Signature) -> CRAutomorphismAlgebra:
    """Real basis of the infinitesimal automorphisms of the hyperquadric.

    Enumerates holomorphic fields with polynomial coefficients of degree at
    most two (second-order Taylor data determines an automorphism), imposes
    the tangency condition exactly, splits it into real and imaginary
    rational equations, and returns a nullspace basis.
    """
    n = signature.n
    base = cr_table(n)
    zw = [(Z, j) for j in range(1, n + 1)] + [(W,)]
    alphas = monomials_up_to(n + 1, 2)
    coef_ids = []
    for comp in range(n + 1):
        for alpha in alphas:
            coef_ids.append((COEF, ("aR", comp), alpha))
            coef_ids.append((COEF, ("aI", comp), alpha))
    table = base.extend(coef_ids, (0,) * len(coef_ids))
    zw_pos = [table.index(v) for v in zw]

    def ansatz(comp: int) -> Poly:
        terms = {}
        for alpha in alphas:
            pairs = tuple((p, e) for p, e in zip(zw_pos, alpha) if e)
            re_id = (COEF, ("aR", comp), alpha)
            im_id = (COEF, ("aI", comp), alpha)
            terms[tuple(sorted(pairs + ((table.index(re_id), 1),)))] = ONE
            terms[tuple(sorted(pairs + ((table.index(im_id), 1),)))] = I
        return Poly(table, terms)

    X = HoloField(table, [ansatz(comp) for comp in range(n + 1)])
    rho = hyperquadric_rho(signature, table)
    xrho = X.apply_to(rho.rho)
    remainder = reduce_by_rho(xrho + conjugate_poly(xrho), rho.rho)

    col = {cid: k for k, cid in enumerate(coef_ids)}
    coef_pos = {table.index(cid): cid for cid in coef_ids}
    buckets: dict[tuple, dict[int, GaussScalar]] = {}
    for mono, coeff in remainder.terms.items():
        cid = None
        ordinary = []
        for p, e in mono:
            if p in coef_pos:
                if cid is not None or e != 1:
                    raise ArithmeticError("tangency condition is not linear in the unknowns")
                cid = coef_pos[p]
            else:
                ordinary.append((p, e))
        if cid is None:
            raise ArithmeticError("tangency condition has an unknown-free term")
        row = buckets.setdefault(tuple(ordinary), {})
        c = col[cid]
        row[c] = row.get(c, ZERO) + coeff

    nv = len(table)
    rows = []
    for mono in sorted(buckets, key=lambda mn: mono_sort_key(mn, nv)):
        complex_row = buckets[mono]
        re_row = {c: GaussScalar(v.re) for c, v in complex_row.items() if v.re}
        im_row = {c: GaussScalar(v.im) for c, v in complex_row.items() if v.im}
        if re_row:
            rows.append(re_row)
        if im_row:
            rows.append(im_row)

    result = solve_linear_exact(
        LinearSystemExact(rows, [ZERO] * len(rows), ncols=len(coef_ids))
    )
    basis = []
    for vec in result.nullspace:
        coeffs = []
        for comp in range(n + 1):
            terms = {}
            for alpha in alphas:
                re_v = vec[col[(COEF, ("aR", comp), alpha)]]
                im_v = vec[col[(COEF, ("aI", comp), alpha)]]
                value = re_v + im_v * I
                if value.is_zero():
                    continue
                mono = tuple(
                    sorted((base.index(v), e) for v, e in zip(zw, alpha) if e)
                )
                terms[mono] = value
            coeffs.append(Poly(base, terms))
        basis.append(HoloField(base, coeffs))
    return CRAutomorphismAlgebra(signature, basis, base)


def totally_real_check(fields) -> bool:
    """True iff the real span A of the fields satisfies A meet iA = {0}."""
    fields = list(fields)
    if not fields:
        return True
    table = fields[0].table
    nv = len(table)
    keys = set()
    for X in fields:
        for comp, f in enumerate(X.coeffs):
            for mono in f.terms:
                keys.add((comp, mono))
    frame = sorted(keys, key=lambda cm: (cm[0], mono_sort_key(cm[1], nv)))
    index = {key: 2 * c for c, key in enumerate(frame)}

    def realify(X: HoloField, times_i: bool):
        row = {}
        for comp, f in enumerate(X.coeffs):
            for mono, v in f.terms.items():
                if times_i:
                    v = v * I
                c = index[(comp, mono)]
                if v.re:
                    row[c] = GaussScalar(v.re)
                if v.im:
                    row[c + 1] = GaussScalar(v.im)
        return row

    plain = [realify(X, False) for X in fields]
    with_i = [realify(X, True) for X in fields]
    r = sparse_rank(plain)
    return sparse_rank(plain + with_i) == 2 * r


def to_xu_field(X: HoloField, ctx: JetContext | None = None):
    """Rewrite a field on (z, w) parameter space in the (x, u) variables of
    the associated second-order system (x_j = z_j, u = w)."""
    from .prolong import VectorField

    n = X.n
    if ctx is None:
        ctx = JetContext.create(n, 1)
    mapping = {}
    for j in range(1, n + 1):
        mapping[X.table.index((Z, j))] = ctx.table.index(x_var(j))
    mapping[X.table.index((W,))] = ctx.table.index(u_var(1))

    def move(f: Poly) -> Poly:
        out = {}
        for mono, coeff in f.terms.items():
            pairs = tuple(sorted((mapping[p], e) for p, e in mono))
            out[pairs] = coeff
        return Poly(ctx.table, out, f.bound)

    theta = tuple(move(X.coeffs[j]) for j in range(n))
    eta = (move(X.coeffs[n]),)
    return VectorField(ctx, theta, eta)
