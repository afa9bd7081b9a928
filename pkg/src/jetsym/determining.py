"""Determining equations for infinitesimal symmetries and their two solvers.

The symmetry coefficients theta_j, eta^mu are replaced by polynomials of
total degree <= N in (x, u) whose coefficients are formal unknowns.  The
tangency criterion then becomes a single polynomial identity; collecting
the coefficient of every monomial (in x, u, and the first-jet variables)
yields one homogeneous linear equation per monomial.  Rows whose (x, u)
degree exceeds N - 2 are discarded: they would also constrain Taylor
coefficients beyond the ansatz order, so for a degree-N truncation they are
incomplete.

Two independent algorithms are provided on top of the generated rows and
are tested against each other:

* ``symmetry_algebra``: the exact nullspace of all rows at once;
* ``taylor_from_initial_data``: the layer-by-layer recursion that rebuilds
  a symmetry from its initial data (values, first derivatives, and the
  distinguished second-derivative slice gamma), solving one small linear
  system per Taylor degree and checking every remaining row of the layer.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement
from math import factorial

from . import rings
from .jets import JetContext, PDESystem
from .linalg import LinearSystemExact, _Reducer, solve_linear_exact
from .poly import Poly, mono_sort_key
from .prolong import VectorField, lie_criterion_check
from .rings import COEF, u_var, x_var
from .scalars import GaussScalar, ZERO, ONE


class DeterminingError(ValueError):
    pass


class TruncationOrderError(DeterminingError):
    """F is truncated too low to express the criterion at the ansatz order."""


class InconsistentLayerError(DeterminingError):
    def __init__(self, layer: int, detail: str = ""):
        self.layer = layer
        super().__init__(f"recursion inconsistent at Taylor layer {layer}" + (f": {detail}" if detail else ""))


class UnderdeterminedLayerError(DeterminingError):
    def __init__(self, layer: int):
        self.layer = layer
        super().__init__(f"Taylor layer {layer} is not determined (system not involutive?)")


class SingularSubsystemError(DeterminingError):
    pass


def monomials_up_to(nvars: int, degree: int):
    """Dense exponent tuples of total degree <= degree, graded then lex."""
    out = []
    for deg in range(degree + 1):
        for combo in combinations_with_replacement(range(nvars), deg):
            alpha = [0] * nvars
            for p in combo:
                alpha[p] += 1
            out.append(tuple(alpha))
    return out


def alpha_factorial(alpha) -> int:
    f = 1
    for e in alpha:
        f *= factorial(e)
    return f


THETA = "theta"
ETA = "eta"


class UnknownCoefficientField:
    """Degree-N ansatz for (theta, eta) with one formal unknown per Taylor
    coefficient, realized as weight-zero auxiliary variables of an extended
    jet table so every downstream operation stays ordinary polynomial
    arithmetic (and automatically linear in the unknowns)."""

    def __init__(self, ctx: JetContext, order: int):
        if order < 2:
            raise ValueError("ansatz order must be at least 2")
        self.ctx = ctx
        self.order = order
        n, m = ctx.n, ctx.m
        self.wvars = [x_var(i) for i in range(1, n + 1)] + [u_var(mu) for mu in range(1, m + 1)]
        self.funcs = [(THETA, j) for j in range(1, n + 1)] + [(ETA, mu) for mu in range(1, m + 1)]
        self.alphas = monomials_up_to(n + m, order)
        self.unknowns = [
            (COEF, func, alpha)
            for alpha in self.alphas
            for func in self.funcs
        ]
        # Column order: Taylor degree, then function, then exponent.
        self.unknowns.sort(key=lambda cid: (sum(cid[2]), self.funcs.index(cid[1]), cid[2]))
        self.col = {cid: k for k, cid in enumerate(self.unknowns)}
        self.ext_table = ctx.table.extend(self.unknowns, (0,) * len(self.unknowns))
        self.ext_ctx = JetContext(self.ext_table)
        self._w_pos = [self.ext_table.index(v) for v in self.wvars]
        self.theta = tuple(self._ansatz_poly((THETA, j)) for j in range(1, n + 1))
        self.eta = tuple(self._ansatz_poly((ETA, mu)) for mu in range(1, m + 1))

    def _ansatz_poly(self, func) -> Poly:
        terms = {}
        for alpha in self.alphas:
            cid = (COEF, func, alpha)
            pairs = [(p, e) for p, e in zip(self._w_pos, alpha) if e]
            pairs.append((self.ext_table.index(cid), 1))
            terms[tuple(sorted(pairs))] = ONE
        return Poly(self.ext_table, terms)

    def ansatz_field(self) -> VectorField:
        return VectorField(self.ext_ctx, self.theta, self.eta)

    def unknown_count(self) -> int:
        return len(self.unknowns)

    def label(self, cid) -> str:
        func, alpha = cid[1], cid[2]
        inner = "*".join(
            f"{self.ctx.table.name_of(v)}" + (f"^{e}" if e > 1 else "")
            for v, e in zip(self.wvars, alpha)
            if e
        )
        return f"{func[0]}{func[1]}[{inner or '1'}]"

    def layer_of(self, cid) -> int:
        return sum(cid[2])

    def gamma_ids(self):
        """Coefficient unknowns carrying the gamma slice d2 theta_1 / dx_1 dw_l."""
        q = len(self.wvars)
        out = []
        for l in range(q):
            alpha = [0] * q
            alpha[0] += 1
            alpha[l] += 1
            out.append((COEF, (THETA, 1), tuple(alpha)))
        return out

    def field_from_values(self, values) -> VectorField:
        """Realize concrete coefficients as a vector field on the base context.

        values: mapping from unknown id to GaussScalar, or a flat sequence
        aligned with the unknown ordering.
        """
        if not isinstance(values, dict):
            values = dict(zip(self.unknowns, values))
        table = self.ctx.table
        wpos = [table.index(v) for v in self.wvars]

        def build(func) -> Poly:
            terms = {}
            for alpha in self.alphas:
                c = values.get((COEF, func, alpha), ZERO)
                if c.is_zero():
                    continue
                mono = tuple(sorted((p, e) for p, e in zip(wpos, alpha) if e))
                terms[mono] = c
            return Poly(table, terms)

        theta = tuple(build((THETA, j)) for j in range(1, self.ctx.n + 1))
        eta = tuple(build((ETA, mu)) for mu in range(1, self.ctx.m + 1))
        return VectorField(self.ctx, theta, eta)


@dataclass
class RowProvenance:
    mu: int
    i: int
    j: int
    mono: tuple  # ordinary (x, u, jet) monomial over the extended table
    xu_degree: int
    jet_degree: int

    def monomial_str(self, table) -> str:
        if not self.mono:
            return "1"
        return "*".join(
            table.name_of(table.ids[p]) + (f"^{e}" if e > 1 else "")
            for p, e in self.mono
        )


class DeterminingSystem:
    """Homogeneous linear system over the ansatz unknowns, with per-row
    provenance (which residual and monomial produced the row)."""

    def __init__(self, field: UnknownCoefficientField, rows, provenance):
        self.field = field
        self.rows = rows  # list of {column: GaussScalar}
        self.provenance: list[RowProvenance] = provenance
        self.system = LinearSystemExact(
            rows,
            [ZERO] * len(rows),
            column_labels=[field.label(cid) for cid in field.unknowns],
        )

    @property
    def unknown_count(self) -> int:
        return self.field.unknown_count()

    @property
    def row_count(self) -> int:
        return len(self.rows)


def generate_determining(sys: PDESystem, field: UnknownCoefficientField) -> DeterminingSystem:
    """Expand the symmetry criterion for the ansatz and collect one equation
    per complete monomial coefficient."""
    ext_ctx = field.ext_ctx
    ext_table = field.ext_table
    ext_sys = PDESystem(ext_ctx, {key: f.convert(ext_table) for key, f in sys.entries.items()})
    residuals = lie_criterion_check(field.ansatz_field(), ext_sys)

    N = field.order
    coef_pos = {ext_table.index(cid): cid for cid in field.unknowns}
    buckets: dict[tuple, dict[int, GaussScalar]] = {}
    for (mu, i, j) in sorted(residuals):
        r = residuals[(mu, i, j)]
        if r.bound is not None and r.bound < N + 1:
            raise TruncationOrderError(
                f"residual for (mu={mu}, i={i}, j={j}) is only valid to degree "
                f"{r.bound}; the degree-{N} ansatz needs {N + 1}"
            )
        for mono, coeff in r.terms.items():
            coef_entry = None
            ordinary = []
            for p, e in mono:
                if p in coef_pos:
                    if coef_entry is not None or e != 1:
                        raise ArithmeticError("criterion residual is not linear in the unknowns")
                    coef_entry = coef_pos[p]
                else:
                    ordinary.append((p, e))
            if coef_entry is None:
                raise ArithmeticError("criterion residual has an unknown-free term")
            ordinary = tuple(ordinary)
            xu_deg = sum(
                e for p, e in ordinary if ext_table.ids[p][0] in (rings.X, rings.U)
            )
            if xu_deg > N - 2:
                continue
            key = (mu, i, j, ordinary)
            row = buckets.setdefault(key, {})
            col = field.col[coef_entry]
            acc = row.get(col)
            row[col] = coeff if acc is None else acc + coeff

    nv = len(ext_table)
    ordered = sorted(buckets, key=lambda k: (k[0], k[1], k[2], mono_sort_key(k[3], nv)))
    rows = []
    provenance = []
    for mu, i, j, mono in ordered:
        row = {c: v for c, v in buckets[(mu, i, j, mono)].items() if not v.is_zero()}
        if not row:
            continue
        xu_deg = sum(e for p, e in mono if ext_table.ids[p][0] in (rings.X, rings.U))
        jet_deg = sum(e for p, e in mono if ext_table.ids[p][0] == rings.JET)
        rows.append(row)
        provenance.append(RowProvenance(mu, i, j, mono, xu_deg, jet_deg))
    return DeterminingSystem(field, rows, provenance)


# ---------------------------------------------------------------------------
# Initial data
# ---------------------------------------------------------------------------


@dataclass
class InitialData:
    """The vector (alpha, beta, gamma, delta, epsilon) of a field at a point:
    first derivatives of theta and eta, the slice d2 theta_1 / dx_1 dw_l,
    and the values of eta and theta."""

    alpha: tuple  # n rows of length n+m
    beta: tuple   # m rows of length n+m
    gamma: tuple  # length n+m
    delta: tuple  # length m
    epsilon: tuple  # length n

    @staticmethod
    def dimension(n: int, m: int) -> int:
        return (n + m + 2) * (n + m)

    @staticmethod
    def zero(n: int, m: int) -> "InitialData":
        q = n + m
        return InitialData(
            alpha=tuple(tuple(ZERO for _ in range(q)) for _ in range(n)),
            beta=tuple(tuple(ZERO for _ in range(q)) for _ in range(m)),
            gamma=tuple(ZERO for _ in range(q)),
            delta=tuple(ZERO for _ in range(m)),
            epsilon=tuple(ZERO for _ in range(n)),
        )

    @staticmethod
    def from_flat(values, n: int, m: int) -> "InitialData":
        values = [v if isinstance(v, GaussScalar) else GaussScalar(v) for v in values]
        q = n + m
        if len(values) != InitialData.dimension(n, m):
            raise ValueError(
                f"initial data must have length {InitialData.dimension(n, m)}, got {len(values)}"
            )
        pos = 0

        def take(k):
            nonlocal pos
            chunk = tuple(values[pos:pos + k])
            pos += k
            return chunk

        alpha = tuple(take(q) for _ in range(n))
        beta = tuple(take(q) for _ in range(m))
        gamma = take(q)
        delta = take(m)
        epsilon = take(n)
        return InitialData(alpha, beta, gamma, delta, epsilon)

    def flat(self) -> list[GaussScalar]:
        out = []
        for row in self.alpha:
            out.extend(row)
        for row in self.beta:
            out.extend(row)
        out.extend(self.gamma)
        out.extend(self.delta)
        out.extend(self.epsilon)
        return out

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.flat())


def omega_basis(n: int, m: int) -> list[InitialData]:
    """Standard basis of the initial-data space."""
    dim = InitialData.dimension(n, m)
    out = []
    for k in range(dim):
        vec = [ZERO] * dim
        vec[k] = ONE
        out.append(InitialData.from_flat(vec, n, m))
    return out


def initial_data_of(X: VectorField, point: dict | None = None) -> InitialData:
    """Read off (alpha, beta, gamma, delta, epsilon) of a field at a point."""
    ctx = X.ctx
    n, m = ctx.n, ctx.m
    point = point or {}
    wvars = [x_var(i) for i in range(1, n + 1)] + [u_var(mu) for mu in range(1, m + 1)]

    def deriv_at(f: Poly, *vids) -> GaussScalar:
        for v in vids:
            f = f.differentiate(v)
        return f.evaluate(point)

    alpha = tuple(
        tuple(deriv_at(X.theta[j], w) for w in wvars) for j in range(n)
    )
    beta = tuple(
        tuple(deriv_at(X.eta[k], w) for w in wvars) for k in range(m)
    )
    gamma = tuple(deriv_at(X.theta[0], x_var(1), w) for w in wvars)
    delta = tuple(X.eta[k].evaluate(point) for k in range(m))
    epsilon = tuple(X.theta[j].evaluate(point) for j in range(n))
    return InitialData(alpha, beta, gamma, delta, epsilon)


# ---------------------------------------------------------------------------
# Solvers
# ---------------------------------------------------------------------------


def _lin_add_scaled(target: dict, form: dict, s: GaussScalar):
    for k, v in form.items():
        acc = target.get(k)
        nv = (acc + v * s) if acc is not None else v * s
        if nv.is_zero():
            target.pop(k, None)
        else:
            target[k] = nv


def solve_second_order(det: DeterminingSystem) -> dict:
    """Express every second derivative of theta_j, eta^mu at the base point
    as an exact affine combination of the gamma components and lower-order
    data.

    Returns {(func, beta): linear form} where beta is a second-derivative
    exponent tuple over (x, u) and the linear form maps derivative keys
    (func, alpha), |alpha| <= 2, to GaussScalar coefficients.  The square
    subsystem is chosen deterministically: rows in provenance order are
    kept whenever they increase the rank on the non-gamma second-derivative
    columns.
    """
    field = det.field
    gamma = set(field.gamma_ids())
    layer2 = [cid for cid in field.unknowns if field.layer_of(cid) == 2]
    vprime = [cid for cid in layer2 if cid not in gamma]
    vidx = {cid: k for k, cid in enumerate(vprime)}
    params = [cid for cid in field.unknowns if field.layer_of(cid) <= 1] + sorted(
        gamma, key=field.col.get
    )
    param_set = set(params)

    reducer = _Reducer()
    selected = []
    for row, prov in zip(det.rows, det.provenance):
        if prov.xu_degree != 0:
            continue
        projected = {}
        rest = {}
        for col, v in row.items():
            cid = field.unknowns[col]
            if cid in vidx:
                projected[vidx[cid]] = v
            elif cid in param_set:
                rest[cid] = v
            else:
                raise SingularSubsystemError(
                    f"row {prov} involves an unexpected unknown {field.label(cid)}"
                )
        if not projected:
            continue
        if reducer.insert(dict(projected), ZERO):
            selected.append((projected, rest))
            if len(selected) == len(vprime):
                break
    if len(selected) != len(vprime):
        raise SingularSubsystemError(
            "no invertible square subsystem for the second-order layer "
            "(system not involutive or malformed)"
        )

    # Dense Gauss-Jordan with linear forms over the parameters as right sides.
    k = len(vprime)
    mat = [[ZERO] * k for _ in range(k)]
    rhs: list[dict] = []
    for r, (projected, rest) in enumerate(selected):
        for c, v in projected.items():
            mat[r][c] = v
        rhs.append({cid: -v for cid, v in rest.items()})
    for c in range(k):
        p = next(r for r in range(c, k) if not mat[r][c].is_zero())
        mat[c], mat[p] = mat[p], mat[c]
        rhs[c], rhs[p] = rhs[p], rhs[c]
        inv = mat[c][c].inverse()
        mat[c] = [v * inv for v in mat[c]]
        rhs[c] = {key: v * inv for key, v in rhs[c].items()}
        for r in range(k):
            if r == c or mat[r][c].is_zero():
                continue
            f = mat[r][c]
            mat[r] = [a - f * b for a, b in zip(mat[r], mat[c])]
            _lin_add_scaled(rhs[r], rhs[c], -f)

    # Convert coefficient-space forms into derivative-space forms.
    def deriv_key(cid):
        return (cid[1], cid[2])

    out = {}
    for r, cid in enumerate(vprime):
        fact = GaussScalar(alpha_factorial(cid[2]))
        form = {}
        for pid, v in rhs[r].items():
            pf = GaussScalar(alpha_factorial(pid[2]))
            form[deriv_key(pid)] = v * fact / pf
        out[deriv_key(cid)] = form
    for cid in gamma:
        out[deriv_key(cid)] = {deriv_key(cid): ONE}
    return out


def _known_from_omega(field: UnknownCoefficientField, omega: InitialData) -> dict:
    n, m = field.ctx.n, field.ctx.m
    q = n + m
    known: dict[tuple, GaussScalar] = {}
    zero_alpha = (0,) * q
    for j in range(n):
        known[(COEF, (THETA, j + 1), zero_alpha)] = omega.epsilon[j]
    for k in range(m):
        known[(COEF, (ETA, k + 1), zero_alpha)] = omega.delta[k]
    for l in range(q):
        e_l = tuple(1 if t == l else 0 for t in range(q))
        for j in range(n):
            known[(COEF, (THETA, j + 1), e_l)] = omega.alpha[j][l]
        for k in range(m):
            known[(COEF, (ETA, k + 1), e_l)] = omega.beta[k][l]
    for l in range(q):
        alpha = [0] * q
        alpha[0] += 1
        alpha[l] += 1
        fact = GaussScalar(alpha_factorial(alpha))
        known[(COEF, (THETA, 1), tuple(alpha))] = omega.gamma[l] / fact
    return known


def taylor_from_initial_data(
    sys: PDESystem,
    omega: InitialData,
    order: int = 3,
    point: dict | None = None,
    det: DeterminingSystem | None = None,
) -> VectorField:
    """Rebuild the degree-``order`` Taylor truncation of the symmetry with
    the given initial data, one layer at a time.

    Degrees 0 and 1 and the gamma slice come straight from omega; every
    higher layer is solved exactly from the determining rows whose (x, u)
    degree matches, and all remaining rows of the layer are verified, so an
    inconsistency (non-involutive system, inadmissible data) is reported
    with its layer.
    """
    if det is not None and point:
        raise ValueError("pass either a precomputed determining system or a point, not both")
    if det is not None and det.field.order != order:
        raise ValueError("precomputed determining system was generated at a different order")
    if point:
        sys = sys.translated(point)
    field = det.field if det is not None else UnknownCoefficientField(sys.ctx, order)
    if det is None:
        det = generate_determining(sys, field)
    known = _known_from_omega(field, omega)

    by_degree: dict[int, list[int]] = {}
    for idx, prov in enumerate(det.provenance):
        by_degree.setdefault(prov.xu_degree, []).append(idx)

    for layer in range(2, order + 1):
        targets = [
            cid
            for cid in field.unknowns
            if field.layer_of(cid) == layer and cid not in known
        ]
        tidx = {cid: k for k, cid in enumerate(targets)}
        rows = []
        rhs = []
        prov_used = []
        for idx in by_degree.get(layer - 2, []):
            row = det.rows[idx]
            new_row = {}
            acc = ZERO
            for col, v in row.items():
                cid = field.unknowns[col]
                if cid in known:
                    acc = acc + v * known[cid]
                elif cid in tidx:
                    new_row[tidx[cid]] = v
                else:
                    raise InconsistentLayerError(
                        layer,
                        f"row touches unknown {field.label(cid)} outside the layer",
                    )
            rows.append(new_row)
            rhs.append(-acc)
            prov_used.append(det.provenance[idx])
        result = solve_linear_exact(LinearSystemExact(rows, rhs, ncols=len(targets)))
        if not result.consistent:
            prov = prov_used[result.inconsistent_row]
            raise InconsistentLayerError(
                layer,
                f"residual (mu={prov.mu}, i={prov.i}, j={prov.j}) at monomial "
                f"{prov.monomial_str(field.ext_table)}",
            )
        if result.nullspace:
            raise UnderdeterminedLayerError(layer)
        for cid, val in zip(targets, result.particular):
            known[cid] = val

    X = field.field_from_values(known)
    if point:
        X = _shift_field(X, point, back=True)
    return X


def _shift_field(X: VectorField, point: dict, back: bool) -> VectorField:
    table = X.ctx.table
    bindings = {}
    for vid, val in point.items():
        if not isinstance(val, GaussScalar):
            val = GaussScalar(val)
        if val.is_zero():
            continue
        shift = Poly.const(table, -val if back else val)
        bindings[vid] = Poly.var(table, vid) + shift
    if not bindings:
        return X
    return VectorField(
        X.ctx,
        tuple(f.substitute(bindings) for f in X.theta),
        tuple(f.substitute(bindings) for f in X.eta),
    )


@dataclass
class SymmetryAlgebra:
    basis: list[VectorField]
    determining: DeterminingSystem

    @property
    def dimension(self) -> int:
        return len(self.basis)


def symmetry_algebra(sys: PDESystem, order: int = 3, point: dict | None = None) -> SymmetryAlgebra:
    """Basis of degree-``order`` truncated infinitesimal symmetries via the
    exact nullspace of the full determining system."""
    if point:
        sys = sys.translated(point)
    field = UnknownCoefficientField(sys.ctx, order)
    det = generate_determining(sys, field)
    result = solve_linear_exact(det.system)
    if not result.consistent:
        raise DeterminingError("homogeneous determining system reported inconsistent")
    basis = []
    for vec in result.nullspace:
        X = field.field_from_values(vec)
        if point:
            X = _shift_field(X, point, back=True)
        basis.append(X)
    return SymmetryAlgebra(basis, det)
