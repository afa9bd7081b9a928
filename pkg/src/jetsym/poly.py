"""Sparse multivariate polynomials and truncated power series over GaussScalar.

A Poly maps monomials to nonzero coefficients.  Monomials are tuples of
(variable position, exponent) pairs, sorted by position, exponents > 0; the
empty tuple is the constant monomial.  An optional ``bound`` turns the same
representation into a truncated power series: terms whose weighted total
degree exceeds the bound are unknown and never stored.  ``bound=None``
means the polynomial is exact.

Truncation bookkeeping: sums and products keep the minimum bound of their
operands, differentiation lowers the bound by one, and substitution into a
truncated series requires every replaced variable's binding to vanish at
the origin (otherwise discarded high-degree terms could influence low
degrees and no bound would be valid).
"""

from __future__ import annotations

from .rings import VarTable
from .scalars import GaussScalar, ONE, ZERO

Mono = tuple  # tuple[(position, exponent), ...] sorted by position


def mono_mul(a: Mono, b: Mono) -> Mono:
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    la, lb = len(a), len(b)
    while i < la and j < lb:
        pa, ea = a[i]
        pb, eb = b[j]
        if pa < pb:
            out.append(a[i])
            i += 1
        elif pa > pb:
            out.append(b[j])
            j += 1
        else:
            out.append((pa, ea + eb))
            i += 1
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


def mono_degree(mono: Mono) -> int:
    return sum(e for _, e in mono)


def mono_weighted_degree(mono: Mono, weights) -> int:
    return sum(e * weights[p] for p, e in mono)


def mono_sort_key(mono: Mono, nvars: int):
    """Graded-lex key: total degree first, earlier variables dominant."""
    dense = [0] * nvars
    for p, e in mono:
        dense[p] = e
    return (mono_degree(mono), tuple(-e for e in dense))


def _min_bound(*bounds):
    present = [b for b in bounds if b is not None]
    return min(present) if present else None


class Poly:
    __slots__ = ("table", "terms", "bound")

    def __init__(self, table: VarTable, terms: dict | None = None, bound: int | None = None):
        self.table = table
        self.terms: dict[Mono, GaussScalar] = terms if terms is not None else {}
        self.bound = bound

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(table: VarTable, bound: int | None = None) -> "Poly":
        return Poly(table, {}, bound)

    @staticmethod
    def const(table: VarTable, value: GaussScalar | int, bound: int | None = None) -> "Poly":
        if isinstance(value, int):
            value = GaussScalar(value)
        if value.is_zero():
            return Poly(table, {}, bound)
        return Poly(table, {(): value}, bound)

    @staticmethod
    def var(table: VarTable, vid, bound: int | None = None) -> "Poly":
        pos = table.index(vid)
        return Poly(table, {((pos, 1),): ONE}, bound)

    # -- predicates --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not m for m in self.terms)

    def constant_term(self) -> GaussScalar:
        return self.terms.get((), ZERO)

    def as_scalar(self) -> GaussScalar:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.constant_term()

    def degree(self) -> int:
        """Weighted total degree; 0 for the zero polynomial."""
        w = self.table.weights
        return max((mono_weighted_degree(m, w) for m in self.terms), default=0)

    def variables(self):
        seen = set()
        for m in self.terms:
            for p, _ in m:
                seen.add(p)
        return {self.table.ids[p] for p in seen}

    # -- ring operations -----------------------------------------------------

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            acc = out.get(m)
            if acc is None:
                if not c.is_zero():
                    out[m] = c
            else:
                s = acc + c
                if s.is_zero():
                    del out[m]
                else:
                    out[m] = s
        return Poly(self.table, out, _min_bound(self.bound, other.bound))

    def __neg__(self) -> "Poly":
        return Poly(self.table, {m: -c for m, c in self.terms.items()}, self.bound)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def scale(self, s: GaussScalar) -> "Poly":
        if s.is_zero():
            return Poly(self.table, {}, self.bound)
        if s.is_one():
            return self
        return Poly(self.table, {m: c * s for m, c in self.terms.items()}, self.bound)

    def __mul__(self, other) -> "Poly":
        if isinstance(other, GaussScalar):
            return self.scale(other)
        bound = _min_bound(self.bound, other.bound)
        out: dict[Mono, GaussScalar] = {}
        w = self.table.weights
        if len(self.terms) > len(other.terms):
            big, small = self.terms, other.terms
        else:
            big, small = other.terms, self.terms
        for m1, c1 in small.items():
            for m2, c2 in big.items():
                m = mono_mul(m1, m2)
                if bound is not None and mono_weighted_degree(m, w) > bound:
                    continue
                c = c1 * c2
                acc = out.get(m)
                if acc is None:
                    if not c.is_zero():
                        out[m] = c
                else:
                    s = acc + c
                    if s.is_zero():
                        del out[m]
                    else:
                        out[m] = s
        return Poly(self.table, out, bound)

    def __rmul__(self, other) -> "Poly":
        if isinstance(other, GaussScalar):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative exponent")
        result = Poly.const(self.table, ONE, self.bound)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        """Equality of stored terms; truncation bounds are not compared."""
        if not isinstance(other, Poly):
            return NotImplemented
        return self.table is other.table and self.terms == other.terms

    def __hash__(self):
        raise TypeError("Poly is not hashable")

    # -- truncation ------------------------------------------------------------

    def truncate(self, bound: int | None) -> "Poly":
        new_bound = _min_bound(self.bound, bound)
        if new_bound is None or new_bound == self.bound:
            return Poly(self.table, dict(self.terms), new_bound)
        w = self.table.weights
        kept = {m: c for m, c in self.terms.items() if mono_weighted_degree(m, w) <= new_bound}
        return Poly(self.table, kept, new_bound)

    # -- calculus ----------------------------------------------------------------

    def differentiate(self, vid) -> "Poly":
        pos = self.table.index(vid)
        out: dict[Mono, GaussScalar] = {}
        for m, c in self.terms.items():
            for k, (p, e) in enumerate(m):
                if p == pos:
                    if e == 1:
                        nm = m[:k] + m[k + 1:]
                    else:
                        nm = m[:k] + ((p, e - 1),) + m[k + 1:]
                    nc = c * GaussScalar(e)
                    acc = out.get(nm)
                    out[nm] = nc if acc is None else acc + nc
                    break
        out = {m: c for m, c in out.items() if not c.is_zero()}
        bound = None if self.bound is None else self.bound - 1
        return Poly(self.table, out, bound)

    def substitute(self, bindings: dict) -> "Poly":
        """Simultaneously replace variables by polynomials (same table).

        Scalars are accepted as constant bindings.  If this polynomial is a
        truncated series, every replaced variable that actually occurs must
        be bound to a series with zero constant term.
        """
        table = self.table
        polys: dict[int, Poly] = {}
        for vid, val in bindings.items():
            pos = table.index(vid)
            if isinstance(val, GaussScalar):
                val = Poly.const(table, val)
            elif isinstance(val, int):
                val = Poly.const(table, GaussScalar(val))
            if val.table is not table:
                raise ValueError("binding polynomial uses a different variable table")
            polys[pos] = val

        occurring = set()
        for m in self.terms:
            for p, _ in m:
                if p in polys:
                    occurring.add(p)
        bound = self.bound
        for p in occurring:
            b = polys[p]
            if self.bound is not None and not b.constant_term().is_zero():
                raise ValueError(
                    "cannot substitute a series with nonzero constant term into a "
                    "truncated series"
                )
            bound = _min_bound(bound, b.bound)

        if not occurring:
            return self.truncate(bound)

        powers: dict[int, list[Poly]] = {}

        def power(pos: int, e: int) -> Poly:
            cache = powers.setdefault(pos, [Poly.const(table, ONE, bound), polys[pos].truncate(bound)])
            while len(cache) <= e:
                cache.append((cache[-1] * polys[pos]).truncate(bound))
            return cache[e]

        total = Poly.zero(table, bound)
        for m, c in self.terms.items():
            kept = tuple(pe for pe in m if pe[0] not in occurring)
            factor = Poly(table, {kept: c}, bound)
            for p, e in m:
                if p in occurring:
                    factor = (factor * power(p, e)).truncate(bound)
            total = total + factor
        return total.truncate(bound)

    def evaluate(self, point: dict, missing_zero: bool = True) -> GaussScalar:
        """Evaluate at a point given as {variable id: GaussScalar}.

        Variables without a value are taken to be zero unless missing_zero
        is False, in which case they raise.
        """
        table = self.table
        values: dict[int, GaussScalar] = {}
        for vid, val in point.items():
            values[table.index(vid)] = val if isinstance(val, GaussScalar) else GaussScalar(val)
        total = ZERO
        for m, c in self.terms.items():
            term = c
            for p, e in m:
                v = values.get(p)
                if v is None:
                    if missing_zero:
                        term = ZERO
                        break
                    raise KeyError(f"no value for variable {table.ids[p]!r}")
                term = term * v ** e
                if term.is_zero():
                    break
            total = total + term
        return total

    def inverse_series(self, order: int) -> "Poly":
        """Multiplicative inverse as a series truncated at the given order.

        Requires an invertible constant term.  Newton iteration
        g <- g*(2 - f*g) doubles the correct valuation each step.
        """
        c0 = self.constant_term()
        if c0.is_zero():
            raise ValueError("series with zero constant term has no inverse")
        f = self.truncate(order)
        g = Poly.const(self.table, c0.inverse(), order)
        two = Poly.const(self.table, GaussScalar(2), order)
        correct = 1
        while correct <= order:
            g = (g * (two - f * g)).truncate(order)
            correct *= 2
        return g

    def convert(self, target: VarTable) -> "Poly":
        """Re-key this polynomial against another table (matching by variable id)."""
        if target is self.table:
            return self
        out = {}
        for m, c in self.terms.items():
            nm = tuple(sorted((target.index(self.table.ids[p]), e) for p, e in m))
            out[nm] = c
        return Poly(target, out, self.bound)

    # -- emission ---------------------------------------------------------------

    def sorted_terms(self):
        """Terms in graded-lex order (degree ascending, earlier variables first)."""
        nv = len(self.table)
        return sorted(self.terms.items(), key=lambda mc: mono_sort_key(mc[0], nv))

    def __str__(self) -> str:
        return poly_to_str(self)

    def __repr__(self) -> str:
        return f"<Poly {poly_to_str(self)}>"


def poly_to_str(f: Poly) -> str:
    """Canonical text form; parses back to the same polynomial."""
    if f.is_zero():
        return "0"
    parts = []
    for mono, coeff in f.sorted_terms():
        factors = []
        for p, e in mono:
            name = f.table.name_of(f.table.ids[p])
            factors.append(name if e == 1 else f"{name}^{e}")
        if not factors:
            cs = str(coeff)
            piece = f"({cs})" if ("+" in cs[1:] or "-" in cs[1:]) else cs
        elif coeff.is_one():
            piece = "*".join(factors)
        elif (-coeff).is_one():
            piece = "-" + "*".join(factors)
        else:
            cs = str(coeff)
            if "+" in cs[1:] or "-" in cs[1:]:
                cs = f"({cs})"
            piece = cs + "*" + "*".join(factors)
        parts.append(piece)
    out = parts[0]
    for piece in parts[1:]:
        if piece.startswith("-"):
            out += " - " + piece[1:]
        else:
            out += " + " + piece
    return out
