"""Variable tables: the canonical, totally ordered variable sets polynomials live over.

A VarTable fixes the variables and their order once; every Poly carries a
reference to its table and stores exponents against that order.  The jet
table layout is

    x_1 .. x_n,  u^1 .. u^m,  then jet variables u^mu_I graded by |I| and
    then lexicographic in (mu, I),

with multi-indices I always sorted ascending, so u^mu_{ij} and u^mu_{ji}
are the same variable.  Tables can be extended with auxiliary variables
(elimination parameters, symbolic coefficients); auxiliary variables may
carry truncation weight 0 so they do not count toward series truncation.
"""

from __future__ import annotations

from itertools import combinations_with_replacement

VarId = tuple

X = "x"
U = "u"
JET = "jet"
ZETA = "zeta"
COEF = "coef"
Z = "z"
W = "w"
ZBAR = "zbar"
WBAR = "wbar"
AUX = "aux"


def x_var(i: int) -> VarId:
    return (X, i)


def u_var(mu: int) -> VarId:
    return (U, mu)


def jet_var(mu: int, indices: tuple[int, ...]) -> VarId:
    return (JET, mu, tuple(sorted(indices)))


def zeta_var(k: int) -> VarId:
    return (ZETA, k)


def default_name(vid: VarId) -> str:
    kind = vid[0]
    if kind == X:
        return f"x{vid[1]}"
    if kind == U:
        return f"u{vid[1]}"
    if kind == JET:
        mu, idx = vid[1], vid[2]
        return f"p{mu}_" + "_".join(str(i) for i in idx)
    if kind == ZETA:
        return f"s{vid[1]}"
    if kind == Z:
        return f"z{vid[1]}"
    if kind == W:
        return "w"
    if kind == ZBAR:
        return f"zb{vid[1]}"
    if kind == WBAR:
        return "wb"
    if kind == AUX:
        return str(vid[1])
    if kind == COEF:
        func, alpha = vid[1], vid[2]
        inner = ",".join(str(e) for e in alpha)
        return f"{func[0]}{func[1]}[{inner}]"
    raise ValueError(f"unnamed variable id {vid!r}")


class VarTable:
    """An immutable ordered collection of variables with truncation weights."""

    __slots__ = ("ids", "pos", "weights", "n", "m", "max_jet_order", "_names", "_by_name")

    def __init__(self, ids, weights=None, n=0, m=0, max_jet_order=0):
        self.ids: tuple[VarId, ...] = tuple(ids)
        self.pos: dict[VarId, int] = {v: k for k, v in enumerate(self.ids)}
        if len(self.pos) != len(self.ids):
            raise ValueError("duplicate variable ids")
        self.weights: tuple[int, ...] = (
            tuple(weights) if weights is not None else (1,) * len(self.ids)
        )
        if len(self.weights) != len(self.ids):
            raise ValueError("weights length mismatch")
        self.n = n
        self.m = m
        self.max_jet_order = max_jet_order
        self._names = tuple(default_name(v) for v in self.ids)
        self._by_name = {name: vid for name, vid in zip(self._names, self.ids)}

    def __len__(self) -> int:
        return len(self.ids)

    def __contains__(self, vid: VarId) -> bool:
        return vid in self.pos

    def name_of(self, vid: VarId) -> str:
        return self._names[self.pos[vid]]

    def id_by_name(self, name: str) -> VarId | None:
        return self._by_name.get(name)

    def index(self, vid: VarId) -> int:
        try:
            return self.pos[vid]
        except KeyError:
            raise KeyError(f"variable {vid!r} not in table") from None

    def extend(self, extra_ids, extra_weights=None) -> "VarTable":
        """A new table with extra variables appended after the current ones."""
        extra_ids = tuple(extra_ids)
        if extra_weights is None:
            extra_weights = (1,) * len(extra_ids)
        return VarTable(
            self.ids + extra_ids,
            self.weights + tuple(extra_weights),
            n=self.n,
            m=self.m,
            max_jet_order=self.max_jet_order,
        )

    # -- jet structure ---------------------------------------------------

    def jet_indices(self, order: int):
        """All sorted multi-indices of exactly the given order over 1..n."""
        return combinations_with_replacement(range(1, self.n + 1), order)

    def jet_order_of(self, vid: VarId) -> int:
        """0 for x and u variables, |I| for jet variables, 0 for auxiliaries."""
        return len(vid[2]) if vid[0] == JET else 0


def jet_table(n: int, m: int, max_jet_order: int = 3) -> VarTable:
    """The canonical table for the n-independent, m-dependent jet setting."""
    if n < 1 or m < 1:
        raise ValueError("need n >= 1 and m >= 1")
    if max_jet_order < 0:
        raise ValueError("max_jet_order must be nonnegative")
    ids = [x_var(i) for i in range(1, n + 1)]
    ids += [u_var(mu) for mu in range(1, m + 1)]
    for order in range(1, max_jet_order + 1):
        for mu in range(1, m + 1):
            for idx in combinations_with_replacement(range(1, n + 1), order):
                ids.append(jet_var(mu, idx))
    return VarTable(ids, n=n, m=m, max_jet_order=max_jet_order)


def cr_table(n: int) -> VarTable:
    """Variables z_1..z_n, w and their formal conjugates zb_1..zb_n, wb."""
    if n < 1:
        raise ValueError("need n >= 1")
    ids = [(Z, j) for j in range(1, n + 1)]
    ids.append((W,))
    ids += [(ZBAR, j) for j in range(1, n + 1)]
    ids.append((WBAR,))
    return VarTable(ids, n=n)


def conjugate_id(vid: VarId) -> VarId:
    """The formal-conjugation involution on cr_table variables."""
    kind = vid[0]
    if kind == Z:
        return (ZBAR, vid[1])
    if kind == ZBAR:
        return (Z, vid[1])
    if kind == W:
        return (WBAR,)
    if kind == WBAR:
        return (W,)
    raise ValueError(f"variable {vid!r} has no conjugate")
