from random import Random

import pytest

from jetsym.determining import (
    ETA,
    THETA,
    InconsistentLayerError,
    InitialData,
    TruncationOrderError,
    UnknownCoefficientField,
    generate_determining,
    initial_data_of,
    omega_basis,
    solve_second_order,
    symmetry_algebra,
    taylor_from_initial_data,
)
from jetsym.jets import JetContext, PDESystem
from jetsym.lie_alg import flat_generators, span_equal
from jetsym.poly import Poly
from jetsym.prolong import VectorField, lie_criterion_check
from jetsym.rings import COEF, u_var, x_var, zeta_var
from jetsym.scalars import GaussScalar, ONE, ZERO
from jetsym.segre import DefiningSeries, Signature, defining_table, segre_system


def flat_system(n, m):
    return PDESystem(JetContext.create(n, m))


def perturbed_segre_system(order=6):
    table = defining_table(1)
    R = Poly.var(table, x_var(1)) ** 2 * Poly.var(table, zeta_var(1)) ** 2
    return segre_system(DefiningSeries(Signature((1,)), R), order=order)


# -- generation ---------------------------------------------------------------


def test_classical_equations_flat_11():
    sys_ = flat_system(1, 1)
    field = UnknownCoefficientField(sys_.ctx, 2)
    det = generate_determining(sys_, field)
    assert field.unknown_count() == 12
    assert det.row_count == 4

    def cid(func, alpha):
        return field.col[(COEF, func, alpha)]

    two = GaussScalar(2)
    # normalized expected rows, keyed by the jet monomial degree of p = u^1_1
    expected = {
        0: {cid((ETA, 1), (2, 0)): two},                                # eta_xx = 0
        1: {cid((THETA, 1), (2, 0)): -two, cid((ETA, 1), (1, 1)): two},  # 2 eta_xu - theta_xx = 0
        2: {cid((THETA, 1), (1, 1)): -two, cid((ETA, 1), (0, 2)): two},  # eta_uu - 2 theta_xu = 0
        3: {cid((THETA, 1), (0, 2)): -two},                              # theta_uu = 0
    }
    seen = {}
    for row, prov in zip(det.rows, det.provenance):
        assert (prov.mu, prov.i, prov.j) == (1, 1, 1)
        assert prov.xu_degree == 0
        seen[prov.jet_degree] = row
    assert seen == expected


def test_row_layering_flat_11_order_3():
    # order 3 adds the differentiated layer: 4 rows at (x,u)-degree 0 and
    # 8 rows at degree 1, pinning all 8 third-order Taylor coefficients
    sys_ = flat_system(1, 1)
    field = UnknownCoefficientField(sys_.ctx, 3)
    det = generate_determining(sys_, field)
    by_degree = {}
    for prov in det.provenance:
        by_degree[prov.xu_degree] = by_degree.get(prov.xu_degree, 0) + 1
    assert by_degree == {0: 4, 1: 8}


def test_zero_ansatz_satisfies_all_rows():
    sys_ = flat_system(2, 1)
    field = UnknownCoefficientField(sys_.ctx, 3)
    det = generate_determining(sys_, field)
    zero_vec = [ZERO] * field.unknown_count()
    assert all(v.is_zero() for v in det.system.residual(zero_vec))


def test_unknown_count_formula():
    for n, m, order in [(1, 1, 2), (1, 1, 3), (2, 1, 3), (2, 2, 3)]:
        ctx = JetContext.create(n, m)
        field = UnknownCoefficientField(ctx, order)
        q = n + m
        monomials = 1
        # number of monomials of degree <= order in q variables: C(q+order, order)
        from math import comb

        assert field.unknown_count() == q * comb(q + order, order)


def test_truncation_too_small_rejected():
    sys_ = perturbed_segre_system(order=3)
    field = UnknownCoefficientField(sys_.ctx, 3)
    with pytest.raises(TruncationOrderError):
        generate_determining(sys_, field)


# -- solve_second_order ----------------------------------------------------------


def test_solve_second_order_flat():
    sys_ = flat_system(1, 1)
    field = UnknownCoefficientField(sys_.ctx, 2)
    det = generate_determining(sys_, field)
    forms = solve_second_order(det)
    th, et = (THETA, 1), (ETA, 1)
    half = GaussScalar(1) / GaussScalar(2)
    assert forms[(et, (2, 0))] == {}                       # eta_xx = 0
    assert forms[(th, (0, 2))] == {}                       # theta_uu = 0
    assert forms[(et, (1, 1))] == {(th, (2, 0)): half}     # eta_xu = theta_xx / 2
    assert forms[(et, (0, 2))] == {(th, (1, 1)): GaussScalar(2)}  # eta_uu = 2 theta_xu
    # gamma components map to themselves
    assert forms[(th, (2, 0))] == {(th, (2, 0)): ONE}
    assert forms[(th, (1, 1))] == {(th, (1, 1)): ONE}


def test_solve_second_order_zero_data_gives_zero():
    sys_ = flat_system(2, 1)
    field = UnknownCoefficientField(sys_.ctx, 2)
    forms = solve_second_order(generate_determining(sys_, field))
    # with gamma = 0 and all lower data 0 every second derivative vanishes
    for form in forms.values():
        value = ZERO
        for _, coeff in form.items():
            value = value + coeff * ZERO
        assert value.is_zero()


def test_solve_second_order_consistent_with_actual_symmetries():
    # For any flat symmetry, its second derivatives at 0 must satisfy the
    # affine forms evaluated on its own lower-order data.
    rng = Random(64)
    for n, m in [(1, 1), (2, 2)]:
        sys_ = flat_system(n, m)
        field = UnknownCoefficientField(sys_.ctx, 2)
        forms = solve_second_order(generate_determining(sys_, field))
        gens = flat_generators(n, m, sys_.ctx).fields
        wvars = [x_var(i) for i in range(1, n + 1)] + [u_var(mu) for mu in range(1, m + 1)]

        def deriv(X, func, beta):
            f = X.theta[func[1] - 1] if func[0] == THETA else X.eta[func[1] - 1]
            for v, e in zip(wvars, beta):
                for _ in range(e):
                    f = f.differentiate(v)
            return f.evaluate({})

        for _ in range(10):
            X = VectorField.zero(sys_.ctx)
            for g in gens:
                X = X + g.scale(GaussScalar(rng.randint(-2, 2)))
            for (func, beta), form in forms.items():
                got = ZERO
                for (pfunc, pbeta), coeff in form.items():
                    got = got + coeff * deriv(X, pfunc, pbeta)
                assert got == deriv(X, func, beta)


def test_symmetry_algebra_minimal_order():
    sys_ = flat_system(1, 1)
    alg = symmetry_algebra(sys_, order=2)
    assert alg.dimension == 8
    assert span_equal(alg.basis, list(flat_generators(1, 1, sys_.ctx)))


def test_segre_hyperquadric_second_order_matches_flat():
    sig = Signature((1,))
    seg = segre_system(DefiningSeries(sig), order=6)
    flat = flat_system(1, 1)
    f1 = UnknownCoefficientField(seg.ctx, 2)
    f2 = UnknownCoefficientField(flat.ctx, 2)
    forms_seg = solve_second_order(generate_determining(seg, f1))
    forms_flat = solve_second_order(generate_determining(flat, f2))
    assert forms_seg == forms_flat


# -- taylor recursion ----------------------------------------------------------


def test_taylor_translation():
    sys_ = flat_system(1, 1)
    om = InitialData.zero(1, 1)
    om = InitialData(om.alpha, om.beta, om.gamma, om.delta, (ONE,))
    X = taylor_from_initial_data(sys_, om, order=3)
    assert X.theta[0] == sys_.ctx.const(1)
    assert X.eta[0].is_zero()


def test_taylor_gamma_slice_builds_projective_field():
    sys_ = flat_system(1, 1)
    om = InitialData.zero(1, 1)
    om = InitialData(om.alpha, om.beta, (GaussScalar(2), ZERO), om.delta, om.epsilon)
    X = taylor_from_initial_data(sys_, om, order=3)
    ctx = sys_.ctx
    assert X.theta[0] == ctx.x(1) * ctx.x(1)
    assert X.eta[0] == ctx.x(1) * ctx.u(1)


def test_taylor_zero_data_zero_field():
    for sys_ in (flat_system(1, 1), flat_system(2, 1), perturbed_segre_system()):
        n, m = sys_.ctx.n, sys_.ctx.m
        X = taylor_from_initial_data(sys_, InitialData.zero(n, m), order=3)
        assert X.is_zero()


def test_taylor_round_trip_flat_generators():
    for n, m in [(1, 1), (2, 1)]:
        sys_ = flat_system(n, m)
        for X in flat_generators(n, m, sys_.ctx):
            om = initial_data_of(X)
            assert taylor_from_initial_data(sys_, om, order=3) == X


def test_taylor_at_nonzero_point():
    sys_ = flat_system(1, 1)
    ctx = sys_.ctx
    pt = {x_var(1): GaussScalar(1), u_var(1): GaussScalar(-2)}
    X = VectorField(ctx, (ctx.x(1) * ctx.x(1),), (ctx.x(1) * ctx.u(1),))
    om = initial_data_of(X, pt)
    assert taylor_from_initial_data(sys_, om, order=3, point=pt) == X


def test_taylor_rejects_inconsistent_layer_data():
    # A non-involutive system makes the recursion contradict itself; with
    # d theta_1 / dx_1 = 1 the contradiction surfaces in the third layer.
    ctx = JetContext.create(2, 1)
    bad = PDESystem(ctx, {(1, 1, 1): ctx.x(2)})
    om = InitialData.zero(2, 1)
    om = InitialData(((ONE, ZERO, ZERO), om.alpha[1]), om.beta, om.gamma, om.delta, om.epsilon)
    with pytest.raises(InconsistentLayerError) as err:
        taylor_from_initial_data(bad, om, order=3)
    assert err.value.layer == 3


# -- symmetry_algebra ------------------------------------------------------------


def test_flat_dimensions_small():
    for (n, m), dim in [((1, 1), 8), ((2, 1), 15), ((1, 2), 15)]:
        sys_ = flat_system(n, m)
        alg = symmetry_algebra(sys_, order=3)
        assert alg.dimension == dim
        assert span_equal(alg.basis, list(flat_generators(n, m, sys_.ctx)))


def test_dimension_bound_perturbed():
    sys_ = perturbed_segre_system()
    alg = symmetry_algebra(sys_, order=3)
    assert alg.dimension <= InitialData.dimension(1, 1)
    # basis fields satisfy the criterion up to the honest truncation degree:
    # surviving residual terms stem from the dropped Taylor tail and all
    # have (x, u) degree above order - 2
    from jetsym import rings

    for X in alg.basis:
        for r in lie_criterion_check(X, sys_).values():
            for mono in r.terms:
                xu = sum(
                    e
                    for p, e in mono
                    if sys_.ctx.table.ids[p][0] in (rings.X, rings.U)
                )
                assert xu > 3 - 2
    # and round-trip through their own initial data
    for X in alg.basis:
        assert taylor_from_initial_data(sys_, initial_data_of(X), order=3) == X


def test_injectivity_flat_basis_round_trip():
    sys_ = flat_system(1, 1)
    alg = symmetry_algebra(sys_, order=3)
    for X in alg.basis:
        om = initial_data_of(X)
        assert taylor_from_initial_data(sys_, om, order=3) == X


def test_oracle_equivalence_flat():
    for n, m in [(1, 1), (2, 1)]:
        sys_ = flat_system(n, m)
        alg = symmetry_algebra(sys_, order=3)
        field = UnknownCoefficientField(sys_.ctx, 3)
        det = generate_determining(sys_, field)
        recursed = [
            taylor_from_initial_data(sys_, om, order=3, det=det)
            for om in omega_basis(n, m)
        ]
        assert span_equal(recursed, alg.basis)


def test_stability_in_order():
    sys_ = flat_system(1, 1)
    assert symmetry_algebra(sys_, order=3).dimension == 8
    assert symmetry_algebra(sys_, order=4).dimension == 8


def test_symmetry_algebra_at_point():
    sys_ = flat_system(1, 1)
    pt = {x_var(1): GaussScalar(2), u_var(1): GaussScalar(1)}
    alg = symmetry_algebra(sys_, order=3, point=pt)
    assert alg.dimension == 8
    assert span_equal(alg.basis, list(flat_generators(1, 1, sys_.ctx)))


# -- initial data plumbing ---------------------------------------------------------


def test_initial_data_flat_round_trip():
    rng = Random(31415)
    for n, m in [(1, 1), (2, 2)]:
        dim = InitialData.dimension(n, m)
        values = [GaussScalar(rng.randint(-3, 3)) for _ in range(dim)]
        om = InitialData.from_flat(values, n, m)
        assert om.flat() == values


def test_initial_data_length_check():
    with pytest.raises(ValueError):
        InitialData.from_flat([ZERO] * 7, 1, 1)


def test_initial_data_of_projective_field():
    ctx = JetContext.create(1, 1)
    X = VectorField(ctx, (ctx.x(1) * ctx.x(1),), (ctx.x(1) * ctx.u(1),))
    om = initial_data_of(X)
    assert om.gamma == (GaussScalar(2), ZERO)
    assert om.alpha == ((ZERO, ZERO),)
    assert om.beta == ((ZERO, ZERO),)
    assert om.delta == (ZERO,)
    assert om.epsilon == (ZERO,)
