from random import Random

from jetsym.linalg import LinearSystemExact, express_in_span, solve_linear_exact, sparse_rank
from jetsym.scalars import GaussScalar, I, ONE, ZERO

from helpers import random_scalar


def G(x):
    return GaussScalar(x)


def test_identity_system():
    sys = LinearSystemExact([[G(1), G(0)], [G(0), G(1)]], [ONE, I])
    res = solve_linear_exact(sys)
    assert res.consistent
    assert res.particular == [ONE, I]
    assert res.nullspace == []


def test_rank_deficient_solution():
    sys = LinearSystemExact([[G(1), G(1)], [G(2), G(2)]], [G(3), G(6)])
    res = solve_linear_exact(sys)
    assert res.consistent
    assert res.particular == [G(3), ZERO]
    assert res.nullspace == [[G(-1), ONE]]


def test_inconsistent_reports_offending_row():
    sys = LinearSystemExact([[G(1), G(1)], [G(2), G(2)]], [G(3), G(5)])
    res = solve_linear_exact(sys)
    assert not res.consistent
    assert res.inconsistent_row == 1
    assert "row 2" in res.message()


def test_solution_properties_random():
    rng = Random(4242)
    for _ in range(100):
        nrows = rng.randint(1, 5)
        ncols = rng.randint(1, 5)
        rows = [[random_scalar(rng, span=3) for _ in range(ncols)] for _ in range(nrows)]
        x_true = [random_scalar(rng, span=2) for _ in range(ncols)]
        rhs = []
        for row in rows:
            acc = ZERO
            for a, b in zip(row, x_true):
                acc = acc + a * b
            rhs.append(acc)
        sys = LinearSystemExact([list(r) for r in rows], rhs, ncols=ncols)
        res = solve_linear_exact(sys)
        assert res.consistent  # constructed to be solvable
        assert all(v.is_zero() for v in sys.residual(res.particular))
        for vec in res.nullspace:
            assert all(v.is_zero() for v in sys.residual([a + b for a, b in zip(res.particular, vec)]))
        assert res.rank + len(res.nullspace) == ncols


def test_sparse_rank():
    rows = [{0: ONE, 1: ONE}, {0: G(2), 1: G(2)}, {1: ONE}]
    assert sparse_rank(rows) == 2
    assert sparse_rank([]) == 0


def test_express_in_span():
    basis = [{0: ONE, 1: ONE}, {1: ONE}]
    target = {0: G(2), 1: G(5)}
    coords = express_in_span(basis, target)
    assert coords == [G(2), G(3)]
    assert express_in_span(basis, {2: ONE}) is None
