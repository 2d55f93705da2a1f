import json

import numpy as np
import pytest

from lcmetric import solver
from lcmetric.catalog import algebra
from lcmetric.connection import ConstantConnection
from lcmetric.errors import InvalidInputError
from lcmetric.generate import koszul, noncommuting2, random_commuting, random_symmetric
from lcmetric.lie_group import InvariantConnection, LieAlgebraStructure, levi_civita_invariant
from lcmetric.linalg import MatrixSubspace, antisym_residual, make_rng, random_form, random_invertible, signature
from lcmetric.solver import (
    analyze,
    analyze_lg,
    extendable_with,
    nondegenerate_representative,
    obstruction_space,
    solve_antisym_constraints,
)

from conftest import ROT, brute_solutions, subspace

OFFDIAG = np.array([[0.0, 1.0], [1.0, 0.0]])


# solve_antisym_constraints

def test_solve_unconstrained():
    assert solve_antisym_constraints(MatrixSubspace.zero(2)).dim == 3


def test_solve_rotation():
    sol = solve_antisym_constraints(subspace(ROT))
    assert sol.dim == 1
    assert sol.residual(np.eye(2)) < 1e-14


def test_solve_diagonal_generator():
    # (A^T G + G A)_ij = (a_i + a_j) G_ij with a = (1, -1) kills both diagonal entries
    v = subspace(np.diag([1.0, -1.0]))
    assert brute_solutions(v) == 1
    sol = solve_antisym_constraints(v)
    assert sol.dim == 1
    assert sol.residual(OFFDIAG) < 1e-14
    assert sol.residual(np.diag([1.0, -1.0])) > 0.99


def test_solve_against_brute_force():
    rng = make_rng(0, "solve-brute")
    for _ in range(40):
        n = int(rng.integers(2, 5))
        p = int(rng.integers(0, n + 1))
        g0 = random_form(rng, p, n - p)
        # V inside so(g0) so the system has a nondegenerate solution, plus a random extra sometimes
        count = int(rng.integers(0, 3))
        mats = []
        for _ in range(count):
            k = rng.standard_normal((n, n))
            mats.append(np.linalg.solve(g0, k - k.T))
        if rng.uniform() < 0.3:
            mats.append(rng.standard_normal((n, n)))
        v = subspace(*mats, n=n)
        sol = solve_antisym_constraints(v)
        assert sol.dim == brute_solutions(v)
        for b in sol.basis:
            assert np.max(antisym_residual(v.basis, b), initial=0) < 1e-9
            assert np.array_equal(b, b.T) or np.max(np.abs(b - b.T)) < 1e-15


def test_solution_dim_monotone():
    rng = make_rng(1, "monotone")
    for _ in range(20):
        n = int(rng.integers(2, 5))
        mats = list(rng.standard_normal((3, n, n)))
        dims = [solve_antisym_constraints(subspace(*mats[:k], n=n)).dim for k in range(4)]
        assert dims == sorted(dims, reverse=True)


# nondegenerate_representative

def test_representative_identity():
    rep = nondegenerate_representative(subspace(np.eye(2)))
    np.testing.assert_allclose(rep, np.eye(2), atol=1e-15)


def test_representative_diagonal_pair():
    rep = nondegenerate_representative(subspace(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])))
    assert rep is not None
    assert np.allclose(rep, np.diag(np.diag(rep)))
    np.testing.assert_allclose(rep, np.eye(2), atol=1e-14)


def test_representative_none_when_rank_one():
    assert nondegenerate_representative(subspace(np.diag([1.0, 0.0]))) is None
    assert solver._certify_degenerate(subspace(np.diag([1.0, 0.0])), solver.DEFAULT_TOL) is None


def test_certification_finds_hidden_nondegenerate_form():
    # every basis element and pairwise sum is degenerate, but some combination is not
    e = [np.zeros((3, 3)) for _ in range(3)]
    e[0][0, 0] = e[1][1, 1] = e[2][2, 2] = 1.0
    sol = subspace(*e)
    assert nondegenerate_representative(sol) is not None


# analyze

@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_analyze_zero(n):
    v = analyze(ConstantConnection.zero(n))
    assert v.metrizable and v.inconsistency is None
    assert v.solution_dim == n * (n + 1) // 2
    np.testing.assert_allclose(v.representative, np.eye(n), atol=1e-14)
    assert v.signature == (n, 0, 0)


def test_analyze_commuting(commuting):
    v = analyze(commuting)
    assert v.metrizable and v.inconsistency is None
    assert v.obstruction_dim == 0 and v.solution_dim == 3


def test_analyze_noncommuting(noncommuting):
    v = analyze(noncommuting)
    assert not v.metrizable and v.inconsistency is None
    assert v.obstruction.residual(np.array([[0.0, -1.0], [0.0, 0.0]])) < 1e-12
    # the only solutions are degenerate multiples of diag(0, 1)-type forms
    assert all(s[2] > 0 for s in v.basis_signatures)


def test_analyze_random_symmetric_is_not_metrizable():
    rng = make_rng(2, "random-sym")
    for n in (2, 3):
        v = analyze(random_symmetric(rng, n))
        assert not v.metrizable and v.obstruction_dim == n * n - 1


def test_verdict_invariant_under_coordinate_change():
    rng = make_rng(3, "coords")
    conns = [random_commuting(rng, 3), random_symmetric(rng, 3), random_commuting(rng, 2), noncommuting2()]
    for conn in conns:
        base = analyze(conn)
        for _ in range(5):
            l = random_invertible(rng, conn.n, cond=float(rng.uniform(1, 99)))
            moved = analyze(ConstantConnection.symmetrized(conn.transformed(l).gamma))
            assert moved.metrizable == base.metrizable
            assert moved.solution_dim == base.solution_dim


def test_extendable_with_representative():
    rng = make_rng(4, "self")
    for _ in range(10):
        conn = random_commuting(rng, int(rng.integers(2, 5)))
        v = analyze(conn)
        ok, residual = extendable_with(conn, v.representative)
        assert ok and residual < 1e-9


def test_extendable_with_examples():
    rng = make_rng(5, "ext")
    zero = ConstantConnection.zero(2)
    for _ in range(5):
        p = int(rng.integers(0, 3))
        assert extendable_with(zero, random_form(rng, p, 2 - p))[0]
    rot = subspace(ROT)
    ok, res = extendable_with(zero, np.eye(2), v=rot)
    assert ok and res == 0
    ok, res = extendable_with(zero, np.diag([1.0, -1.0]), v=rot)
    assert not ok and res == pytest.approx(2.0, rel=1e-14)


def test_extendable_with_real_rotation_instance():
    """The Levi-Civita connection of h = I on the 2-dim nonabelian algebra has V = span{rotation}."""
    conn = levi_civita_invariant(algebra("aff2"), np.eye(2))
    v = obstruction_space(conn)
    assert v.dim == 1 and v.residual(ROT) < 1e-12
    assert extendable_with(conn, np.eye(2))[0]
    ok, res = extendable_with(conn, np.diag([1.0, -1.0]))
    assert not ok and res == pytest.approx(2.0, rel=1e-12)


def test_extendable_with_rejects_degenerate():
    with pytest.raises(InvalidInputError):
        extendable_with(ConstantConnection.zero(2), np.diag([1.0, 0.0]))


# verdict document

def test_verdict_fields(commuting):
    doc = analyze(commuting).to_dict(seed=0)
    assert list(doc) == [
        "metrizable",
        "obstruction_dim",
        "solution_dim",
        "representative",
        "signature",
        "residuals",
        "inconsistency",
        "tool_version",
        "seed",
    ]
    json.dumps(doc, allow_nan=False)


def test_verdict_deterministic():
    rng = make_rng(6, "det")
    conn = random_commuting(rng, 4)
    a = json.dumps(analyze(conn).to_dict(0))
    b = json.dumps(analyze(conn).to_dict(0))
    assert a == b


def test_inconsistency_flagged_when_v_is_too_small(monkeypatch, noncommuting):
    """A truncated V must be caught by the soundness check, not reported as a clean verdict."""
    monkeypatch.setattr(solver, "obstruction_space_exact", lambda s, tol: MatrixSubspace.zero(s.n))
    v = analyze(noncommuting)
    assert v.inconsistency is not None
    assert v.residuals["soundness"] >= solver.SOUNDNESS_TOL
    assert "soundness" in v.inconsistency


def test_analyze_lg_abelian():
    conn = InvariantConnection(LieAlgebraStructure.abelian(3), np.zeros((3, 3, 3)))
    v = analyze_lg(conn)
    assert v.metrizable and v.solution_dim == 6


def test_koszul_signatures_are_recovered():
    rng = make_rng(7, "koszul-sig")
    for name, p, q in [("heisenberg", 2, 1), ("so3", 3, 0), ("sl2", 1, 2), ("aff2", 1, 1)]:
        conn, h = koszul(name, p, q, rng, n=p + q)
        v = analyze_lg(conn)
        assert v.metrizable and v.inconsistency is None
        assert extendable_with(conn, h)[0]
        if v.solution_dim == 1:
            # h and -h share a Levi-Civita connection; the representative is scaled so p >= q
            assert signature(v.representative) == (max(p, q), min(p, q), 0)
            ratio = v.representative / h
            assert np.allclose(ratio, ratio.flat[0], rtol=1e-8)
