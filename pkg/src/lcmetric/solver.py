"""Metrizability verdicts.

A form g0 at the base point extends to a parallel metric exactly when every
element of the obstruction space V is g0-skew, i.e. ``A^T g0 + g0 A = 0``.
That is a homogeneous linear system in the entries of g0; the connection is
metrizable when its solution space contains a nondegenerate form.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import singledispatch
from typing import Optional

import numpy as np

from .connection import ConstantConnection, MetricField, generators
from .errors import InvalidInputError
from .lie_algebra import bracket_span, invariant_closure, obstruction_space_exact, soundness_residual
from .lie_group import (
    InvariantConnection,
    curvature_span,
    check_torsion_free,
    generators_lg,
    obstruction_space_lg,
)
from .linalg import (
    DEFAULT_TOL,
    MatrixSubspace,
    Tolerances,
    antisym_residual,
    as_sym_form,
    is_nondegenerate,
    make_rng,
    normalized_det,
    null_space,
    signature,
    sym_basis,
)
from .verify import sample_condition_group, sample_condition_rn, verify_metric

TOOL_VERSION = "0.1.0"
RANDOM_TRIALS = 64
CERTIFY_SEEDS = 3
SOUNDNESS_TOL = 1e-7
SAMPLE_TOL = 1e-7


@dataclass
class Verdict:
    metrizable: bool
    obstruction_dim: int
    solution_dim: int
    representative: Optional[np.ndarray] = None
    signature: Optional[tuple] = None
    residuals: dict = field(default_factory=dict)
    inconsistency: Optional[str] = None
    # diagnostics, not serialized
    obstruction: Optional[MatrixSubspace] = field(default=None, repr=False)
    solutions: Optional[MatrixSubspace] = field(default=None, repr=False)
    basis_signatures: list = field(default_factory=list, repr=False)

    def to_dict(self, seed: int, tool_version: str = TOOL_VERSION) -> dict:
        return {
            "metrizable": self.metrizable,
            "obstruction_dim": self.obstruction_dim,
            "solution_dim": self.solution_dim,
            "representative": None if self.representative is None else self.representative.tolist(),
            "signature": None if self.signature is None else list(self.signature),
            "residuals": {k: float(v) for k, v in self.residuals.items()},
            "inconsistency": self.inconsistency,
            "tool_version": tool_version,
            "seed": int(seed),
        }


def solve_antisym_constraints(v: MatrixSubspace, tol: Tolerances = DEFAULT_TOL) -> MatrixSubspace:
    """Symmetric G with ``A^T G + G A = 0`` for every A in V, as an orthonormal basis."""
    sym = sym_basis(v.n)
    if v.dim == 0:
        return MatrixSubspace(v.n, sym)
    # column a: the constraint images of the a-th symmetric basis element
    images = np.swapaxes(v.basis, -1, -2)[:, None] @ sym[None] + sym[None] @ v.basis[:, None]
    system = images.transpose(0, 2, 3, 1).reshape(-1, len(sym))
    kernel = null_space(system, tol.rank_tol, scale=1.0)
    return MatrixSubspace(v.n, np.einsum("ra,abc->rbc", kernel, sym))


def _canonical(g):
    """Scale to unit spectral radius and flip sign so positive directions dominate."""
    eig = np.linalg.eigvalsh(g)
    g = g / np.max(np.abs(eig))
    if np.sum(eig < 0) > np.sum(eig > 0):
        g = -g
    return (g + g.T) / 2


def _candidates(sol: MatrixSubspace, rng: np.random.Generator):
    basis = sol.basis
    identity = sol.project(np.eye(sol.n))
    if np.linalg.norm(identity) > 0:
        yield identity
    yield from basis
    for a, b in itertools.combinations(range(sol.dim), 2):
        yield basis[a] + basis[b]
        yield basis[a] - basis[b]
    for _ in range(RANDOM_TRIALS):
        coeffs = rng.standard_normal(sol.dim)
        yield np.einsum("r,rab->ab", coeffs / np.linalg.norm(coeffs), basis)


def nondegenerate_representative(sol: MatrixSubspace, tol: Tolerances = DEFAULT_TOL) -> Optional[np.ndarray]:
    """Best-conditioned candidate (largest normalized |det|) from a fixed search order, or None."""
    if sol.dim == 0:
        return None
    best, score = None, 0.0
    for cand in _candidates(sol, make_rng(tol.seed, "representative")):
        value = abs(normalized_det(cand))
        # earlier candidates win ties
        if value > score * (1 + 1e-9):
            best, score = cand, value
    if best is None or score <= tol.det_tol:
        return None
    return _canonical(best)


def _certify_degenerate(sol: MatrixSubspace, tol: Tolerances) -> Optional[np.ndarray]:
    """Second search backing a negative answer: lattice plus three seeded random batches.

    Returns a nondegenerate element if one turns up, otherwise None, which is
    taken as evidence that det vanishes identically on the span.
    """
    if sol.dim == 0:
        return None
    count = sol.n * (sol.n + 1) // 2 + 2
    lattice = [np.power(float(r + 1), np.arange(sol.dim)) for r in range(count)]
    trials = [c / np.linalg.norm(c) for c in lattice]
    for s in range(CERTIFY_SEEDS):
        rng = make_rng(tol.seed + s, f"certify-{s}")
        trials += [c / np.linalg.norm(c) for c in rng.standard_normal((RANDOM_TRIALS, sol.dim))]
    for coeffs in trials:
        cand = np.einsum("r,rab->ab", coeffs, sol.basis)
        if is_nondegenerate(cand, tol):
            return _canonical(cand)
    return None


def _solve(v: MatrixSubspace, tol: Tolerances) -> Verdict:
    sol = solve_antisym_constraints(v, tol)
    rep = nondegenerate_representative(sol, tol)
    if rep is None:
        rep = _certify_degenerate(sol, tol)
    verdict = Verdict(
        metrizable=rep is not None,
        obstruction_dim=v.dim,
        solution_dim=sol.dim,
        representative=rep,
        signature=None if rep is None else signature(rep, tol),
        obstruction=v,
        solutions=sol,
        basis_signatures=[signature((b + b.T) / 2, tol) for b in sol.basis],
    )
    if rep is not None:
        verdict.residuals["constraint"] = float(np.max(antisym_residual(v.basis, rep), initial=0.0))
    return verdict


def _flag(verdict: Verdict, name: str, limit: float) -> None:
    value = verdict.residuals[name]
    if not value < limit:
        note = f"{name}={value:.3g} exceeds {limit:.3g}"
        verdict.inconsistency = note if verdict.inconsistency is None else f"{verdict.inconsistency}; {note}"


def _structural_checks(verdict, letters, seeds, tol, stream):
    v = verdict.obstruction
    verdict.residuals["soundness"] = soundness_residual(letters, seeds, v, make_rng(tol.seed, stream), tol)
    verdict.residuals["sandwich"] = invariant_closure(letters, seeds, tol).contains(v)
    _flag(verdict, "soundness", SOUNDNESS_TOL)
    _flag(verdict, "sandwich", tol.verify_tol)


def analyze(conn: ConstantConnection, tol: Tolerances = DEFAULT_TOL) -> Verdict:
    """Decide whether a constant connection on R^n is a Levi-Civita connection."""
    s = generators(conn, tol)
    v = obstruction_space_exact(s, tol)
    verdict = _solve(v, tol)
    _structural_checks(verdict, s, bracket_span(s, tol), tol, "soundness-rn")
    if verdict.metrizable:
        field_ = MetricField(conn, verdict.representative, tol)
        report = verify_metric(field_, tol)
        verdict.residuals.update(report.as_residuals())
        verdict.residuals["sample_condition"] = sample_condition_rn(conn, verdict.representative, 100, tol)
        _flag(verdict, "constraint", tol.verify_tol)
        for name in report.as_residuals():
            _flag(verdict, name, tol.verify_tol)
        _flag(verdict, "sample_condition", SAMPLE_TOL)
    return verdict


def analyze_lg(conn: InvariantConnection, tol: Tolerances = DEFAULT_TOL) -> Verdict:
    """Decide whether a torsion-free left-invariant connection is a Levi-Civita connection near e."""
    check_torsion_free(conn)
    v = obstruction_space_lg(conn, tol)
    verdict = _solve(v, tol)
    _structural_checks(verdict, generators_lg(conn, tol), curvature_span(conn, tol), tol, "soundness-lg")
    if verdict.metrizable:
        verdict.residuals["sample_condition"] = sample_condition_group(conn, verdict.representative, 50, tol)
        _flag(verdict, "constraint", tol.verify_tol)
        _flag(verdict, "sample_condition", SAMPLE_TOL)
    return verdict


@singledispatch
def obstruction_space(conn, tol: Tolerances = DEFAULT_TOL) -> MatrixSubspace:
    raise InvalidInputError(f"unsupported connection type {type(conn).__name__}")


@obstruction_space.register
def _(conn: ConstantConnection, tol: Tolerances = DEFAULT_TOL) -> MatrixSubspace:
    return obstruction_space_exact(generators(conn, tol), tol)


@obstruction_space.register
def _(conn: InvariantConnection, tol: Tolerances = DEFAULT_TOL) -> MatrixSubspace:
    check_torsion_free(conn)
    return obstruction_space_lg(conn, tol)


def extendable_with(conn, g0, tol: Tolerances = DEFAULT_TOL, v: Optional[MatrixSubspace] = None):
    """Whether g0 extends to a parallel metric; returns ``(answer, max residual)``.

    g0 is scaled to unit spectral radius and tested against the orthonormal
    basis of the obstruction space.  Pass ``v`` to reuse a computed space.
    """
    g0 = as_sym_form(g0, "g0")
    if g0.shape[0] != conn.n:
        raise InvalidInputError("g0 and connection dimensions differ")
    if not is_nondegenerate(g0, tol):
        raise InvalidInputError("g0 is degenerate")
    g0 = g0 / np.max(np.abs(np.linalg.eigvalsh(g0)))
    if v is None:
        v = obstruction_space(conn, tol)
    residual = float(np.max(antisym_residual(v.basis, g0), initial=0.0))
    return residual < tol.verify_tol, residual
