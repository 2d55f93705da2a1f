"""Left-invariant connections on Lie groups.

The Lie algebra is given by structure constants ``c[k, i, j]`` with
``[e_i, e_j] = sum_k c[k, i, j] e_k``; a left-invariant connection by
``gamma[k, i, j]`` with ``Gamma(e_i) e_j = sum_k gamma[k, i, j] e_k``.
Vector fields along a curve are identified with curves in the algebra by left
translation, so transport along ``t -> g exp(tX)`` is ``exp(-t Gamma(X))``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .connection import check_tensor, contract, operators
from .errors import InvalidInputError, SingularMetricError, TorsionError
from .lie_algebra import MAX_WORDS, symmetrized_word_span
from .linalg import (
    DEFAULT_TOL,
    MatrixSubspace,
    Tolerances,
    as_sym_form,
    as_vector,
    commutator,
    is_nondegenerate,
    mat_exp,
    pairs,
    span,
)

JACOBI_TOL = 1e-10
TORSION_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class LieAlgebraStructure:
    c: np.ndarray

    def __post_init__(self):
        c = check_tensor(self.c, "structure constants")
        if not np.array_equal(c, -c.transpose(0, 2, 1)):
            raise InvalidInputError("structure constants must satisfy c[k][i][j] = -c[k][j][i]")
        object.__setattr__(self, "c", c)
        residual = jacobi_residual(self)
        if residual >= JACOBI_TOL:
            raise InvalidInputError(f"structure constants violate the Jacobi identity (residual {residual:.3g})")

    @property
    def n(self) -> int:
        return self.c.shape[0]

    @classmethod
    def abelian(cls, n):
        return cls(np.zeros((n, n, n)))


def ad_ops(alg: LieAlgebraStructure) -> np.ndarray:
    """``ad_{e_i}`` matrices stacked on i."""
    return operators(alg.c)


def jacobi_residual(alg: LieAlgebraStructure) -> float:
    """max |ad_[e_i,e_j] - [ad_i, ad_j]| over basis pairs, i.e. the Jacobi identity."""
    ad = ad_ops(alg)
    lhs = np.einsum("kij,kab->ijab", alg.c, ad)
    rhs = commutator(ad[:, None], ad[None])
    return float(np.max(np.abs(lhs - rhs), initial=0.0))


def bracket(alg: LieAlgebraStructure, x, y) -> np.ndarray:
    return np.einsum("kij,...i,...j->...k", alg.c, x, y)


@dataclass(frozen=True, eq=False)
class InvariantConnection:
    alg: LieAlgebraStructure
    gamma: np.ndarray

    def __post_init__(self):
        gamma = check_tensor(self.gamma, "gamma")
        if gamma.shape[0] != self.alg.n:
            raise InvalidInputError("connection and algebra dimensions differ")
        object.__setattr__(self, "gamma", gamma)

    @property
    def n(self) -> int:
        return self.alg.n


def gamma_op_lg(conn: InvariantConnection, x) -> np.ndarray:
    return contract(conn.gamma, as_vector(x, conn.n))


def torsion(conn: InvariantConnection) -> np.ndarray:
    """``T[k, i, j] = gamma[k, i, j] - gamma[k, j, i] - c[k, i, j]``."""
    return conn.gamma - conn.gamma.transpose(0, 2, 1) - conn.alg.c


def curvature_ops(conn: InvariantConnection) -> np.ndarray:
    """``R[i, j] = [Gamma_i, Gamma_j] - Gamma([e_i, e_j])`` for all basis pairs."""
    ops = operators(conn.gamma)
    return commutator(ops[:, None], ops[None]) - np.einsum("kij,kab->ijab", conn.alg.c, ops)


def curvature_lg(conn: InvariantConnection, i: int, j: int) -> np.ndarray:
    ops = operators(conn.gamma)
    return commutator(ops[i], ops[j]) - np.einsum("k,kab->ab", conn.alg.c[:, i, j], ops)


def check_torsion_free(conn: InvariantConnection) -> None:
    t = torsion(conn)
    if np.max(np.abs(t), initial=0.0) >= TORSION_TOL:
        raise TorsionError(f"connection has torsion (max |T| = {np.max(np.abs(t)):.3g})", t)


def curvature_span(conn: InvariantConnection, tol: Tolerances) -> MatrixSubspace:
    ops = operators(conn.gamma)
    curv = curvature_ops(conn)
    idx = list(pairs(conn.n))
    stack = np.array([curv[i, j] for i, j in idx]).reshape(-1, conn.n, conn.n)
    g = float(np.max(np.linalg.norm(ops, axis=(-2, -1)), initial=0.0))
    scale = g * g + float(np.max(np.abs(conn.alg.c), initial=0.0)) * g
    return span(stack, tol, n=conn.n, scale=scale)


def generators_lg(conn: InvariantConnection, tol: Tolerances = DEFAULT_TOL) -> MatrixSubspace:
    return span(operators(conn.gamma), tol, n=conn.n)


def obstruction_space_lg(conn: InvariantConnection, tol: Tolerances = DEFAULT_TOL, max_words: int = MAX_WORDS) -> MatrixSubspace:
    """Span of ``ad_{Gamma(Z)}^k R(X, Y)`` over X, Y, Z in the algebra and k >= 0."""
    s = generators_lg(conn, tol)
    seeds = curvature_span(conn, tol)
    return symmetrized_word_span(s.basis, seeds.basis, conn.n * conn.n - 1, tol, max_words)


def levi_civita_invariant(alg: LieAlgebraStructure, h, tol: Tolerances = DEFAULT_TOL) -> InvariantConnection:
    """Left-invariant Levi-Civita connection of the left-invariant metric h.

    Koszul formula for left-invariant fields:
    ``2 h(Gamma(X)Y, Z) = h([X,Y],Z) - h([Y,Z],X) + h([Z,X],Y)``.
    """
    h = as_sym_form(h, "h")
    if h.shape[0] != alg.n:
        raise InvalidInputError("metric and algebra dimensions differ")
    if not is_nondegenerate(h, tol):
        raise SingularMetricError("h is degenerate")
    c = alg.c
    lowered = np.einsum("kij,kl->ijl", c, h)  # h([e_i, e_j], e_l)
    koszul = 0.5 * (lowered - lowered.transpose(2, 0, 1) + lowered.transpose(1, 2, 0))
    return InvariantConnection(alg, np.einsum("kl,ijl->kij", np.linalg.inv(h), koszul))


def group_transport(conn: InvariantConnection, x, t: float) -> np.ndarray:
    return mat_exp(-t * gamma_op_lg(conn, x))


def segment_transport(conn: InvariantConnection, segments) -> np.ndarray:
    """Transport along consecutive one-parameter pieces ``g -> g exp(X_s)``.

    ``segments`` is a sequence of algebra vectors (each already scaled by its
    duration); the result is the left-trivialized transport from start to end.
    """
    total = np.eye(conn.n)
    for x in segments:
        total = group_transport(conn, x, 1.0) @ total
    return total
