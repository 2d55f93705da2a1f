"""Constant symmetric connections on R^n.

A connection ``nabla_X Y = dY(X) + Gamma(X, Y)`` is stored as the coefficient
tensor ``gamma[k, i, j]`` with ``Gamma(e_i, e_j) = sum_k gamma[k, i, j] e_k``.
Parallel transport along the ray ``t -> t v`` is ``exp(-t Gamma(v))`` and the
curvature is the commutator ``[Gamma(v), Gamma(w)]``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, SingularMetricError
from .linalg import (
    DEFAULT_TOL,
    MAX_DIM,
    MatrixSubspace,
    Tolerances,
    as_sym_form,
    as_vector,
    check_finite,
    commutator,
    is_nondegenerate,
    mat_exp,
    span,
)


def check_tensor(t, what="coefficient tensor"):
    t = check_finite(t, what)
    if t.ndim != 3 or len(set(t.shape)) != 1:
        raise InvalidInputError(f"{what} must have shape (n, n, n), got {t.shape}")
    if not 1 <= t.shape[0] <= MAX_DIM:
        raise InvalidInputError(f"dimension {t.shape[0]} outside 1..{MAX_DIM}")
    t = t.copy()
    t.setflags(write=False)
    return t


def operators(gamma: np.ndarray) -> np.ndarray:
    """The matrices Gamma(e_i) as a stack indexed by i: ``ops[i][k, j] = gamma[k, i, j]``."""
    return np.ascontiguousarray(gamma.transpose(1, 0, 2))


def contract(gamma: np.ndarray, v) -> np.ndarray:
    """Gamma(v) = sum_i v_i Gamma(e_i); v may carry leading batch axes."""
    return np.einsum("kij,...i->...kj", gamma, v)


@dataclass(frozen=True, eq=False)
class ConstantConnection:
    gamma: np.ndarray

    def __post_init__(self):
        gamma = check_tensor(self.gamma, "gamma")
        if not np.array_equal(gamma, gamma.transpose(0, 2, 1)):
            raise InvalidInputError("gamma[k][i][j] must equal gamma[k][j][i] (torsion-free connection)")
        object.__setattr__(self, "gamma", gamma)

    @property
    def n(self) -> int:
        return self.gamma.shape[0]

    @classmethod
    def zero(cls, n):
        return cls(np.zeros((n, n, n)))

    @classmethod
    def symmetrized(cls, gamma):
        gamma = np.asarray(gamma, dtype=float)
        return cls((gamma + gamma.transpose(0, 2, 1)) / 2)

    def transformed(self, basis) -> "ConstantConnection":
        """Coefficients in the frame given by the columns of ``basis`` (a (1,2)-tensor change)."""
        basis = np.asarray(basis, dtype=float)
        inv = np.linalg.inv(basis)
        return ConstantConnection.symmetrized(np.einsum("ka,abc,bi,cj->kij", inv, self.gamma, basis, basis))


def gamma_op(conn: ConstantConnection, v) -> np.ndarray:
    return contract(conn.gamma, as_vector(v, conn.n))


def generators(conn: ConstantConnection, tol: Tolerances = DEFAULT_TOL) -> MatrixSubspace:
    """The range S of v -> Gamma(v) as a matrix subspace."""
    return span(operators(conn.gamma), tol, n=conn.n)


def curvature_op(conn: ConstantConnection, v, w) -> np.ndarray:
    return commutator(gamma_op(conn, v), gamma_op(conn, w))


def ray_transport(conn: ConstantConnection, v, t: float) -> np.ndarray:
    return mat_exp(-t * gamma_op(conn, v))


@dataclass(frozen=True, eq=False)
class MetricField:
    """Metric obtained by spreading g0 from the origin with ray transport."""

    conn: ConstantConnection
    g0: np.ndarray
    tol: Tolerances = DEFAULT_TOL

    def __post_init__(self):
        g0 = as_sym_form(self.g0, "g0")
        if g0.shape[0] != self.conn.n:
            raise InvalidInputError("g0 and connection dimensions differ")
        if not is_nondegenerate(g0, self.tol):
            raise SingularMetricError("g0 is degenerate")
        g0 = g0.copy()
        g0.setflags(write=False)
        object.__setattr__(self, "g0", g0)


def spread_metric(field: MetricField, x) -> np.ndarray:
    """``E^T G0 E`` with ``E = exp(Gamma(x))``; accepts a batch of points."""
    x = as_vector(x, field.conn.n, "point")
    e = mat_exp(contract(field.conn.gamma, x))
    g = np.swapaxes(e, -1, -2) @ field.g0 @ e
    return (g + np.swapaxes(g, -1, -2)) / 2


def metric_derivatives(field: MetricField, x, h: float) -> np.ndarray:
    """``d[..., k, i, j] = d g_ij / d x_k`` by central differences with one Richardson step."""
    x = as_vector(x, field.conn.n, "point")
    n = field.conn.n
    steps = np.eye(n)

    def central(step):
        fwd = spread_metric(field, x[..., None, :] + step * steps)
        bwd = spread_metric(field, x[..., None, :] - step * steps)
        return (fwd - bwd) / (2 * step)

    return (4 * central(h / 2) - central(h)) / 3


def predicted_derivatives(conn: ConstantConnection, g) -> np.ndarray:
    """Derivatives a parallel metric must have: ``Gamma_k^T g + g Gamma_k`` for each k."""
    ops = operators(conn.gamma)
    g = np.asarray(g)[..., None, :, :]
    return np.swapaxes(ops, -1, -2) @ g + g @ ops


def compatibility_residual(field: MetricField, x, tol: Tolerances = DEFAULT_TOL):
    """Max |FD derivative - connection terms| over i, j, k; one value per point."""
    g = spread_metric(field, x)
    diff = metric_derivatives(field, x, tol.fd_step) - predicted_derivatives(field.conn, g)
    return np.max(np.abs(diff), axis=(-3, -2, -1))


def christoffels_from_metric(field: MetricField, x, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Christoffel symbols ``[k, i, j]`` of the spread metric at x, from the coordinate Koszul formula."""
    g = spread_metric(field, x)
    if not np.all([is_nondegenerate(m, tol) for m in np.reshape(g, (-1,) + g.shape[-2:])]):
        raise SingularMetricError("spread metric is degenerate at the requested point")
    dg = metric_derivatives(field, x, tol.fd_step)  # dg[..., a, b, c] = d_a g_bc
    # first[..., i, j, l] = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)
    first = 0.5 * (dg + np.swapaxes(dg, -3, -2) - np.moveaxis(dg, -3, -1))
    return np.einsum("...kl,...ijl->...kij", np.linalg.inv(g), first)
