"""Polynomial 2-forms: closedness and the relation d(omega) = 1/2 Alt(nabla omega).

A nondegenerate 2-form admits a compatible symmetric connection only when it
is closed.  Coefficients are sparse polynomials, so ``d omega`` is computed by
exact differentiation and closedness is a coefficient test.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .connection import ConstantConnection
from .errors import InvalidInputError, NotSupportedError
from .linalg import DEFAULT_TOL, MAX_DIM, Tolerances, is_nondegenerate

MAX_DEGREE = 8


class Poly:
    """Sparse polynomial in n variables, stored as ``{exponent tuple: coefficient}``."""

    __slots__ = ("n", "terms")

    def __init__(self, n, terms=None):
        self.n = n
        self.terms = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != n or min(exps, default=0) < 0:
                raise InvalidInputError(f"bad exponent vector {exps} for {n} variables")
            if coeff != 0:
                self.terms[exps] = self.terms.get(exps, 0) + coeff
        self.terms = {e: c for e, c in self.terms.items() if c != 0}

    @classmethod
    def constant(cls, n, value):
        return cls(n, {(0,) * n: value})

    def __neg__(self):
        return Poly(self.n, {e: -c for e, c in self.terms.items()})

    def __add__(self, other):
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return Poly(self.n, out)

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        return isinstance(other, Poly) and self.n == other.n and self.terms == other.terms

    def __repr__(self):
        return f"Poly({self.n}, {self.terms})"

    @property
    def degree(self):
        return max((sum(e) for e in self.terms), default=0)

    def diff(self, i):
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                lowered = e[:i] + (e[i] - 1,) + e[i + 1 :]
                out[lowered] = out.get(lowered, 0) + e[i] * c
        return Poly(self.n, out)

    def max_abs_coeff(self):
        return max((abs(c) for c in self.terms.values()), default=0)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        total = np.zeros(x.shape[:-1])
        for e, c in self.terms.items():
            total = total + float(c) * np.prod(x ** np.array(e), axis=-1)
        return total


@dataclass(frozen=True, eq=False)
class PolyTwoForm:
    """Antisymmetric matrix of polynomials; ``omega[(i, j)]`` is stored for i < j only."""

    n: int
    omega: dict

    def __post_init__(self):
        if not 1 <= self.n <= MAX_DIM:
            raise InvalidInputError(f"dimension {self.n} outside 1..{MAX_DIM}")
        for (i, j), p in self.omega.items():
            if not 0 <= i < j < self.n:
                raise InvalidInputError(f"component ({i}, {j}) must satisfy 0 <= i < j < n")
            if p.n != self.n:
                raise InvalidInputError("polynomial arity differs from form dimension")
            if p.degree > MAX_DEGREE:
                raise InvalidInputError(f"component ({i}, {j}) has degree {p.degree} > {MAX_DEGREE}")

    @classmethod
    def from_components(cls, n, components):
        """Build from ``{(i, j): Poly}`` with any index order; both orders must agree exactly."""
        omega = {}
        for (i, j), p in components.items():
            if i == j:
                if p.terms:
                    raise InvalidInputError(f"diagonal component ({i}, {i}) must vanish")
                continue
            key, value = ((i, j), p) if i < j else ((j, i), -p)
            if key in omega and omega[key] != value:
                raise InvalidInputError(f"components ({i}, {j}) and ({j}, {i}) are not negatives of each other")
            omega[key] = value
        return cls(n, omega)

    @classmethod
    def constant(cls, matrix):
        matrix = np.asarray(matrix, dtype=float)
        n = matrix.shape[0]
        if not np.array_equal(matrix, -matrix.T):
            raise InvalidInputError("constant 2-form matrix must be antisymmetric")
        return cls(n, {(i, j): Poly.constant(n, matrix[i, j]) for i in range(n) for j in range(i + 1, n)})

    def component(self, i, j) -> Poly:
        if i == j:
            return Poly(self.n)
        if i < j:
            return self.omega.get((i, j), Poly(self.n))
        return -self.omega.get((j, i), Poly(self.n))

    @property
    def degree(self):
        return max((p.degree for p in self.omega.values()), default=0)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[:-1] + (self.n, self.n))
        for (i, j), p in self.omega.items():
            value = p(x)
            out[..., i, j] = value
            out[..., j, i] = -value
        return out


def exterior_derivative(w: PolyTwoForm) -> dict:
    """``{(i, j, k): d_i w_jk - d_j w_ik + d_k w_ij}`` for i < j < k."""
    out = {}
    for i, j, k in itertools.combinations(range(w.n), 3):
        out[(i, j, k)] = w.component(j, k).diff(i) - w.component(i, k).diff(j) + w.component(i, j).diff(k)
    return out


def exterior_derivative_max_coeff(w: PolyTwoForm):
    """Largest |coefficient| in d(omega); zero exactly when omega is closed."""
    return max((p.max_abs_coeff() for p in exterior_derivative(w).values()), default=0)


def _perm_sign(perm):
    sign = 1
    perm = list(perm)
    for a in range(len(perm)):
        for b in range(a + 1, len(perm)):
            if perm[a] > perm[b]:
                sign = -sign
    return sign


def d_omega_values(w: PolyTwoForm, x) -> np.ndarray:
    """Full alternating tensor ``(d omega)_{abc}`` at the points x, from the exact polynomials."""
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape[:-1] + (w.n,) * 3)
    for (i, j, k), p in exterior_derivative(w).items():
        value = p(x)
        for perm in itertools.permutations(range(3)):
            idx = tuple((i, j, k)[q] for q in perm)
            out[(...,) + idx] = _perm_sign(perm) * value
    return out


def alternator(t: np.ndarray) -> np.ndarray:
    """Signed sum over all permutations of the last three slots (no 1/3! factor)."""
    out = np.zeros_like(t)
    lead = t.ndim - 3
    for perm in itertools.permutations(range(3)):
        out = out + _perm_sign(perm) * np.transpose(t, tuple(range(lead)) + tuple(lead + q for q in perm))
    return out


def covariant_derivative(w: PolyTwoForm, conn: ConstantConnection, x) -> np.ndarray:
    """``(nabla omega)[..., k, i, j] = d_k w_ij - w(Gamma(e_k, e_i), e_j) - w(e_i, Gamma(e_k, e_j))``."""
    if conn.n != w.n:
        raise InvalidInputError("form and connection dimensions differ")
    x = np.asarray(x, dtype=float)
    partial = np.zeros(x.shape[:-1] + (w.n,) * 3)
    for k in range(w.n):
        for i in range(w.n):
            for j in range(w.n):
                partial[..., k, i, j] = w.component(i, j).diff(k)(x)
    om = w(x)
    g = conn.gamma  # g[l, k, i] = Gamma^l_{ki}
    return partial - np.einsum("lki,...lj->...kij", g, om) - np.einsum("lkj,...il->...kij", g, om)


def alt_nabla_identity_residual(w: PolyTwoForm, conn: ConstantConnection, points, tol: Tolerances = DEFAULT_TOL) -> float:
    """Max over points of ``|d omega - 1/2 Alt(nabla omega)|``."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    lhs = d_omega_values(w, points)
    rhs = 0.5 * alternator(covariant_derivative(w, conn, points))
    return float(np.max(np.abs(lhs - rhs), initial=0.0))


def compatible_connection_for_constant(w: PolyTwoForm, tol: Tolerances = DEFAULT_TOL) -> ConstantConnection:
    """The flat connection, which parallelizes any constant nondegenerate 2-form.

    Non-constant forms would need a Darboux chart, which is not provided.
    """
    if w.degree > 0:
        raise NotSupportedError("only constant-coefficient 2-forms are supported (no Darboux construction)")
    if w.n % 2 or not is_nondegenerate(w(np.zeros(w.n)), tol):
        raise NotSupportedError("2-form is degenerate")
    return ConstantConnection.zero(w.n)
