"""Seeded instance generators for the CLI and the test corpus."""
from __future__ import annotations

import numpy as np

from . import catalog
from .connection import ConstantConnection, operators
from .errors import InvalidInputError
from .lie_group import levi_civita_invariant
from .linalg import MAX_DIM, random_form, random_invertible


def polynomial_algebra(coeffs) -> np.ndarray:
    """Multiplication tensor of R[x]/(x^n - sum_a coeffs[a] x^a) in the basis 1, x, ..., x^(n-1).

    Commutative and associative, so the multiplication operators commute and
    the tensor is a symmetric, flat-commutator connection.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    n = len(coeffs)
    # powers[p] = coordinates of x^p for p < 2n - 1
    powers = np.zeros((2 * n - 1, n))
    powers[:n] = np.eye(n)
    for p in range(n, 2 * n - 1):
        prev = powers[p - 1]
        powers[p, 1:] = prev[:-1]
        powers[p] += prev[-1] * coeffs
    gamma = np.zeros((n, n, n))
    for i in range(n):
        for j in range(n):
            gamma[:, i, j] = powers[i + j]
    return gamma


def _rescaled(conn: ConstantConnection, size: float) -> ConstantConnection:
    top = np.max(np.linalg.norm(operators(conn.gamma), ord=2, axis=(-2, -1)))
    if top == 0:
        return conn
    return ConstantConnection.symmetrized(conn.gamma * (size / top))


def random_commuting(rng: np.random.Generator, n: int, size: float = 0.3) -> ConstantConnection:
    """Commutative associative algebra in a random frame, scaled so max ||Gamma(e_i)||_2 = size.

    Roughly one draw in four uses the nilpotent algebra x^n = 0.
    """
    coeffs = np.zeros(n) if rng.uniform() < 0.25 else rng.uniform(-1, 1, n)
    base = ConstantConnection.symmetrized(polynomial_algebra(coeffs))
    return _rescaled(base.transformed(random_invertible(rng, n, 4.0)), size)


def random_symmetric(rng: np.random.Generator, n: int, low: float = -2.0, high: float = 2.0) -> ConstantConnection:
    return ConstantConnection.symmetrized(rng.uniform(low, high, (n, n, n)))


def noncommuting2() -> ConstantConnection:
    """Gamma(e1,e1) = e1, Gamma(e1,e2) = Gamma(e2,e1) = e1, Gamma(e2,e2) = 0."""
    gamma = np.zeros((2, 2, 2))
    gamma[0, 0, 0] = gamma[0, 0, 1] = gamma[0, 1, 0] = 1.0
    return ConstantConnection(gamma)


def commuting2() -> ConstantConnection:
    """Gamma(e1,e1) = e1, Gamma(e1,e2) = Gamma(e2,e1) = e2, Gamma(e2,e2) = 0, so Gamma(e1) = I."""
    gamma = np.zeros((2, 2, 2))
    gamma[0, 0, 0] = gamma[1, 0, 1] = gamma[1, 1, 0] = 1.0
    return ConstantConnection(gamma)


def koszul(name: str, p: int, q: int, rng: np.random.Generator, n: int = 3):
    """Levi-Civita connection of a random left-invariant metric of signature (p, q) on a catalog algebra.

    Returns ``(connection, h)``.
    """
    alg = catalog.algebra(name, n)
    if p + q != alg.n or min(p, q) < 0:
        raise InvalidInputError(f"signature ({p},{q}) does not match algebra dimension {alg.n}")
    h = random_form(rng, p, q)
    return levi_civita_invariant(alg, h), h


def check_dimension(n: int) -> None:
    if not 1 <= n <= MAX_DIM:
        raise InvalidInputError(f"dimension {n} outside 1..{MAX_DIM}")

