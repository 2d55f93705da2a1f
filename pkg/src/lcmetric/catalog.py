"""Fixed catalog of small Lie algebras used for round-trip checks and generation.

Structure constants are exact rationals, listed as nonzero brackets
``[e_i, e_j] = sum coeff * e_k`` for ``i < j``.  Each entry also carries a
faithful matrix representation so that loops in the simply connected group can
be closed with a matrix logarithm.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import InvalidInputError
from .lie_group import LieAlgebraStructure

CATALOG_VERSION = "1"

# name -> (dimension, {(i, j): {k: coeff}})
_BRACKETS = {
    "heisenberg": (3, {(0, 1): {2: Fraction(1)}}),
    # basis (X, Z) with [Z, X] = X
    "aff2": (2, {(0, 1): {0: Fraction(-1)}}),
    "so3": (3, {(0, 1): {2: Fraction(1)}, (1, 2): {0: Fraction(1)}, (2, 0): {1: Fraction(1)}}),
    # basis (H, E, F)
    "sl2": (3, {(0, 1): {1: Fraction(2)}, (0, 2): {2: Fraction(-2)}, (1, 2): {0: Fraction(1)}}),
}

NAMES = ("abelian", "heisenberg", "aff2", "so3", "sl2")


def structure_constants(name: str, n: int = 3) -> list:
    """Exact constants ``c[k][i][j]`` as nested lists of Fractions."""
    if name == "abelian":
        return [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
    if name not in _BRACKETS:
        raise InvalidInputError(f"unknown algebra {name!r}; choose from {', '.join(NAMES)}")
    dim, table = _BRACKETS[name]
    c = [[[Fraction(0)] * dim for _ in range(dim)] for _ in range(dim)]
    for (i, j), terms in table.items():
        for k, coeff in terms.items():
            c[k][i][j] += coeff
            c[k][j][i] -= coeff
    return c


def algebra(name: str, n: int = 3) -> LieAlgebraStructure:
    return LieAlgebraStructure(np.array(structure_constants(name, n), dtype=float))


def representation(name: str, n: int = 3) -> np.ndarray:
    """Faithful matrices rho(e_i) with [rho(e_i), rho(e_j)] = rho([e_i, e_j])."""
    if name == "abelian":
        return np.array([np.diag(np.eye(n)[i]) for i in range(n)])
    if name == "heisenberg":
        e = np.zeros((3, 3, 3))
        e[0, 0, 1] = e[1, 1, 2] = e[2, 0, 2] = 1.0
        return e
    if name == "aff2":
        return np.array([[[0.0, 1.0], [0.0, 0.0]], [[1.0, 0.0], [0.0, 0.0]]])
    if name == "so3":
        eps = np.zeros((3, 3, 3))
        for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
            eps[i, j, k], eps[i, k, j] = 1.0, -1.0
        return -eps
    if name == "sl2":
        return np.array([[[1.0, 0.0], [0.0, -1.0]], [[0.0, 1.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]])
    raise InvalidInputError(f"unknown algebra {name!r}")
