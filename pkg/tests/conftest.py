import numpy as np
import pytest

from lcmetric.generate import commuting2, noncommuting2
from lcmetric.linalg import MatrixSubspace, span

E12 = np.array([[0.0, 1.0], [0.0, 0.0]])
E21 = np.array([[0.0, 0.0], [1.0, 0.0]])
ROT = np.array([[0.0, -1.0], [1.0, 0.0]])


def subspace(*mats, n=None):
    return span([np.asarray(m, dtype=float) for m in mats], n=n)


@pytest.fixture
def commuting():
    return commuting2()


@pytest.fixture
def noncommuting():
    return noncommuting2()


@pytest.fixture
def sl2():
    return subspace(E12, E21)


def brute_solutions(v: MatrixSubspace) -> int:
    """Dimension of {G symmetric : A^T G + G A = 0 for A in V}, solved over all n*n entries."""
    n = v.n
    # row-major vec: vec(A^T G) = kron(A^T, I) vec(G), vec(G A) = kron(I, A^T) vec(G)
    rows = [np.kron(a.T, np.eye(n)) + np.kron(np.eye(n), a.T) for a in v.basis]
    for i in range(n):
        for j in range(i + 1, n):
            r = np.zeros((1, n * n))
            r[0, i * n + j], r[0, j * n + i] = 1.0, -1.0
            rows.append(r)
    if not rows:
        return 1
    m = np.vstack(rows)
    s = np.linalg.svd(m, compute_uv=False)
    return n * n - int(np.sum(s > 1e-9 * max(s[0], 1.0)))
