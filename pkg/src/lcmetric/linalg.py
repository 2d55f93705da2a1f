"""Dense small-matrix numerics: exponential, subspaces, signatures, residuals.

Matrices are plain ``numpy`` arrays of shape ``(n, n)``; most functions also
accept a leading batch axis.  Subspaces of ``gl(n)`` are carried by
:class:`MatrixSubspace`, whose basis is orthonormal for the Frobenius inner
product.
"""
from __future__ import annotations

import zlib
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidInputError

MAX_DIM = 8


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds shared by every computation.

    rank_tol is a relative singular-value cutoff, det_tol bounds ``|det|`` of a
    unit-Frobenius form, verify_tol bounds verification residuals and fd_step is
    the base finite-difference step.
    """

    rank_tol: float = 1e-10
    det_tol: float = 1e-8
    verify_tol: float = 1e-8
    fd_step: float = 1e-5
    seed: int = 0

    def __post_init__(self):
        for name in ("rank_tol", "det_tol", "verify_tol", "fd_step"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise InvalidInputError(f"{name} must be a positive finite number, got {value!r}")
        if int(self.seed) != self.seed or self.seed < 0 or self.seed >= 2**64:
            raise InvalidInputError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")


DEFAULT_TOL = Tolerances()


def make_rng(seed: int, stream: str) -> np.random.Generator:
    """Counter-based generator keyed by ``(seed, stream)``.

    Independent named streams keep results stable when unrelated sampling
    code changes.
    """
    key = np.random.SeedSequence([int(seed) & (2**64 - 1), zlib.crc32(stream.encode())])
    return np.random.Generator(np.random.Philox(key))


def check_finite(a, what="matrix"):
    a = np.asarray(a, dtype=float)
    if not np.all(np.isfinite(a)):
        raise InvalidInputError(f"{what} has non-finite entries")
    return a


def check_square(a, what="matrix"):
    a = check_finite(a, what)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise InvalidInputError(f"{what} must be square, got shape {a.shape}")
    return a


# Taylor degree 18 on ||X||_1 <= 1/2 leaves a truncation error below 1e-24.
_EXP_THETA = 0.5
_EXP_DEGREE = 18


def mat_exp(a):
    """Matrix exponential by scaling and squaring of a Taylor polynomial.

    Evaluated in extended precision (``np.longdouble``) and rounded back to
    float64, which keeps the relative error near unit roundoff even for
    ``||A||_F`` around 50.  Works on a single matrix or a stack ``(..., n, n)``.
    """
    a = check_square(a)
    x = a.astype(np.longdouble)
    norms = np.abs(x).sum(axis=-2).max(axis=-1)
    with np.errstate(divide="ignore"):
        squarings = np.ceil(np.log2(norms / _EXP_THETA))
    squarings = np.where(norms > 0, np.maximum(squarings, 0), 0).astype(int)
    x = x / np.power(np.longdouble(2), squarings)[..., None, None]

    eye = np.broadcast_to(np.eye(a.shape[-1], dtype=np.longdouble), x.shape)
    result = eye.copy()
    for k in range(_EXP_DEGREE, 0, -1):
        result = eye + (x @ result) / k
    for step in range(int(squarings.max(initial=0))):
        result = np.where((squarings > step)[..., None, None], result @ result, result)
    return result.astype(np.float64)


def commutator(a, b):
    return a @ b - b @ a


@dataclass(frozen=True, eq=False)
class MatrixSubspace:
    """Linear subspace of n x n real matrices with a Frobenius-orthonormal basis."""

    n: int
    basis: np.ndarray = field(repr=False)

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=float).reshape(-1, self.n, self.n)
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def vectors(self) -> np.ndarray:
        return self.basis.reshape(self.dim, self.n * self.n)

    @classmethod
    def zero(cls, n):
        return cls(n, np.zeros((0, n, n)))

    def project(self, m):
        m = np.asarray(m, dtype=float)
        flat = m.reshape(*m.shape[:-2], self.n * self.n)
        coeffs = flat @ self.vectors.T
        return (coeffs @ self.vectors).reshape(m.shape)

    def residual(self, m):
        """Relative distance ``||m - P m|| / ||m||`` of m (or a stack) from the subspace."""
        m = np.asarray(m, dtype=float)
        norms = np.linalg.norm(m, axis=(-2, -1))
        diff = np.linalg.norm(m - self.project(m), axis=(-2, -1))
        return np.where(norms > 0, diff / np.where(norms > 0, norms, 1.0), 0.0)

    def contains(self, other: "MatrixSubspace") -> float:
        """Largest relative residual of ``other``'s basis against this subspace."""
        if other.dim == 0:
            return 0.0
        return float(np.max(self.residual(other.basis)))

    def same_as(self, other: "MatrixSubspace") -> float:
        """Mutual projection residual; zero iff the subspaces coincide."""
        if self.dim != other.dim:
            return float("inf")
        return max(self.contains(other), other.contains(self))


def _stack(mats, n=None):
    if isinstance(mats, MatrixSubspace):
        return mats.basis, mats.n
    mats = [np.asarray(m, dtype=float) for m in mats] if not isinstance(mats, np.ndarray) else [mats]
    arrays = []
    for m in mats:
        if m.ndim == 2:
            m = m[None]
        check_square(m)
        arrays.append(m)
    if not arrays:
        if n is None:
            raise InvalidInputError("empty span needs an explicit dimension")
        return np.zeros((0, n, n)), n
    dims = {a.shape[-1] for a in arrays}
    if len(dims) != 1 or (n is not None and dims != {n}):
        raise InvalidInputError(f"mixed matrix dimensions: {sorted(dims)}")
    return np.concatenate(arrays, axis=0), dims.pop()


def orthonormal_rows(rows, rank_tol, scale=0.0):
    """Orthonormal basis (as rows) of the row space, cutting at rank_tol * max(sigma_max, scale)."""
    rows = np.asarray(rows, dtype=float)
    if rows.shape[0] == 0:
        return rows[:0]
    _, s, vt = np.linalg.svd(rows, full_matrices=False)
    top = max(s[0] if s.size else 0.0, scale)
    if top == 0.0:
        return rows[:0]
    return vt[s > rank_tol * top]


def null_space(m, rank_tol, scale=0.0):
    """Orthonormal basis (as rows) of the kernel of ``m``, same cutoff rule as orthonormal_rows."""
    m = np.asarray(m, dtype=float)
    cols = m.shape[1]
    if m.shape[0] == 0:
        return np.eye(cols)
    _, s, vt = np.linalg.svd(m, full_matrices=True)
    top = max(s[0] if s.size else 0.0, scale)
    rank = int(np.sum(s > rank_tol * top)) if top > 0 else 0
    return vt[rank:]


def span(mats, tol: Tolerances = DEFAULT_TOL, *, n=None, scale=0.0) -> MatrixSubspace:
    """Span of a collection of matrices.

    Singular values below ``rank_tol * max(sigma_max, scale)`` are dropped; pass
    ``scale`` when the inputs may legitimately be pure roundoff (commutators of
    commuting matrices, say) and the natural magnitude is known.
    """
    stacked, n = _stack(mats, n)
    rows = orthonormal_rows(stacked.reshape(stacked.shape[0], n * n), tol.rank_tol, scale)
    return MatrixSubspace(n, rows)


def as_sym_form(g, what="bilinear form"):
    g = check_square(g, what)
    if g.ndim != 2:
        raise InvalidInputError(f"{what} must be a single matrix")
    if not np.array_equal(g, g.T):
        raise InvalidInputError(f"{what} is not symmetric")
    return g


def normalized_det(g) -> float:
    g = np.asarray(g, dtype=float)
    norm = np.linalg.norm(g)
    if norm == 0:
        return 0.0
    return float(np.linalg.det(g / norm))


def is_nondegenerate(g, tol: Tolerances = DEFAULT_TOL) -> bool:
    return abs(normalized_det(g)) > tol.det_tol


def signature(g, tol: Tolerances = DEFAULT_TOL):
    """Counts ``(p, q, z)`` of positive, negative and (relatively) zero eigenvalues."""
    g = as_sym_form(g)
    eig = np.linalg.eigvalsh(g)
    top = np.max(np.abs(eig), initial=0.0)
    cut = tol.rank_tol * top
    zero = np.abs(eig) <= cut
    return int(np.sum((eig > 0) & ~zero)), int(np.sum((eig < 0) & ~zero)), int(np.sum(zero))


def antisym_residual(a, g) -> float:
    """``||A^T G + G A||_F``: zero iff A is skew-adjoint for the form G."""
    a = np.asarray(a, dtype=float)
    g = np.asarray(g, dtype=float)
    if a.shape[-1] != g.shape[-1]:
        raise InvalidInputError("dimension mismatch between operator and form")
    return np.linalg.norm(np.swapaxes(a, -1, -2) @ g + g @ a, axis=(-2, -1))


def sym_basis(n) -> np.ndarray:
    """Frobenius-orthonormal basis of symmetric n x n matrices, upper-triangle order."""
    out = []
    for a in range(n):
        for b in range(a, n):
            m = np.zeros((n, n))
            if a == b:
                m[a, a] = 1.0
            else:
                m[a, b] = m[b, a] = np.sqrt(0.5)
            out.append(m)
    return np.array(out).reshape(-1, n, n)


def trilinear_symmetry_nullspace_dim(n: int) -> int:
    """Dimension of trilinear maps symmetric in slots (1,2) and skew in slots (2,3).

    Builds the linear constraints on the n**3 values rho[i,j,k] and returns the
    kernel dimension, which is always 0.
    """
    if not 1 <= n <= 6:
        raise InvalidInputError("n must lie in 1..6")
    idx = np.arange(n**3).reshape(n, n, n)
    rows = []
    for i in range(n):
        for j in range(n):
            for k in range(n):
                sym = np.zeros(n**3)
                sym[idx[i, j, k]] += 1
                sym[idx[j, i, k]] -= 1
                skew = np.zeros(n**3)
                skew[idx[i, j, k]] += 1
                skew[idx[i, k, j]] += 1
                rows += [sym, skew]
    system = np.array(rows)
    return n**3 - int(np.linalg.matrix_rank(system))


def random_invertible(rng: np.random.Generator, n: int, cond: float = 4.0) -> np.ndarray:
    """Random matrix with singular values spread log-uniformly in [1/sqrt(cond), sqrt(cond)]."""
    u, _ = np.linalg.qr(rng.standard_normal((n, n)))
    v, _ = np.linalg.qr(rng.standard_normal((n, n)))
    s = np.exp(rng.uniform(-0.5, 0.5, n) * np.log(cond))
    return (u * s) @ v


def random_form(rng: np.random.Generator, p: int, q: int, cond: float = 4.0) -> np.ndarray:
    """Random nondegenerate symmetric form with signature (p, q, 0)."""
    n = p + q
    basis = random_invertible(rng, n, np.sqrt(cond))
    g = basis.T @ np.diag([1.0] * p + [-1.0] * q) @ basis
    return (g + g.T) / 2


def pairs(count: int) -> Iterable[tuple]:
    for a in range(count):
        for b in range(a + 1, count):
            yield a, b


def as_vector(v, n, what="vector") -> np.ndarray:
    v = check_finite(v, what)
    if v.shape[-1:] != (n,):
        raise InvalidInputError(f"{what} must have length {n}, got shape {v.shape}")
    return v


def gram_orthonormalize(rows: Sequence[np.ndarray], base: np.ndarray, cut: float) -> np.ndarray:
    """Append the components of ``rows`` orthogonal to ``base`` whose singular values exceed ``cut``."""
    rows = np.asarray(rows, dtype=float)
    if rows.size == 0:
        return base
    for _ in range(2):
        rows = rows - (rows @ base.T) @ base
    _, s, vt = np.linalg.svd(rows, full_matrices=False)
    new = vt[s > cut]
    if new.shape[0] == 0:
        return base
    new = new - (new @ base.T) @ base
    new, _ = np.linalg.qr(new.T)
    return np.vstack([base, new.T])
