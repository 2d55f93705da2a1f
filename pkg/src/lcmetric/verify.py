"""Independent checks of metrizability claims.

Everything here recomputes a claim by a route that does not go through the
obstruction space: finite-difference parallelism of the spread metric,
Christoffel recovery, exact polygonal holonomy and direct sampling of the
exponential-conjugation conditions.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .connection import (
    ConstantConnection,
    MetricField,
    christoffels_from_metric,
    compatibility_residual,
    contract,
    spread_metric,
)
from .errors import InvalidInputError, SingularMetricError
from .lie_group import InvariantConnection, check_torsion_free, curvature_ops
from .linalg import (
    DEFAULT_TOL,
    Tolerances,
    antisym_residual,
    as_sym_form,
    commutator,
    is_nondegenerate,
    make_rng,
    mat_exp,
    pairs,
)

RANDOM_POINTS = 32
CHRISTOFFEL_POINTS = 20
LOOPS = 50
_CHUNK = 512


def grid_points(n: int) -> np.ndarray:
    """Regular grid on [-1, 1]^n: 5 points per axis, 3 above four dimensions."""
    per_axis = 5 if n <= 4 else 3
    axis = np.linspace(-1.0, 1.0, per_axis)
    return np.array(list(itertools.product(axis, repeat=n)))


def random_ball(rng: np.random.Generator, n: int, count: int) -> np.ndarray:
    """Uniform samples from the closed unit ball."""
    x = rng.standard_normal((count, n))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    return x * rng.uniform(0, 1, (count, 1)) ** (1.0 / n)


def random_loops(rng: np.random.Generator, n: int, count: int = LOOPS) -> list:
    """Closed triangles and squares (alternating) with vertices in the unit ball."""
    loops = []
    for i in range(count):
        corners = random_ball(rng, n, 3 if i % 2 == 0 else 4)
        loops.append(np.vstack([corners, corners[:1]]))
    return loops


def transport_along_path(conn: ConstantConnection, vertices) -> np.ndarray:
    """Parallel transport along a polygon, exact on each straight segment."""
    vertices = np.asarray(vertices, dtype=float).reshape(-1, conn.n)
    steps = np.diff(vertices, axis=0)
    total = np.eye(conn.n)
    if steps.shape[0] == 0:
        return total
    for p in mat_exp(-contract(conn.gamma, steps)):
        total = p @ total
    return total


def loop_holonomy(conn: ConstantConnection, vertices) -> np.ndarray:
    vertices = np.asarray(vertices, dtype=float).reshape(-1, conn.n)
    if vertices.shape[0] == 0 or not np.array_equal(vertices[0], vertices[-1]):
        raise InvalidInputError("loop must be closed (first vertex equal to last)")
    return transport_along_path(conn, vertices)


def metric_along_path(field: MetricField, vertices) -> np.ndarray:
    """Metric at the path's end obtained by transporting the metric at its start."""
    vertices = np.asarray(vertices, dtype=float).reshape(-1, field.conn.n)
    inv = np.linalg.inv(transport_along_path(field.conn, vertices))
    g = inv.T @ spread_metric(field, vertices[0]) @ inv
    return (g + g.T) / 2


@dataclass
class VerifyReport:
    max_compat_residual: float
    max_christoffel_error: float
    max_holonomy_error: float
    samples_used: int
    verify_tol: float

    @property
    def passed(self) -> bool:
        return max(self.max_compat_residual, self.max_christoffel_error, self.max_holonomy_error) < self.verify_tol

    def as_residuals(self) -> dict:
        return {
            "max_compat_residual": self.max_compat_residual,
            "max_christoffel_error": self.max_christoffel_error,
            "max_holonomy_error": self.max_holonomy_error,
        }


def verify_metric(field: MetricField, tol: Tolerances = DEFAULT_TOL) -> VerifyReport:
    n = field.conn.n
    points = np.vstack([grid_points(n), random_ball(make_rng(tol.seed, "compat"), n, RANDOM_POINTS)])
    compat = max(
        float(np.max(compatibility_residual(field, points[i : i + _CHUNK], tol)))
        for i in range(0, len(points), _CHUNK)
    )

    sites = random_ball(make_rng(tol.seed, "christoffel"), n, CHRISTOFFEL_POINTS)
    try:
        recovered = christoffels_from_metric(field, sites, tol)
        christoffel = float(np.max(np.abs(recovered - field.conn.gamma)))
    except SingularMetricError:
        christoffel = float("inf")

    holonomy = 0.0
    for loop in random_loops(make_rng(tol.seed, "loops"), n):
        p = loop_holonomy(field.conn, loop)
        g = spread_metric(field, loop[0])
        holonomy = max(holonomy, float(np.linalg.norm(p.T @ g @ p - g)))

    return VerifyReport(compat, christoffel, holonomy, len(points) + len(sites) + LOOPS, tol.verify_tol)


def _unit_form(g, tol):
    g = as_sym_form(g, "g0")
    if not is_nondegenerate(g, tol):
        raise SingularMetricError("form is degenerate")
    return g / np.max(np.abs(np.linalg.eigvalsh(g)))


def _relative_antisym(m, g, scale, tol):
    norms = np.linalg.norm(m, axis=(-2, -1))
    res = antisym_residual(m, g)
    live = norms > tol.rank_tol * scale
    return np.where(live, res / np.where(live, norms, 1.0), 0.0)


def sample_condition_rn(
    conn: ConstantConnection, g0, count: int = 100, tol: Tolerances = DEFAULT_TOL, return_witness: bool = False
):
    """Max relative g0-antisymmetry defect of ``exp(Gamma(v)) [Gamma(w1), Gamma(w2)] exp(-Gamma(v))``.

    The triples (v, w1, w2) are seeded samples from the unit ball.  With
    ``return_witness`` the worst triple is returned alongside the residual.
    """
    g = _unit_form(g0, tol)
    rng = make_rng(tol.seed, "sample-rn")
    v, w1, w2 = (random_ball(rng, conn.n, count) for _ in range(3))
    a, b = contract(conn.gamma, w1), contract(conn.gamma, w2)
    e = contract(conn.gamma, v)
    m = mat_exp(e) @ commutator(a, b) @ mat_exp(-e)
    scale = 2 * np.linalg.norm(a, axis=(-2, -1)) * np.linalg.norm(b, axis=(-2, -1)) * np.exp(2 * np.linalg.norm(e, axis=(-2, -1)))
    res = _relative_antisym(m, g, scale, tol)
    worst = int(np.argmax(res)) if count else 0
    value = float(res[worst]) if count else 0.0
    if return_witness:
        return value, (v[worst], w1[worst], w2[worst]) if count else None
    return value


def sample_condition_group(conn: InvariantConnection, h, count: int = 100, tol: Tolerances = DEFAULT_TOL) -> float:
    """Max relative h-antisymmetry defect of ``e^{Gamma(Z)} R(X, Y) e^{-Gamma(Z)}``.

    Z runs over seeded samples from the unit ball and (X, Y) over basis pairs.
    """
    check_torsion_free(conn)
    g = _unit_form(h, tol)
    if conn.n < 2:
        return 0.0
    rng = make_rng(tol.seed, "sample-group")
    z = random_ball(rng, conn.n, count)
    e = contract(conn.gamma, z)
    left, right = mat_exp(e), mat_exp(-e)
    curv = curvature_ops(conn)
    ops_norm = float(np.max(np.linalg.norm(conn.gamma, axis=(0, 2)), initial=0.0))
    base = ops_norm**2 + float(np.max(np.abs(conn.alg.c), initial=0.0)) * ops_norm
    worst = 0.0
    for i, j in pairs(conn.n):
        m = left @ curv[i, j] @ right
        scale = base * np.exp(2 * np.linalg.norm(e, axis=(-2, -1)))
        worst = max(worst, float(np.max(_relative_antisym(m, g, scale, tol))))
    return worst
