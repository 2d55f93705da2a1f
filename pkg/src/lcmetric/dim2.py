"""Two-dimensional constant connections.

In the plane a constant symmetric connection is metrizable exactly when
Gamma(e1) and Gamma(e2) commute, and then every nondegenerate g0 at the origin
extends.  A single traceless invertible 2x2 matrix A is skew for some form
precisely when ``tr A = 0`` and ``det A != 0``; the form is definite for
``det A > 0`` and Lorentzian for ``det A < 0``.
"""
from __future__ import annotations

from typing import NamedTuple, Optional

import numpy as np

from .connection import ConstantConnection, generators, operators
from .errors import InvalidInputError
from .lie_algebra import bracket_closure, derived_algebra
from .linalg import DEFAULT_TOL, Tolerances, check_finite, commutator, signature


class Dim2Classification(NamedTuple):
    metrizable: bool
    witness: Optional[np.ndarray]
    commutator_norm: float


def _require_plane(conn):
    if conn.n != 2:
        raise InvalidInputError(f"two-dimensional connection required, got n={conn.n}")


def classify_dim2(conn: ConstantConnection, tol: Tolerances = DEFAULT_TOL) -> Dim2Classification:
    _require_plane(conn)
    a, b = operators(conn.gamma)
    c = commutator(a, b)
    norm = float(np.linalg.norm(c))
    if norm < tol.verify_tol:
        return Dim2Classification(True, None, norm)
    return Dim2Classification(False, c, norm)


def _fix_sign(b):
    b = b / np.linalg.norm(b)
    lead = b[np.flatnonzero(np.abs(b) > 1e-14)[0]]
    return b if lead > 0 else -b


def so_form_for(a, tol: Tolerances = DEFAULT_TOL):
    """A form g0 making A skew, with its signature, or None when none exists.

    Writes ``det A = -eps a^2``, picks b1 (eigenvector sum for eps = 1, real part
    of the complex eigenvector for eps = -1), sets ``b2 = A b1 / a`` so that A has
    matrix ``[[0, eps a], [a, 0]]``, and declares ``g0(b1,b1) = 1``,
    ``g0(b2,b2) = -eps``, ``g0(b1,b2) = 0``.
    """
    a = check_finite(a)
    if a.shape != (2, 2):
        raise InvalidInputError("so_form_for expects a 2x2 matrix")
    size = np.linalg.norm(a)
    det = float(np.linalg.det(a))
    if size == 0 or abs(np.trace(a)) >= tol.verify_tol * size or abs(det) < tol.det_tol * size**2:
        return None
    eps = -np.sign(det)
    scale = np.sqrt(abs(det))
    values, vectors = np.linalg.eig(a)
    if eps > 0:
        order = np.argsort(values.real)[::-1]
        plus, minus = (_fix_sign(vectors[:, i].real) for i in order)
        b1 = plus + minus
    else:
        w = vectors[:, int(np.argmax(values.imag))]
        b1 = w.real if np.linalg.norm(w.real) > 1e-8 else w.imag
    b1 = _fix_sign(b1)
    b2 = a @ b1 / scale
    frame_inv = np.linalg.inv(np.column_stack([b1, b2]))
    g = frame_inv.T @ np.diag([1.0, -eps]) @ frame_inv
    g = (g + g.T) / 2
    return g, signature(g, tol)


def derived_algebra_dim2_report(conn: ConstantConnection, tol: Tolerances = DEFAULT_TOL) -> dict:
    """Dimensions of the algebra generated by S and of its derived algebra (diagnostic)."""
    _require_plane(conn)
    g = bracket_closure(generators(conn, tol), tol)
    gp = derived_algebra(g, tol)
    invertible = None
    if gp.dim == 1:
        invertible = bool(abs(np.linalg.det(gp.basis[0])) > tol.det_tol)
    return {"g_dim": g.dim, "gprime_dim": gp.dim, "gprime_generator_invertible": invertible}
