"""Closures of matrix subspaces under commutators.

The central object is the obstruction space: for a subspace S of gl(n) and a
seed space C (the brackets of S, or curvature operators), the span of
``(ad_X)^k C`` over all X in S and all k >= 0.  Polarizing in X turns the
continuum of conditions into finitely many symmetrized words

    Sym(ad_{X_i1} ... ad_{X_ik}) C,   multiset {i1..ik} of basis indices,

and Cayley-Hamilton for ad_X on the n**2-dimensional space gl(n) caps the word
length at n**2 - 1.
"""
from __future__ import annotations

from itertools import combinations_with_replacement

import numpy as np

from .errors import CapacityError, InvalidInputError
from .linalg import (
    DEFAULT_TOL,
    MatrixSubspace,
    Tolerances,
    commutator,
    gram_orthonormalize,
    null_space,
    pairs,
    span,
)

MAX_WORDS = 10**6


def _brackets(basis_a, basis_b=None):
    if basis_b is None:
        idx = list(pairs(len(basis_a)))
        if not idx:
            return np.zeros((0,) + basis_a.shape[1:])
        a, b = zip(*idx)
        return commutator(basis_a[list(a)], basis_a[list(b)])
    return commutator(basis_a[:, None], basis_b[None]).reshape(-1, *basis_a.shape[1:])


def bracket_span(s: MatrixSubspace, tol: Tolerances = DEFAULT_TOL) -> MatrixSubspace:
    """span[S, S] over an orthonormal basis of S."""
    return span(_brackets(s.basis), tol, n=s.n, scale=1.0)


def is_closed(g: MatrixSubspace, tol: Tolerances = DEFAULT_TOL) -> float:
    """Largest projection residual of a basis commutator onto g (absolute, basis is unit norm)."""
    br = _brackets(g.basis)
    if br.shape[0] == 0:
        return 0.0
    return float(np.max(np.linalg.norm(br - g.project(br), axis=(-2, -1))))


def bracket_closure(s: MatrixSubspace, tol: Tolerances = DEFAULT_TOL) -> MatrixSubspace:
    """Smallest subspace containing S and closed under commutators."""
    g = s
    for _ in range(s.n * s.n + 1):
        grown = span(np.concatenate([g.basis, _brackets(g.basis)]), tol, n=s.n, scale=1.0)
        if grown.dim == g.dim:
            return grown
        g = grown
    return g


def derived_algebra(g: MatrixSubspace, tol: Tolerances = DEFAULT_TOL) -> MatrixSubspace:
    """[g, g] for a bracket-closed g."""
    leak = is_closed(g, tol)
    if leak >= tol.verify_tol:
        raise InvalidInputError(f"subspace is not closed under brackets (residual {leak:.3g})")
    return bracket_span(g, tol)


def center(g: MatrixSubspace, tol: Tolerances = DEFAULT_TOL) -> MatrixSubspace:
    if g.dim == 0:
        return g
    cols = _brackets(g.basis, g.basis).reshape(g.dim, g.dim, -1)
    # row block i holds [X_i, Y_j] for every column j
    system = cols.transpose(0, 2, 1).reshape(-1, g.dim)
    kernel = null_space(system, tol.rank_tol, scale=1.0)
    return span(np.einsum("rj,jab->rab", kernel, g.basis), tol, n=g.n, scale=1.0)


def invariant_closure(s: MatrixSubspace, seed: MatrixSubspace, tol: Tolerances = DEFAULT_TOL) -> MatrixSubspace:
    """Smallest subspace containing ``seed`` and stable under ad_X for X in S."""
    if s.n != seed.n:
        raise InvalidInputError("subspaces live in different matrix algebras")
    u = seed
    for _ in range(s.n * s.n + 1):
        if u.dim == 0 or s.dim == 0:
            return u
        grown = span(np.concatenate([u.basis, _brackets(s.basis, u.basis)]), tol, n=s.n, scale=1.0)
        if grown.dim == u.dim:
            return grown
        u = grown
    return u


def _multisets(m, k):
    """Exponent vectors of all multisets of size k over m letters, in a fixed order."""
    out = []
    for combo in combinations_with_replacement(range(m), k):
        counts = [0] * m
        for i in combo:
            counts[i] += 1
        out.append(tuple(counts))
    return out


def symmetrized_word_span(
    letters: np.ndarray,
    seeds: np.ndarray,
    max_len: int,
    tol: Tolerances = DEFAULT_TOL,
    max_words: int = MAX_WORDS,
) -> MatrixSubspace:
    """Span of ``Sym(ad_{X_i1}...ad_{X_ik}) C`` for all multisets of length <= max_len.

    Words are generated layer by layer from the recursion

        Sym_M C = (1/k) * sum_i M_i * ad_{X_i} Sym_{M - e_i} C,

    which averages over orderings without enumerating them.  Each layer is
    rank-truncated against its own magnitude (and the a-priori bound from the
    previous layer) so exact zeros are not promoted by roundoff.
    """
    n = seeds.shape[-1]
    m = letters.shape[0]
    if seeds.shape[0] == 0:
        return MatrixSubspace.zero(n)
    layer = seeds[None]  # (words, seeds, n, n)
    basis = np.zeros((0, n * n))
    top = float(np.max(np.linalg.norm(seeds, axis=(-2, -1))))
    basis = gram_orthonormalize(seeds.reshape(-1, n * n), basis, tol.rank_tol * top)
    letter_norm = float(np.max(np.linalg.norm(letters, axis=(-2, -1)), initial=0.0))
    words = seeds.shape[0]
    index = {(0,) * m: 0}
    for k in range(1, max_len + 1):
        if basis.shape[0] == n * n or m == 0:
            break
        shapes = _multisets(m, k)
        words += len(shapes) * seeds.shape[0]
        if words > max_words:
            raise CapacityError(
                f"obstruction-space enumeration needs more than {max_words} words "
                f"({m} letters, length {k}, {seeds.shape[0]} seeds)"
            )
        adj = commutator(letters[:, None, None], layer[None])  # (m, words, seeds, n, n)
        nxt = np.zeros((len(shapes),) + layer.shape[1:])
        for i in range(m):
            rows, parents, weights = [], [], []
            for r, counts in enumerate(shapes):
                if counts[i]:
                    parent = counts[:i] + (counts[i] - 1,) + counts[i + 1 :]
                    rows.append(r)
                    parents.append(index[parent])
                    weights.append(counts[i] / k)
            if rows:
                nxt[rows] += np.asarray(weights)[:, None, None, None] * adj[i, parents]
        bound = 2.0 * letter_norm * float(np.max(np.linalg.norm(layer, axis=(-2, -1))))
        layer = nxt
        index = {counts: r for r, counts in enumerate(shapes)}
        size = float(np.max(np.linalg.norm(layer, axis=(-2, -1))))
        cut = tol.rank_tol * max(size, bound)
        if size <= cut:
            # every longer word is built from this (vanishing) layer
            break
        basis = gram_orthonormalize(layer.reshape(-1, n * n), basis, cut)
    return MatrixSubspace(n, basis)


def obstruction_space_exact(s: MatrixSubspace, tol: Tolerances = DEFAULT_TOL, max_words: int = MAX_WORDS) -> MatrixSubspace:
    """Span of ``(ad_X)^k [Y, Z]`` over X, Y, Z in S and k >= 0."""
    seeds = bracket_span(s, tol)
    return symmetrized_word_span(s.basis, seeds.basis, s.n * s.n - 1, tol, max_words)


def soundness_residual(
    letters: MatrixSubspace,
    seeds: MatrixSubspace,
    v: MatrixSubspace,
    rng: np.random.Generator,
    tol: Tolerances = DEFAULT_TOL,
    samples: int = 100,
    max_power: int = 4,
) -> float:
    """Largest relative residual of random ``(ad_X)^k C`` (k <= max_power) against V.

    X is drawn from ``letters`` and C from ``seeds``; a value near zero confirms
    that the finite word reduction captured the sampled conditions.
    """
    if seeds.dim == 0:
        return 0.0
    worst = 0.0
    for _ in range(samples):
        x = np.einsum("r,rab->ab", rng.standard_normal(letters.dim), letters.basis) if letters.dim else np.zeros((v.n, v.n))
        c = np.einsum("r,rab->ab", rng.standard_normal(seeds.dim), seeds.basis)
        scale = np.linalg.norm(c)
        step = 2.0 * np.linalg.norm(x)
        w = c
        for k in range(max_power + 1):
            if k:
                w = commutator(x, w)
                scale *= step
            if np.linalg.norm(w) > tol.rank_tol * scale:
                worst = max(worst, float(v.residual(w)))
    return worst
