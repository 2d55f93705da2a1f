"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line."""
import functools
import json
import re
import time

import numpy as np
import pytest
from scipy.linalg import logm

from lcmetric import catalog, io
from lcmetric.cli import main
from lcmetric.connection import MetricField, spread_metric
from lcmetric.dim2 import classify_dim2, so_form_for
from lcmetric.generate import noncommuting2, random_commuting, random_symmetric
from lcmetric.lie_group import levi_civita_invariant, segment_transport
from lcmetric.linalg import antisym_residual, make_rng, mat_exp, random_form, signature, trilinear_symmetry_nullspace_dim
from lcmetric.solver import analyze, analyze_lg, extendable_with, obstruction_space
from lcmetric.two_forms import Poly, PolyTwoForm, alt_nabla_identity_residual, exterior_derivative_max_coeff
from lcmetric.verify import (
    loop_holonomy,
    metric_along_path,
    random_ball,
    random_loops,
    sample_condition_group,
    sample_condition_rn,
    verify_metric,
)

TOL = 1e-8


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {number}] {'PASS' if ok else 'FAIL'}  {title}: {detail}")
        assert ok, detail

    return emit


def mixed_signature(rng, n):
    p = int(rng.integers(0, n + 1))
    return random_form(rng, p, n - p)


# shared corpora, built once

@functools.lru_cache(maxsize=None)
def rn_corpus():
    rng = make_rng(2024, "acceptance-rn")
    return [random_commuting(rng, int(rng.integers(2, 5))) for _ in range(100)]


@functools.lru_cache(maxsize=None)
def lie_corpus():
    out = []
    for name in catalog.NAMES:
        alg = catalog.algebra(name)
        rng = make_rng(2024, "acceptance-lie-" + name)
        for _ in range(10):
            h = mixed_signature(rng, alg.n)
            out.append((name, levi_civita_invariant(alg, h), h))
    return out


@functools.lru_cache(maxsize=None)
def dim2_corpus():
    # fixed policy: even draws are commuting (metrizable), odd draws are uniform in [-2, 2]
    rng = make_rng(2024, "acceptance-dim2")
    return [random_commuting(rng, 2) if k % 2 == 0 else random_symmetric(rng, 2) for k in range(200)]


# 1

def test_criterion_1_round_trip_rn(report):
    start = time.perf_counter()
    bad, compat, christoffel = [], 0.0, 0.0
    for k, conn in enumerate(rn_corpus()):
        verdict = analyze(conn)
        if not verdict.metrizable:
            bad.append(k)
            continue
        r = verify_metric(MetricField(conn, verdict.representative))
        compat = max(compat, r.max_compat_residual)
        christoffel = max(christoffel, r.max_christoffel_error)
    elapsed = time.perf_counter() - start
    ok = not bad and compat < 1e-8 and christoffel < 1e-6 and elapsed < 20
    detail = f"{100 - len(bad)}/100 metrizable, compat {compat:.2e}, christoffel {christoffel:.2e}, {elapsed:.1f}s"
    report(1, "round trip on R^n", ok, detail)


# 2

def test_criterion_2_round_trip_lie(report):
    start = time.perf_counter()
    failures, worst = [], 0.0
    for name, conn, h in lie_corpus():
        verdict = analyze_lg(conn)
        extendable, residual = extendable_with(conn, h)
        sampled = sample_condition_group(conn, h, 50)
        worst = max(worst, residual, sampled, *verdict.residuals.values())
        if not (verdict.metrizable and extendable) or verdict.inconsistency:
            failures.append(name)
    elapsed = time.perf_counter() - start
    ok = not failures and worst < TOL and elapsed < 30
    report(2, "round trip on Lie groups", ok, f"{50 - len(failures)}/50 yes, worst residual {worst:.2e}, {elapsed:.1f}s")


# 3

def test_criterion_3_dim2_equivalence(report):
    agree, yes = 0, 0
    for conn in dim2_corpus():
        c, v = classify_dim2(conn), analyze(conn)
        agree += c.metrizable == v.metrizable
        yes += v.metrizable
    no = 200 - yes
    ok = agree == 200 and yes >= 30 and no >= 30
    report(3, "dim-2 classifier agrees with analyze", ok, f"{agree}/200 agree, {yes} yes, {no} no")


# 4

def test_criterion_4_signature_law(report):
    rng = make_rng(2024, "acceptance-so")
    good = 0
    cases = 0
    while cases < 100:
        p, q, r = rng.uniform(-2, 2, 3)
        a = np.array([[p, q], [r, -p]])
        det = np.linalg.det(a)
        if abs(det) < 0.05:
            continue  # reseed policy: keep the matrix safely invertible
        cases += 1
        out = so_form_for(a)
        if out is None:
            continue
        g, sig = out
        expected = (2, 0, 0) if det > 0 else (1, 1, 0)
        good += antisym_residual(a, g) < 1e-9 and sig == expected and signature(g) == expected
    report(4, "signature law for 2x2 traceless", good == 100, f"{good}/100")


# 5

def test_criterion_5_trilinear_nullspace(report):
    dims = {n: trilinear_symmetry_nullspace_dim(n) for n in range(1, 7)}
    report(5, "trilinear symmetry nullspace", all(d == 0 for d in dims.values()), f"dims {dims}")


# 6

def test_criterion_6_negative_witness(report, tmp_path, capsys):
    path = tmp_path / "noncommuting.json"
    path.write_text(io.dumps(io.problem_document(noncommuting2())))
    code = main(["analyze", str(path)])
    text = capsys.readouterr().out
    match = re.search(r"witness .* norm ([0-9.eE+-]+)", text)
    witness_norm = float(match.group(1)) if match else 0.0
    rng = make_rng(2024, "acceptance-witness")
    sampled = min(sample_condition_rn(noncommuting2(), mixed_signature(rng, 2), 100) for _ in range(50))
    ok = code == 1 and witness_norm > 0 and sampled >= 1e-2
    report(6, "negative witness", ok, f"exit {code}, witness norm {witness_norm:.3g}, min sample residual {sampled:.3g}")


# 7

def closed_group_loop(rho, rng, pieces=4, radius=0.5):
    """Algebra steps X_1..X_k with exp(X_1)...exp(X_k) = e in the representation."""
    n = len(rho)
    steps = [radius * random_ball(rng, n, 1)[0] for _ in range(pieces)]
    product = np.eye(rho.shape[1])
    for x in steps:
        product = product @ mat_exp(np.einsum("i,iab->ab", x, rho))
    closing = np.real(logm(np.linalg.inv(product)))
    coords, *_ = np.linalg.lstsq(rho.reshape(n, -1).T, closing.ravel(), rcond=None)
    assert np.linalg.norm(np.einsum("i,iab->ab", coords, rho) - closing) < 1e-10
    return steps + [coords]


def group_path_to(rho, rng, target):
    """Random steps followed by the step that lands on ``target`` (a group element in the representation)."""
    n = len(rho)
    steps = [0.3 * random_ball(rng, n, 1)[0] for _ in range(3)]
    product = np.eye(rho.shape[1])
    for x in steps:
        product = product @ mat_exp(np.einsum("i,iab->ab", x, rho))
    closing = np.real(logm(np.linalg.inv(product) @ target))
    coords, *_ = np.linalg.lstsq(rho.reshape(n, -1).T, closing.ravel(), rcond=None)
    return steps + [coords]


def preserved(p, g, u, w):
    return float(np.max(np.abs(np.einsum("ri,ij,rj->r", u @ p.T, g, w @ p.T) - np.einsum("ri,ij,rj->r", u, g, w))))


def test_criterion_7_holonomy(report):
    rng = make_rng(2024, "acceptance-holonomy")
    holonomy, paths = 0.0, 0.0
    for conn in rn_corpus():
        g0 = analyze(conn).representative
        field = MetricField(conn, g0)
        u, w = random_ball(rng, conn.n, 10), random_ball(rng, conn.n, 10)
        for loop in random_loops(rng, conn.n, 50):
            g = spread_metric(field, loop[0])
            holonomy = max(holonomy, preserved(loop_holonomy(conn, loop), g, u, w))
        for _ in range(10):
            x = random_ball(rng, conn.n, 1)[0]
            path = np.vstack([np.zeros(conn.n), random_ball(rng, conn.n, 3), x])
            paths = max(paths, float(np.max(np.abs(metric_along_path(field, path) - spread_metric(field, x)))))

    for name, conn, h in lie_corpus():
        rho = catalog.representation(name)
        h = h / np.max(np.abs(np.linalg.eigvalsh(h)))
        u, w = random_ball(rng, conn.n, 10), random_ball(rng, conn.n, 10)
        for _ in range(50):
            holonomy = max(holonomy, preserved(segment_transport(conn, closed_group_loop(rho, rng)), h, u, w))
        target = mat_exp(np.einsum("i,iab->ab", 0.4 * random_ball(rng, conn.n, 1)[0], rho))
        for _ in range(10):
            # the left-trivialized spread metric is h at every point, so transport must carry h to h
            p = segment_transport(conn, group_path_to(rho, rng, target))
            paths = max(paths, float(np.max(np.abs(p.T @ h @ p - h))))

    ok = holonomy < TOL and paths < TOL
    report(7, "holonomy preservation and path independence", ok, f"holonomy {holonomy:.2e}, paths {paths:.2e}")


# 8

def test_criterion_8_two_forms(report):
    const = lambda c: Poly.constant(4, c)  # noqa: E731
    symplectic = PolyTwoForm(4, {(0, 1): const(1.0), (2, 3): const(1.0)})
    x1 = PolyTwoForm(4, {(0, 1): const(1.0), (2, 3): Poly(4, {(1, 0, 0, 0): 1.0})})
    closed = exterior_derivative_max_coeff(symplectic)
    coeff = exterior_derivative_max_coeff(x1)

    rng = make_rng(2024, "acceptance-two-forms")
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(2, 6))
        comps = {}
        for i in range(n):
            for j in range(i + 1, n):
                terms = {}
                for _ in range(3):
                    e = tuple(int(v) for v in rng.multinomial(int(rng.integers(0, 3)), np.ones(n) / n))
                    terms[e] = terms.get(e, 0.0) + float(rng.standard_normal())
                comps[(i, j)] = Poly(n, terms)
        w = PolyTwoForm(n, comps)
        worst = max(worst, alt_nabla_identity_residual(w, random_symmetric(rng, n), rng.uniform(-1, 1, (20, n))))

    ok = closed == 0 and coeff == 1 and worst < 1e-10
    report(8, "two-forms", ok, f"symplectic d = {closed}, x1 example max coeff {coeff}, Alt(nabla) residual {worst:.2e}")


# 9

def test_criterion_9_consistency(report, tmp_path):
    rng = make_rng(2024, "acceptance-consistency")
    checked, disagreements = 0, []

    euclidean = list(rn_corpus()) + list(dim2_corpus()) + [noncommuting2()]
    euclidean += [random_symmetric(rng, int(rng.integers(2, 5))) for _ in range(20)]
    for k, conn in enumerate(euclidean):
        v = obstruction_space(conn)
        verdict = analyze(conn)
        candidates = [mixed_signature(rng, conn.n) for _ in range(3)]
        if verdict.metrizable:
            candidates.append(verdict.representative)
        for g0 in candidates:
            checked += 1
            if extendable_with(conn, g0, v=v)[0] != (sample_condition_rn(conn, g0, 100) < 1e-7):
                disagreements.append(("euclidean", k))

    for name, conn, h in lie_corpus():
        v = obstruction_space(conn)
        for g0 in [h] + [mixed_signature(rng, conn.n) for _ in range(3)]:
            checked += 1
            if extendable_with(conn, g0, v=v)[0] != (sample_condition_group(conn, g0, 50) < 1e-7):
                disagreements.append((name, checked))

    # the CLI turns a disagreement into exit 3; run it over a slice of the corpus
    codes = set()
    for k, conn in enumerate(euclidean[::20]):
        problem = tmp_path / f"p{k}.json"
        metric = tmp_path / f"g{k}.json"
        problem.write_text(io.dumps(io.problem_document(conn)))
        metric.write_text(json.dumps(mixed_signature(rng, conn.n).tolist()))
        codes.add(main(["verify", str(problem), str(metric), "--quiet"]))

    ok = not disagreements and 3 not in codes
    report(9, "consistency guard", ok, f"{len(disagreements)} disagreements over {checked} checks, CLI exit codes {sorted(codes)}")
