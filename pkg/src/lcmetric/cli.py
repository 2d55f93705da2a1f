"""Command-line front end.

Exit codes: 0 metrizable / pass / closed, 1 not metrizable / fail / not closed,
2 invalid input, 3 internal inconsistency.
"""
from __future__ import annotations

import argparse
import dataclasses
import re
import sys

import numpy as np

from . import catalog, generate, io
from .connection import MetricField, ConstantConnection, operators
from .dim2 import classify_dim2
from .errors import CapacityError, InvalidInputError
from .lie_group import curvature_ops
from .linalg import MAX_DIM, Tolerances, commutator, is_nondegenerate, make_rng, pairs
from .solver import SAMPLE_TOL, TOOL_VERSION, analyze, analyze_lg, extendable_with
from .two_forms import alt_nabla_identity_residual, exterior_derivative, exterior_derivative_max_coeff
from .verify import random_ball, sample_condition_group, sample_condition_rn, verify_metric

OK, NO, INVALID, INCONSISTENT = 0, 1, 2, 3
IDENTITY_POINTS = 20


class _Output:
    def __init__(self, args):
        self.json = args.json
        self.quiet = args.quiet

    def report(self, text):
        if not (self.json or self.quiet):
            print(text)

    def document(self, doc, path=None):
        text = io.dumps(doc)
        if path:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        if self.json:
            sys.stdout.write(text)


def _matrix(m, indent="    "):
    cells = [[f"{x: .6g}" for x in row] for row in np.asarray(m)]
    width = max((len(c) for row in cells for c in row), default=0)
    return "\n".join(indent + "[" + ", ".join(c.rjust(width) for c in row) + "]" for row in cells)


def _tolerances(args, base: Tolerances) -> Tolerances:
    flags = {
        "rank_tol": args.tol_rank,
        "det_tol": args.tol_det,
        "verify_tol": args.tol_verify,
        "fd_step": args.fd_step,
        "seed": args.seed,
    }
    return dataclasses.replace(base, **{k: v for k, v in flags.items() if v is not None})


def _load_problem(args):
    problem = io.parse_problem(io.load_json(args.problem))
    problem.tol = _tolerances(args, problem.tol)
    return problem


def _commutator_witness(conn: ConstantConnection):
    ops = operators(conn.gamma)
    best = max(pairs(conn.n), key=lambda ij: np.linalg.norm(commutator(ops[ij[0]], ops[ij[1]])), default=None)
    if best is None:
        return None
    i, j = best
    return i, j, commutator(ops[i], ops[j])


def _curvature_witness(conn):
    curv = curvature_ops(conn)
    best = max(pairs(conn.n), key=lambda ij: np.linalg.norm(curv[ij]), default=None)
    return None if best is None else (best[0], best[1], curv[best])


def _verdict_text(problem, verdict):
    lines = [
        f"kind: {problem.kind}, dimension {problem.n}",
        f"metrizable: {'yes' if verdict.metrizable else 'no'}",
        f"obstruction space dimension: {verdict.obstruction_dim}",
        f"compatible forms at the base point: {verdict.solution_dim}",
    ]
    if verdict.metrizable:
        lines.append(f"representative (signature {tuple(verdict.signature)}):")
        lines.append(_matrix(verdict.representative))
    else:
        if problem.kind == "euclidean":
            witness = _commutator_witness(problem.conn)
            label = "commutator [Gamma(e{0}), Gamma(e{1})]"
        else:
            witness = _curvature_witness(problem.conn)
            label = "curvature R(e{0}, e{1})"
        if witness is not None:
            i, j, m = witness
            lines.append("witness " + label.format(i, j) + f", norm {np.linalg.norm(m):.6g}:")
            lines.append(_matrix(m))
        if verdict.solution_dim:
            lines.append("every compatible form at the base point is degenerate")
    lines.append("residuals: " + ", ".join(f"{k}={v:.3g}" for k, v in verdict.residuals.items()))
    if verdict.inconsistency:
        lines.append(f"INCONSISTENT: {verdict.inconsistency}")
    return "\n".join(lines)


def _run_analysis(problem):
    if problem.kind == "euclidean":
        return analyze(problem.conn, problem.tol)
    return analyze_lg(problem.conn, problem.tol)


def _exit_for(verdict):
    if verdict.inconsistency:
        return INCONSISTENT
    return OK if verdict.metrizable else NO


def cmd_analyze(args) -> int:
    problem = _load_problem(args)
    verdict = _run_analysis(problem)
    out = _Output(args)
    out.report(_verdict_text(problem, verdict))
    out.document(verdict.to_dict(problem.tol.seed), args.output)
    if verdict.inconsistency:
        print(f"inconsistency: {verdict.inconsistency}", file=sys.stderr)
    return _exit_for(verdict)


def cmd_verify(args) -> int:
    problem = _load_problem(args)
    g0 = io.parse_metric(io.load_json(args.metric))
    tol = problem.tol
    if g0.shape != (problem.n, problem.n):
        raise InvalidInputError(f"metric must be {problem.n}x{problem.n}, got {g0.shape}")
    if not is_nondegenerate(g0, tol):
        raise InvalidInputError("metric is degenerate")
    extendable, residual = extendable_with(problem.conn, g0, tol)
    residuals = {"extendable": residual}
    if problem.kind == "euclidean":
        residuals["sample_condition"] = sample_condition_rn(problem.conn, g0, 100, tol)
        report = verify_metric(MetricField(problem.conn, g0, tol), tol)
        residuals.update(report.as_residuals())
        passed = extendable and report.passed
    else:
        residuals["sample_condition"] = sample_condition_group(problem.conn, g0, 50, tol)
        passed = extendable
    agree = extendable == (residuals["sample_condition"] < SAMPLE_TOL)
    doc = {
        "extendable": bool(extendable),
        "passed": bool(passed),
        "residuals": {k: float(v) for k, v in residuals.items()},
        "inconsistency": None if agree else "extendable_with disagrees with sample_condition",
        "tool_version": TOOL_VERSION,
        "seed": int(tol.seed),
    }
    out = _Output(args)
    out.report(
        f"extendable: {'yes' if extendable else 'no'} (max residual {residual:.3g})\n"
        f"verification: {'pass' if passed else 'fail'}\n"
        "residuals: " + ", ".join(f"{k}={v:.3g}" for k, v in residuals.items())
    )
    out.document(doc, args.output)
    if not agree:
        print(f"inconsistency: {doc['inconsistency']}", file=sys.stderr)
        return INCONSISTENT
    return OK if passed else NO


def cmd_classify2(args) -> int:
    problem = _load_problem(args)
    if problem.kind != "euclidean" or problem.n != 2:
        raise InvalidInputError("classify2 needs a two-dimensional euclidean problem")
    result = classify_dim2(problem.conn, problem.tol)
    verdict = analyze(problem.conn, problem.tol)
    agree = result.metrizable == verdict.metrizable
    doc = {
        "metrizable": bool(result.metrizable),
        "commutator_norm": result.commutator_norm,
        "witness": None if result.witness is None else result.witness.tolist(),
        "analyze_metrizable": bool(verdict.metrizable),
        "inconsistency": None if agree else "classify_dim2 disagrees with analyze",
        "tool_version": TOOL_VERSION,
        "seed": int(problem.tol.seed),
    }
    lines = [
        f"commutator norm: {result.commutator_norm:.6g}",
        f"metrizable: {'yes' if result.metrizable else 'no'} (analyze: {'yes' if verdict.metrizable else 'no'})",
    ]
    if result.witness is not None:
        lines += ["witness [Gamma(e0), Gamma(e1)]:", _matrix(result.witness)]
    out = _Output(args)
    out.report("\n".join(lines))
    out.document(doc, args.output)
    if not agree:
        print(f"inconsistency: {doc['inconsistency']}", file=sys.stderr)
        return INCONSISTENT
    if verdict.inconsistency:
        print(f"inconsistency: {verdict.inconsistency}", file=sys.stderr)
        return INCONSISTENT
    return OK if result.metrizable else NO


_KOSZUL = re.compile(r"^koszul:(\w+):\(?\s*(\d+)\s*,\s*(\d+)\s*\)?$")


def cmd_generate(args) -> int:
    n = args.dimension
    if not 1 <= n <= MAX_DIM:
        raise InvalidInputError(f"dimension {n} outside 1..{MAX_DIM}")
    seed = 0 if args.seed is None else args.seed
    rng = make_rng(seed, "generate")
    sidecar = None
    kind = args.kind
    if kind == "zero":
        conn = ConstantConnection.zero(n)
    elif kind == "commuting":
        conn = generate.random_commuting(rng, n)
    elif kind == "random":
        conn = generate.random_symmetric(rng, n)
    elif kind == "noncommuting2":
        conn = generate.noncommuting2()
    elif _KOSZUL.match(kind):
        name, p, q = _KOSZUL.match(kind).groups()
        if name not in catalog.NAMES:
            raise InvalidInputError(f"unknown algebra {name!r}; choose from {', '.join(catalog.NAMES)}")
        p, q = int(p), int(q)
        conn, h = generate.koszul(name, p, q, rng, n=p + q)
        sidecar = io.metric_document(h, f"{kind} seed={seed}")
    else:
        raise InvalidInputError(f"unsupported kind {kind!r}")

    text = io.dumps(io.problem_document(conn, seed))
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        if sidecar is not None:
            with open(args.output + ".metric.json", "w", encoding="utf-8") as fh:
                fh.write(io.dumps(sidecar))
    else:
        sys.stdout.write(text)
        if sidecar is not None and not args.quiet:
            print("expected metric (no --output given, sidecar not written):", file=sys.stderr)
            print(io.dumps(sidecar), end="", file=sys.stderr)
    return OK


def cmd_twoform(args) -> int:
    w = io.parse_two_form(io.load_json(args.form))
    tol = _tolerances(args, Tolerances())
    if args.require_nondegenerate:
        if w.n % 2:
            raise InvalidInputError(f"a nondegenerate 2-form needs even dimension, got {w.n}")
        if not is_nondegenerate(w(np.zeros(w.n)), tol):
            raise InvalidInputError("2-form is degenerate at the origin")
    top = exterior_derivative_max_coeff(w)
    closed = top == 0
    doc = {"closed": bool(closed), "d_omega_max_coeff": float(top)}
    lines = [f"closed: {'yes' if closed else 'no'} (max |coefficient| of d omega: {top:.6g})"]
    if not closed:
        for (i, j, k), p in exterior_derivative(w).items():
            if p.terms:
                lines.append(f"  (d omega)_{i}{j}{k} has {len(p.terms)} nonzero monomials")
    if args.connection:
        problem = _load_problem(argparse.Namespace(**{**vars(args), "problem": args.connection}))
        if problem.kind != "euclidean":
            raise InvalidInputError("--connection needs a euclidean problem file")
        points = random_ball(make_rng(tol.seed, "twoform"), w.n, IDENTITY_POINTS)
        residual = alt_nabla_identity_residual(w, problem.conn, points, tol)
        doc["alt_nabla_residual"] = residual
        lines.append(f"|d omega - 1/2 Alt(nabla omega)| max over {IDENTITY_POINTS} points: {residual:.3g}")
    out = _Output(args)
    out.report("\n".join(lines))
    out.document(doc, args.output)
    return OK if closed else NO


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-rank", type=float, help="relative rank cutoff")
    common.add_argument("--tol-det", type=float, help="nondegeneracy threshold on the normalized determinant")
    common.add_argument("--tol-verify", type=float, help="verification residual bound")
    common.add_argument("--fd-step", type=float, help="finite-difference step")
    common.add_argument("--seed", type=int, help="seed for all randomized checks")
    common.add_argument("--json", action="store_true", help="print only the JSON document")
    common.add_argument("--quiet", action="store_true", help="suppress the human-readable report")
    common.add_argument("-o", "--output", help="also write the JSON document here")

    parser = argparse.ArgumentParser(prog="lcmetric", description="Decide whether a connection is Levi-Civita.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="decide metrizability")
    p.add_argument("problem")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("verify", parents=[common], help="check a given metric at the base point")
    p.add_argument("problem")
    p.add_argument("metric")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("classify2", parents=[common], help="two-dimensional commutator test")
    p.add_argument("problem")
    p.set_defaults(func=cmd_classify2)

    p = sub.add_parser("generate", parents=[common], help="write a problem file")
    p.add_argument("kind", help="zero | commuting | random | noncommuting2 | koszul:<algebra>:(p,q)")
    p.add_argument("-n", "--dimension", type=int, default=2)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("twoform", parents=[common], help="closedness of a polynomial 2-form")
    p.add_argument("form")
    p.add_argument("--connection", help="euclidean problem file for the Alt(nabla omega) identity check")
    p.add_argument("--require-nondegenerate", action="store_true")
    p.set_defaults(func=cmd_twoform)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return INVALID if exc.code else OK
    try:
        return args.func(args)
    except (InvalidInputError, CapacityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INVALID


if __name__ == "__main__":
    sys.exit(main())
