"""JSON problem, metric, verdict and two-form files."""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .connection import ConstantConnection
from .errors import InvalidInputError
from .lie_group import InvariantConnection, LieAlgebraStructure
from .linalg import MAX_DIM, Tolerances, as_sym_form
from .two_forms import Poly, PolyTwoForm

CONVENTION = "gamma[k][i][j]: Gamma(e_i, e_j) = sum_k gamma[k][i][j] e_k; structure_constants[k][i][j]: [e_i, e_j] = sum_k c[k][i][j] e_k; indices 0-based"

_PROBLEM_KEYS = {"kind", "dimension", "gamma", "structure_constants", "tolerances", "seed"}
_TOL_FIELDS = {f.name for f in dataclasses.fields(Tolerances)}


@dataclass
class Problem:
    kind: str
    conn: Union[ConstantConnection, InvariantConnection]
    tol: Tolerances

    @property
    def n(self) -> int:
        return self.conn.n


def _tensor(value, n, what):
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"{what} is not a numeric array: {exc}") from None
    if arr.shape != (n, n, n):
        raise InvalidInputError(f"{what} must have shape ({n}, {n}, {n}), got {arr.shape}")
    return arr


def _unknown_keys(doc, allowed, what):
    extra = sorted(k for k in doc if k not in allowed and not str(k).startswith("_"))
    if extra:
        raise InvalidInputError(f"unknown {what} fields: {', '.join(extra)}")


def parse_tolerances(doc: Optional[dict], base: Tolerances = Tolerances()) -> Tolerances:
    if not doc:
        return base
    if not isinstance(doc, dict):
        raise InvalidInputError("tolerances must be an object")
    _unknown_keys(doc, _TOL_FIELDS, "tolerance")
    return dataclasses.replace(base, **{k: v for k, v in doc.items() if not k.startswith("_")})


def parse_problem(doc) -> Problem:
    if not isinstance(doc, dict):
        raise InvalidInputError("problem file must hold a JSON object")
    _unknown_keys(doc, _PROBLEM_KEYS, "problem")
    kind = doc.get("kind")
    if kind not in ("euclidean", "lie_group"):
        raise InvalidInputError(f"kind must be 'euclidean' or 'lie_group', got {kind!r}")
    n = doc.get("dimension")
    if not isinstance(n, int) or isinstance(n, bool) or not 1 <= n <= MAX_DIM:
        raise InvalidInputError(f"dimension must be an integer in 1..{MAX_DIM}, got {n!r}")
    if "gamma" not in doc:
        raise InvalidInputError("missing gamma")
    gamma = _tensor(doc["gamma"], n, "gamma")
    tol = parse_tolerances(doc.get("tolerances"))
    if doc.get("seed") is not None:
        tol = dataclasses.replace(tol, seed=doc["seed"])
    if kind == "euclidean":
        if "structure_constants" in doc:
            raise InvalidInputError("structure_constants only apply to kind 'lie_group'")
        return Problem(kind, ConstantConnection(gamma), tol)
    if "structure_constants" not in doc:
        raise InvalidInputError("lie_group problems need structure_constants")
    alg = LieAlgebraStructure(_tensor(doc["structure_constants"], n, "structure_constants"))
    return Problem(kind, InvariantConnection(alg, gamma), tol)


def problem_document(conn, seed: Optional[int] = None) -> dict:
    doc = {"_convention": CONVENTION}
    if isinstance(conn, InvariantConnection):
        doc.update(kind="lie_group", dimension=conn.n, gamma=conn.gamma.tolist(), structure_constants=conn.alg.c.tolist())
    else:
        doc.update(kind="euclidean", dimension=conn.n, gamma=conn.gamma.tolist())
    if seed is not None:
        doc["seed"] = int(seed)
    return doc


def parse_metric(doc) -> np.ndarray:
    """Metric from ``{"metric": ...}``, a verdict's ``representative`` or a bare nested list."""
    if isinstance(doc, dict):
        value = doc.get("metric", doc.get("representative"))
        if value is None:
            raise InvalidInputError("metric file needs a 'metric' (or 'representative') matrix")
    else:
        value = doc
    try:
        g = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"metric is not a numeric matrix: {exc}") from None
    return as_sym_form(g, "metric")


def metric_document(g, source: str = "") -> dict:
    doc = {"metric": np.asarray(g).tolist()}
    if source:
        doc["_source"] = source
    return doc


def parse_two_form(doc) -> PolyTwoForm:
    if not isinstance(doc, dict):
        raise InvalidInputError("two-form file must hold a JSON object")
    _unknown_keys(doc, {"dimension", "omega"}, "two-form")
    n = doc.get("dimension")
    if not isinstance(n, int) or isinstance(n, bool) or not 1 <= n <= MAX_DIM:
        raise InvalidInputError(f"dimension must be an integer in 1..{MAX_DIM}, got {n!r}")
    components = {}
    for entry in doc.get("omega", []):
        try:
            i, j = int(entry["i"]), int(entry["j"])
            terms = {}
            for mono in entry.get("monomials", []):
                exps = tuple(mono["exponents"])
                terms[exps] = terms.get(exps, 0) + mono["coeff"]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"malformed omega entry {entry!r}: {exc}") from None
        if not (0 <= i < n and 0 <= j < n):
            raise InvalidInputError(f"index pair ({i}, {j}) out of range for dimension {n}")
        if (i, j) in components:
            raise InvalidInputError(f"component ({i}, {j}) listed twice")
        for c in terms.values():
            if isinstance(c, bool) or not isinstance(c, (int, float)) or not np.isfinite(c):
                raise InvalidInputError(f"bad coefficient {c!r}")
        components[(i, j)] = Poly(n, terms)
    return PolyTwoForm.from_components(n, components)


def two_form_document(w: PolyTwoForm) -> dict:
    omega = []
    for (i, j), p in sorted(w.omega.items()):
        monos = [{"exponents": list(e), "coeff": c} for e, c in sorted(p.terms.items())]
        omega.append({"i": i, "j": j, "monomials": monos})
    return {"dimension": w.n, "omega": omega}


def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path} is not valid JSON: {exc}") from None


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"
