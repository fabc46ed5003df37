"""Problem-spec parsing and deterministic JSON report output."""

import json
import math

from .certificate import CertificateOptions
from .dual import SolverOptions
from .entropy import FAMILIES
from .errors import BadGrid, LengthMismatch, RankDeficientBasis, SpecError
from .measure import (
    GAUSS_LEGENDRE,
    RULES,
    build_counting_grid,
    build_interval_grid,
    build_real_line_grid,
)
from .oracle import OracleOptions
from .problem import Basis, MomentProblem

__all__ = ["ParsedSpec", "load_spec", "parse_spec", "dumps_report", "SCHEMA_VERSION"]

SCHEMA_VERSION = "1"
DEFAULT_N = 400
DEFAULT_RADIUS = 10.0


class ParsedSpec:
    """A validated problem together with the option overrides it carried."""

    def __init__(self, problem, solver, certificate, oracle, raw):
        self.problem = problem
        self.solver = solver
        self.certificate = certificate
        self.oracle = oracle
        self.raw = raw

    def echo(self):
        p = self.problem
        return {
            "entropy": {"family": p.entropy.name},
            "measure": p.measure.describe(),
            "basis": [b.to_json() for b in p.basis],
            "targets": [float(v) for v in p.targets],
        }


def _field(obj, key, path, kind=None, default=None, required=False):
    if not isinstance(obj, dict):
        raise SpecError(f"{path}: expected an object")
    if key not in obj:
        if required:
            raise SpecError(f"{path}.{key}: missing required field")
        return default
    value = obj[key]
    where = f"{path}.{key}"
    if kind == "number":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise SpecError(f"{where}: expected a number, got {value!r}")
        if not math.isfinite(value):
            raise SpecError(f"{where}: must be finite")
        return float(value)
    if kind == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise SpecError(f"{where}: expected an integer, got {value!r}")
        return value
    if kind == "str" and not isinstance(value, str):
        raise SpecError(f"{where}: expected a string, got {value!r}")
    return value


def _number_list(values, path):
    if not isinstance(values, list) or not values:
        raise SpecError(f"{path}: expected a non-empty array of numbers")
    out = []
    for i, v in enumerate(values):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise SpecError(f"{path}[{i}]: expected a finite number, got {v!r}")
        out.append(float(v))
    return out


def _parse_basis(raw):
    items = raw if isinstance(raw, list) else [raw]
    if not items:
        raise SpecError("basis: need at least one basis function")
    basis = []
    for i, item in enumerate(items):
        path = f"basis[{i}]"
        kind = _field(item, "kind", path, "str", required=True)
        if kind == "monomial":
            degree = _field(item, "degree", path, "int", required=True)
            if degree < 0:
                raise SpecError(f"{path}.degree: must be >= 0")
            basis.append(Basis("monomial", degree=degree))
        elif kind == "tabulated":
            values = _number_list(_field(item, "values", path, required=True), f"{path}.values")
            basis.append(Basis("tabulated", values=values))
        else:
            raise SpecError(f"{path}.kind: expected 'monomial' or 'tabulated', got {kind!r}")
    return basis


def _default_radius(basis, targets):
    """``10 * sqrt(b3 / b1)`` when the targets include the zeroth and second
    monomial moments with positive values, else 10."""
    by_degree = {
        b.degree: t for b, t in zip(basis, targets) if b.kind == "monomial"
    }
    b1, b3 = by_degree.get(0), by_degree.get(2)
    if b1 and b3 and b1 > 0 and b3 > 0:
        return DEFAULT_RADIUS * math.sqrt(b3 / b1)
    return DEFAULT_RADIUS


def _parse_measure(raw, basis, targets):
    path = "measure"
    kind = _field(raw, "kind", path, "str", required=True)
    rule = _field(raw, "rule", path, "str", default=GAUSS_LEGENDRE)
    if rule not in RULES:
        raise SpecError(f"{path}.rule: expected one of {list(RULES)}, got {rule!r}")
    try:
        if kind == "interval":
            lo = _field(raw, "lo", path, "number", required=True)
            hi = _field(raw, "hi", path, "number", required=True)
            n = _field(raw, "n", path, "int", default=DEFAULT_N)
            return build_interval_grid(lo, hi, n, rule)
        if kind == "real_line":
            radius = _field(raw, "radius", path, "number")
            if radius is None:
                radius = _default_radius(basis, targets)
            n = _field(raw, "n", path, "int", default=DEFAULT_N)
            return build_real_line_grid(radius, n, rule)
        if kind == "counting":
            n = _field(raw, "n", path, "int", required=True)
            return build_counting_grid(n)
    except BadGrid as exc:
        raise SpecError(f"{path}: {exc}") from None
    raise SpecError(f"{path}.kind: expected 'interval', 'real_line' or 'counting', got {kind!r}")


def _parse_options(raw):
    raw = raw or {}
    if not isinstance(raw, dict):
        raise SpecError("options: expected an object")
    solver_raw = raw.get("solver") or {}
    cert_raw = raw.get("certificate") or {}
    oracle_raw = raw.get("oracle") or {}
    solver = {}
    for key, target, kind in (
        ("tol", "tol_moments", "number"),
        ("max_iter", "max_iter", "int"),
        ("init", "init", "str"),
    ):
        v = _field(solver_raw, key, "options.solver", kind)
        if v is not None:
            solver[target] = v
    cert = {}
    for key, kind in (
        ("directions", "int"),
        ("seed", "int"),
        ("dd_tol", "number"),
        ("lmm_tol", "number"),
    ):
        v = _field(cert_raw, key, "options.certificate", kind)
        if v is not None:
            cert[key] = v
    oracle = {}
    for key, kind in (("step", "number"), ("max_iter", "int"), ("tol", "number")):
        v = _field(oracle_raw, key, "options.oracle", kind)
        if v is not None:
            oracle[key] = v
    return solver, cert, oracle


def parse_spec(raw):
    """Validate a decoded spec object into a :class:`ParsedSpec`."""
    if not isinstance(raw, dict):
        raise SpecError("spec: top level must be an object")
    entropy = _field(raw, "entropy", "spec", required=True)
    family = _field(entropy, "family", "entropy", "str", required=True)
    if family not in FAMILIES:
        raise SpecError(f"entropy.family: unknown family {family!r}; expected one of {sorted(FAMILIES)}")
    basis = _parse_basis(_field(raw, "basis", "spec", required=True))
    targets = _number_list(_field(raw, "targets", "spec", required=True), "targets")
    if len(targets) != len(basis):
        raise SpecError(f"targets: {len(targets)} values for {len(basis)} basis functions")
    measure = _parse_measure(_field(raw, "measure", "spec", required=True), basis, targets)
    try:
        problem = MomentProblem(family, measure, basis, targets)
    except (LengthMismatch, RankDeficientBasis, ValueError) as exc:
        raise SpecError(f"problem: {exc}") from None
    solver, cert, oracle = _parse_options(raw.get("options"))
    try:
        return ParsedSpec(
            problem,
            SolverOptions(**solver),
            CertificateOptions(**cert),
            OracleOptions(**oracle),
            raw,
        )
    except ValueError as exc:
        raise SpecError(f"options: {exc}") from None


def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SpecError(f"{path}: cannot read ({exc.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON ({exc.msg})") from None


def load_spec(path):
    try:
        return parse_spec(load_json(path))
    except SpecError as exc:
        if str(exc).startswith(str(path)):
            raise
        raise SpecError(f"{path}: {exc}") from None


def _format_float(x):
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def _emit(obj, indent, level, out):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(_format_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            out.append(f"{pad}{json.dumps(str(k), ensure_ascii=False)}: ")
            _emit(v, indent, level + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            out.append("[" + ", ".join(
                str(v) if isinstance(v, int) else _format_float(v) for v in obj
            ) + "]")
            return
        out.append("[\n")
        for i, v in enumerate(obj):
            out.append(pad)
            _emit(v, indent, level + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "]")
    elif hasattr(obj, "tolist"):
        _emit(obj.tolist(), indent, level, out)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_report(obj, indent=2):
    """Serialize with 17 significant digits so parsing and re-emitting a
    report reproduces it byte for byte. Non-finite floats become the strings
    ``"inf"``, ``"-inf"`` and ``"nan"``."""
    out = []
    _emit(obj, indent, 0, out)
    out.append("\n")
    return "".join(out)
