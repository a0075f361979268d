"""JSON scenario files and cochain serialization.

Complex numbers are ``[re, im]`` (a bare real is accepted on input),
matrices are row-major nested arrays, per-simple maps are keyed by simple
label, ``rho`` is keyed by basis label with sub-keys ``pp``/``mm`` and ``F``
by ``pm`` (``Q``) / ``mp`` (``P``). Path blocks are polynomials given by
coefficient matrices, lowest degree first.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from .algebra import FiniteAlgebra
from .category import CategoryContext
from .cochains import CyclicCochain
from .errors import InputValidationError
from .fredholm import FredholmModule
from .graded import GradedHilbObject
from .homotopy import InversePath, MatrixPath, MatrixPolynomial, OperatorPath, PiecewiseMatrixPolynomial

__all__ = [
    "SCHEMA_VERSION",
    "ScenarioError",
    "Scenario",
    "load_scenario",
    "parse_scenario",
    "scenario_to_json",
    "cochain_to_json",
    "cochain_from_json",
    "save_cochain",
    "load_cochain",
    "load_schema",
    "fixture_path",
    "dumps",
]

SCHEMA_VERSION = 1


class ScenarioError(InputValidationError):
    """A scenario or cochain file that does not parse; ``where`` is a JSON path like ``$.module.rho.e``."""

    def __init__(self, message: str, where: str = "$"):
        super().__init__(f"{where}: {message}")
        self.where = where


@lru_cache(maxsize=None)
def load_schema(name: str = "scenario") -> dict:
    text = resources.files("catchern").joinpath("data", f"{name}.schema.json").read_text()
    return json.loads(text)


def fixture_path(name: str) -> Path:
    """Location of a shipped fixture, e.g. ``fixture_path("proj")``."""
    return Path(str(resources.files("catchern").joinpath("data", f"{name}.json")))


def _json_path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def _validate_schema(data: Any, name: str):
    validator = jsonschema.Draft202012Validator(load_schema(name))
    errors = sorted(validator.iter_errors(data), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        err = errors[0]
        raise ScenarioError(err.message, _json_path(err.absolute_path))


# -- values ---------------------------------------------------------------------


def _complex(v, where) -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v):
        return complex(v[0], v[1])
    raise ScenarioError("complex numbers are [re, im]", where)


def _array(v, depth: int, where) -> np.ndarray:
    """Nested lists ``depth`` levels deep whose leaves are complex entries."""

    def convert(x, level, path):
        if level == depth:
            return _complex(x, path)
        if not isinstance(x, list):
            raise ScenarioError(f"expected an array nested {depth} deep", path)
        return [convert(y, level + 1, f"{path}[{i}]") for i, y in enumerate(x)]

    out = convert(v, 0, where)
    try:
        arr = np.array(out, dtype=complex)
    except ValueError:
        raise ScenarioError("ragged array", where) from None
    if arr.ndim != depth:
        if arr.size == 0:
            return arr.reshape((0,) * depth)
        raise ScenarioError("ragged array", where)
    if not np.all(np.isfinite(arr)):
        raise ScenarioError("entries must be finite", where)
    return arr


def _matrix(v, shape, where) -> np.ndarray:
    M = _array(v, 2, where)
    if M.size == 0 and 0 in shape:
        return np.zeros(shape, dtype=complex)
    if M.shape != tuple(shape):
        raise ScenarioError(f"expected a {shape[0]}x{shape[1]} matrix, got shape {M.shape}", where)
    return M


def _encode(z: complex) -> list:
    return [float(z.real), float(z.imag)]


def _encode_array(A: np.ndarray):
    A = np.asarray(A, dtype=complex)
    if A.ndim == 0:
        return _encode(complex(A))
    return [_encode_array(x) for x in A]


_PAIR = re.compile(r"\[\s*(-?[0-9][0-9.eE+-]*|-?Infinity|NaN),\s*(-?[0-9][0-9.eE+-]*|-?Infinity|NaN)\s*\]")


def dumps(obj, indent: int | None = 1) -> str:
    """``json.dumps`` with each ``[re, im]`` pair kept on one line."""
    text = json.dumps(obj, indent=indent)
    return _PAIR.sub(r"[\1, \2]", text) if indent is not None else text


# -- scenarios ------------------------------------------------------------------


@dataclass
class Scenario:
    category: CategoryContext
    algebra: FiniteAlgebra
    module: FredholmModule
    path: OperatorPath | None
    digest: str
    source: str | None = None


def _poly(v, shape, where) -> MatrixPath:
    if "coeffs" in v:
        coeffs = [_matrix(m, shape, f"{where}.coeffs[{i}]") for i, m in enumerate(v["coeffs"])]
        try:
            return MatrixPolynomial(np.stack(coeffs).reshape((len(coeffs),) + tuple(shape)))
        except InputValidationError as exc:
            raise ScenarioError(str(exc), where) from None
    pieces = []
    for j, piece in enumerate(v["pieces"]):
        coeffs = [_matrix(m, shape, f"{where}.pieces[{j}][{i}]") for i, m in enumerate(piece)]
        pieces.append(MatrixPolynomial(np.stack(coeffs).reshape((len(coeffs),) + tuple(shape))))
    try:
        return PiecewiseMatrixPolynomial(v["breaks"], pieces)
    except Exception as exc:  # structural and validation errors alike
        raise ScenarioError(str(exc), where) from None


def _check_keys(given, allowed, where, what):
    unknown = sorted(set(given) - set(allowed))
    if unknown:
        raise ScenarioError(f"unknown {what} {unknown[0]!r}", f"{where}.{unknown[0]}")


def parse_scenario(data: dict, *, digest: str | None = None, source: str | None = None) -> Scenario:
    """Build the category, algebra, module and optional path described by ``data``."""
    _validate_schema(data, "scenario")
    if digest is None:
        digest = hashlib.sha256(json.dumps(data, sort_keys=True).encode()).hexdigest()

    cat = data["category"]
    try:
        ctx = CategoryContext(tuple(cat["simples"]), cat.get("quantum_dims"))
    except InputValidationError as exc:
        raise ScenarioError(str(exc), "$.category") from None

    alg = data["algebra"]
    n = len(alg["basis"])
    c = _array(alg["structure_constants"], 3, "$.algebra.structure_constants")
    if c.shape != (n, n, n):
        raise ScenarioError(f"expected shape {(n, n, n)}, got {c.shape}", "$.algebra.structure_constants")
    algebra = FiniteAlgebra(tuple(alg["basis"]), c)

    mod = data["module"]
    _check_keys(mod["dims"], ctx.simples, "$.module.dims", "simple")
    dims = {s: tuple(mod["dims"].get(s, (0, 0))) for s in ctx.simples}
    space = GradedHilbObject.from_dims(ctx, dims)

    rho = {}
    _check_keys(mod["rho"], algebra.basis, "$.module.rho", "basis label")
    for label, per in mod["rho"].items():
        _check_keys(per, ctx.simples, f"$.module.rho.{label}", "simple")
        rho[label] = {}
        for s, blocks in per.items():
            p_, m_ = dims[s]
            rho[label][s] = {
                key: _matrix(val, {"pp": (p_, p_), "mm": (m_, m_)}[key], f"$.module.rho.{label}.{s}.{key}")
                for key, val in blocks.items()
            }
    f_blocks = {}
    _check_keys(mod["F"], ctx.simples, "$.module.F", "simple")
    for s, blocks in mod["F"].items():
        p_, m_ = dims[s]
        f_blocks[s] = {
            key: _matrix(val, {"pm": (p_, m_), "mp": (m_, p_)}[key], f"$.module.F.{s}.{key}")
            for key, val in blocks.items()
        }
    module = FredholmModule.from_blocks(space, algebra, rho, f_blocks, p=mod.get("p", 1.0))

    path = None
    if "path" in data:
        pd = data["path"]
        prho = {}
        _check_keys(pd["rho"], algebra.basis, "$.path.rho", "basis label")
        for label, per in pd["rho"].items():
            _check_keys(per, ctx.simples, f"$.path.rho.{label}", "simple")
            prho[label] = {}
            for s, blocks in per.items():
                p_, m_ = dims[s]
                prho[label][s] = {
                    key: _poly(val, {"pp": (p_, p_), "mm": (m_, m_)}[key], f"$.path.rho.{label}.{s}.{key}")
                    for key, val in blocks.items()
                }
        pf = None
        if "F" in pd:
            pf = {}
            _check_keys(pd["F"], ctx.simples, "$.path.F", "simple")
            for s, blocks in pd["F"].items():
                p_, m_ = dims[s]
                P = _poly(blocks["mp"], (m_, p_), f"$.path.F.{s}.mp")
                Q = blocks.get("pm")
                pf[s] = {"mp": P, "pm": InversePath(P) if Q is None else _poly(Q, (p_, m_), f"$.path.F.{s}.pm")}
        path = OperatorPath(space, algebra, prho, pf, pd.get("t_end", 1.0), module.p)
    return Scenario(ctx, algebra, module, path, digest, source)


def load_scenario(file) -> Scenario:
    """Read and parse a scenario file; the digest is the SHA-256 of its bytes."""
    raw = Path(file).read_bytes()
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"not valid JSON ({exc.msg} at line {exc.lineno})") from None
    return parse_scenario(data, digest=hashlib.sha256(raw).hexdigest(), source=str(file))


def _poly_to_json(path: MatrixPath) -> dict:
    if isinstance(path, MatrixPolynomial):
        return {"coeffs": _encode_array(path.coeffs)}
    if isinstance(path, PiecewiseMatrixPolynomial):
        return {"breaks": [float(b) for b in path.breaks], "pieces": [_encode_array(p.coeffs) for p in path.pieces]}
    raise InputValidationError(f"{type(path).__name__} blocks cannot be written to a scenario file")


def scenario_to_json(module: FredholmModule, path: OperatorPath | None = None, description: str | None = None) -> dict:
    """The scenario document for ``module`` (and ``path``), inverse of :func:`parse_scenario`."""
    space = module.space
    ctx = space.ctx
    out: dict = {"schema_version": SCHEMA_VERSION}
    if description:
        out["description"] = description
    out["category"] = {"simples": list(ctx.simples)}
    if ctx.quantum_dims is not None:
        out["category"]["quantum_dims"] = list(ctx.quantum_dims)
    out["algebra"] = {
        "basis": list(module.algebra.basis),
        "structure_constants": _encode_array(module.algebra.structure_constants),
    }
    out["module"] = {
        "dims": {s: [space.plus.dim(s), space.minus.dim(s)] for s in ctx.simples},
        "rho": {
            label: {s: {k: _encode_array(r.block(s, k)) for k in ("pp", "mm")} for s in ctx.simples}
            for label, r in zip(module.algebra.basis, module.rho)
        },
        "F": {s: {k: _encode_array(module.f_op.block(s, k)) for k in ("pm", "mp")} for s in ctx.simples},
        "p": module.p,
    }
    if path is not None:
        pd: dict = {"t_end": path.t_end, "rho": {}}
        for label in path.algebra.basis:
            pd["rho"][label] = {
                s: {k: _poly_to_json(path.block(label, s, k)) for k in ("pp", "mm")} for s in ctx.simples
            }
        if path.f is not None:
            pd["F"] = {}
            for s in ctx.simples:
                P = path.block("F", s, "mp")
                Q = path.block("F", s, "pm")
                pd["F"][s] = {"mp": _poly_to_json(P)}
                pd["F"][s]["pm"] = None if isinstance(Q, InversePath) and Q.inner is P else _poly_to_json(Q)
        out["path"] = pd
    return out


# -- cochains -------------------------------------------------------------------


def cochain_to_json(psi: CyclicCochain) -> dict:
    """Serialize a cochain; floats are written with ``repr`` precision, so reloading is bit-exact."""
    out = {
        "schema_version": SCHEMA_VERSION,
        "kind": "cochain",
        "basis": list(psi.algebra.basis),
        "structure_constants": _encode_array(psi.algebra.structure_constants),
        "degree": psi.degree,
        "tensor": _encode_array(psi.tensor),
    }
    if psi.unital_tensor is not None:
        out["unital_tensor"] = _encode_array(psi.unital_tensor)
    return out


def cochain_from_json(data: dict, algebra: FiniteAlgebra | None = None) -> CyclicCochain:
    """Inverse of :func:`cochain_to_json`.

    With ``algebra`` given, the stored basis labels must match it; otherwise
    the algebra is rebuilt from the stored structure constants.
    """
    _validate_schema(data, "cochain")
    basis = tuple(data["basis"])
    if algebra is None:
        if "structure_constants" not in data:
            raise ScenarioError("no algebra given and none stored", "$.structure_constants")
        algebra = FiniteAlgebra(basis, _array(data["structure_constants"], 3, "$.structure_constants"))
    elif algebra.basis != basis:
        raise ScenarioError(f"basis {list(basis)} does not match the algebra {list(algebra.basis)}", "$.basis")
    k = data["degree"]
    d = algebra.dim
    T = _array(data["tensor"], k + 1, "$.tensor")
    if T.shape != (d,) * (k + 1):
        raise ScenarioError(f"expected shape {(d,) * (k + 1)}, got {T.shape}", "$.tensor")
    U = None
    if "unital_tensor" in data:
        U = _array(data["unital_tensor"], k + 1, "$.unital_tensor")
        if U.shape != (d + 1,) * (k + 1):
            raise ScenarioError(f"expected shape {(d + 1,) * (k + 1)}, got {U.shape}", "$.unital_tensor")
    return CyclicCochain(algebra, k, T, U)


def save_cochain(psi: CyclicCochain, file) -> None:
    Path(file).write_text(json.dumps(cochain_to_json(psi)))


def load_cochain(file, algebra: FiniteAlgebra | None = None) -> CyclicCochain:
    try:
        data = json.loads(Path(file).read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"not valid JSON ({exc.msg} at line {exc.lineno})") from None
    return cochain_from_json(data, algebra)
