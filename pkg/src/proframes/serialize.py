"""JSON encoding of chains, modules, frames and operators, plus scenario files.

Wire format
-----------
* complex number: ``[re, im]``
* matrix: row-major nested list of complex numbers
* algebra element: list of its top-level block matrices
* chain: ``{"levels": [{"blocks": [...]}, ...], "connecting": [[...], ...]}``
* module: ``{"rank": d, "projection": null | d x d nested list of elements}``
* frame: list of coordinate vectors, each a list of ``d`` elements

Only top-level data is ever written; lower levels follow from the chain.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .algebra import BlockShape
from .errors import ParseError, ProFrameError, ValidationError
from .frames import Frame
from .hilbert_module import AdjointableOperator, ModuleElement, ModuleSpace, Multiplier
from .prosystem import SeminormChain

DEFAULT_TOL = 1e-9


# ----------------------------------------------------------------- encoding


def format_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    s = format(x, ".17g")
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def dumps(obj: Any, indent: int = 2) -> str:
    """Deterministic JSON: insertion-ordered keys, floats with 17 significant digits."""
    out: list[str] = []
    _emit(obj, out, 0, indent)
    return "".join(out) + "\n"


def _is_leaf_list(obj) -> bool:
    return all(not isinstance(x, (list, tuple, dict)) for x in obj)


def _emit(obj, out, depth, indent):
    pad = " " * (indent * (depth + 1))
    end = " " * (indent * depth)
    if obj is None:
        out.append("null")
    elif isinstance(obj, (bool, np.bool_)):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            out.append(f"{pad}{json.dumps(str(k))}: ")
            _emit(v, out, depth + 1, indent)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, (list, tuple)):
        if _is_leaf_list(obj):
            out.append("[")
            for i, v in enumerate(obj):
                if i:
                    out.append(", ")
                _emit(v, out, depth + 1, indent)
            out.append("]")
            return
        out.append("[\n")
        for i, v in enumerate(obj):
            out.append(pad)
            _emit(v, out, depth + 1, indent)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def matrix_to_json(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def chain_to_json(chain: SeminormChain) -> dict:
    return {
        "levels": [{"blocks": list(s.blocks)} for s in chain.levels],
        "connecting": [list(m) for m in chain.connecting],
    }


def element_blocks_to_json(blocks) -> list:
    return [matrix_to_json(b) for b in blocks]


def vector_to_json(xi: ModuleElement) -> list:
    return [element_blocks_to_json(c.top.blocks) for c in xi.coords]


def operator_to_json(T: AdjointableOperator) -> list:
    return [[element_blocks_to_json(a.top.blocks) for a in row] for row in T.matrix]


def module_to_json(space: ModuleSpace) -> dict:
    return {
        "rank": space.rank,
        "projection": None if space.is_free else operator_to_json(space.projection),
    }


def frame_to_json(frame: Frame) -> list:
    return [vector_to_json(h) for h in frame]


# ----------------------------------------------------------------- decoding


def _complex(obj, path) -> complex:
    if (
        not isinstance(obj, list)
        or len(obj) != 2
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in obj)
    ):
        raise ValidationError(path, "complex numbers are [re, im] pairs of numbers")
    z = complex(float(obj[0]), float(obj[1]))
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValidationError(path, "entries must be finite")
    return z


def matrix_from_json(obj, n: int, path: str) -> np.ndarray:
    if not isinstance(obj, list) or len(obj) != n:
        raise ValidationError(path, f"expected {n} rows")
    out = np.zeros((n, n), dtype=complex)
    for i, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != n:
            raise ValidationError(f"{path}[{i}]", f"expected {n} entries")
        for j, z in enumerate(row):
            out[i, j] = _complex(z, f"{path}[{i}][{j}]")
    return out


def element_blocks_from_json(obj, shape: BlockShape, path: str) -> list[np.ndarray]:
    if not isinstance(obj, list) or len(obj) != len(shape):
        raise ValidationError(path, f"expected a list of {len(shape)} block matrices")
    return [matrix_from_json(b, n, f"{path}[{i}]") for i, (b, n) in enumerate(zip(obj, shape))]


def chain_from_json(obj, path: str = "algebra") -> SeminormChain:
    if not isinstance(obj, dict) or "levels" not in obj:
        raise ValidationError(path, "expected an object with 'levels'")
    levels = obj["levels"]
    if not isinstance(levels, list) or not levels:
        raise ValidationError(f"{path}.levels", "expected a non-empty list")
    shapes = []
    for i, lv in enumerate(levels):
        blocks = lv.get("blocks") if isinstance(lv, dict) else None
        if not isinstance(blocks, list) or not all(isinstance(n, int) and not isinstance(n, bool) for n in blocks):
            raise ValidationError(f"{path}.levels[{i}].blocks", "expected a list of integers")
        try:
            shapes.append(BlockShape(tuple(blocks)))
        except ProFrameError as exc:
            raise ValidationError(f"{path}.levels[{i}].blocks", str(exc)) from exc
    connecting = obj.get("connecting", [])
    if not isinstance(connecting, list) or not all(isinstance(m, list) for m in connecting):
        raise ValidationError(f"{path}.connecting", "expected a list of index lists")
    try:
        return SeminormChain(tuple(shapes), tuple(tuple(m) for m in connecting))
    except (ProFrameError, TypeError) as exc:
        raise ValidationError(f"{path}.connecting", str(exc)) from exc


def operator_blocks_from_json(obj, chain: SeminormChain, rows: int, cols: int, path: str) -> list[np.ndarray]:
    if not isinstance(obj, list) or len(obj) != rows:
        raise ValidationError(path, f"expected a {rows} x {cols} matrix over the algebra")
    entries = []
    for i, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != cols:
            raise ValidationError(f"{path}[{i}]", f"expected {cols} entries")
        entries.append([element_blocks_from_json(a, chain.top_shape, f"{path}[{i}][{j}]") for j, a in enumerate(row)])
    return [np.block([[entries[i][j][b] for j in range(cols)] for i in range(rows)]) for b in range(len(chain.top_shape))]


def module_from_json(obj, chain: SeminormChain, path: str = "module", tol: float = 1e-9) -> ModuleSpace:
    if not isinstance(obj, dict):
        raise ValidationError(path, "expected an object")
    rank = obj.get("rank")
    if not isinstance(rank, int) or isinstance(rank, bool) or rank < 1:
        raise ValidationError(f"{path}.rank", "expected a positive integer")
    proj = obj.get("projection")
    if proj is None:
        return ModuleSpace(chain, rank)
    free = ModuleSpace(chain, rank)
    blocks = operator_blocks_from_json(proj, chain, rank, rank, f"{path}.projection")
    try:
        P = AdjointableOperator.from_blocks(free, free, blocks)
        return ModuleSpace(chain, rank, P, tol)
    except ProFrameError as exc:
        raise ValidationError(f"{path}.projection", str(exc)) from exc


def vector_from_json(obj, space: ModuleSpace, path: str, cls=ModuleElement, tol: float = 1e-9):
    if not isinstance(obj, list) or len(obj) != space.rank:
        raise ValidationError(path, f"expected {space.rank} coordinates")
    coords = [element_blocks_from_json(c, space.chain.top_shape, f"{path}[{j}]") for j, c in enumerate(obj)]
    blocks = [np.vstack([coords[j][b] for j in range(space.rank)]) for b in range(len(space.block_sizes))]
    try:
        return cls.from_blocks(space, blocks, tol=tol)
    except ProFrameError as exc:
        raise ValidationError(path, str(exc)) from exc


def frame_from_json(obj, space: ModuleSpace, path: str, tol: float = 1e-9) -> Frame:
    if not isinstance(obj, list) or not obj:
        raise ValidationError(path, "a frame needs a non-empty list of vectors")
    return Frame(space, [vector_from_json(v, space, f"{path}[{n}]", Multiplier, tol) for n, v in enumerate(obj)])


# ----------------------------------------------------------------- scenarios


@dataclass
class Scenario:
    chain: SeminormChain
    space: ModuleSpace
    frames: dict[str, Frame]
    tolerances: dict[str, float] = field(default_factory=dict)

    @property
    def tol(self) -> float:
        return self.tolerances.get("tol", DEFAULT_TOL)


def scenario_from_json(obj) -> Scenario:
    if not isinstance(obj, dict):
        raise ValidationError("$", "scenario must be a JSON object")
    for key in ("algebra", "module", "frames"):
        if key not in obj:
            raise ValidationError(key, "missing")
    tolerances = obj.get("tolerances") or {}
    if not isinstance(tolerances, dict):
        raise ValidationError("tolerances", "expected an object")
    for k, v in tolerances.items():
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not v >= 0:
            raise ValidationError(f"tolerances.{k}", "expected a non-negative number")
    tolerances = {k: float(v) for k, v in tolerances.items()}
    membership = tolerances.get("membership", 1e-9)
    chain = chain_from_json(obj["algebra"])
    space = module_from_json(obj["module"], chain, tol=membership)
    frames_obj = obj["frames"]
    if not isinstance(frames_obj, dict):
        raise ValidationError("frames", "expected an object mapping names to frames")
    frames = {name: frame_from_json(v, space, f"frames.{name}", membership) for name, v in frames_obj.items()}
    return Scenario(chain, space, frames, tolerances)


def scenario_to_json(s: Scenario) -> dict:
    out = {
        "algebra": chain_to_json(s.chain),
        "module": module_to_json(s.space),
        "frames": {name: frame_to_json(f) for name, f in s.frames.items()},
    }
    if s.tolerances:
        out["tolerances"] = dict(s.tolerances)
    return out


def load_scenario(path) -> Scenario:
    """Read and fully validate a scenario file.

    Raises :class:`ParseError` for unreadable or malformed JSON and
    :class:`ValidationError` (carrying the field path) for content that
    breaks an invariant.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror or exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return scenario_from_json(obj)
