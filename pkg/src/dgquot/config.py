"""Instance configuration files.

A config is a JSON object::

    {
      "ring":    {"type": "polynomial", "variables": 2},
      "module":  {"type": "free", "rank": 1},
      "floor":   1,
      "ceiling": 4,
      "hilbert": [1, 2, 3, 4],
      "field":   "rational",
      "seed":    0,
      "point":   [[1], [0]]
    }

``hilbert`` lists ``h(floor), ..., h(ceiling)`` (or maps degrees to values).
``field`` is ``"rational"`` or ``{"prime": q}``. ``point`` is an optional seed
``S_floor`` (columns) used by commands that need a reference classical point.
Raw rings and modules give dimension tables and structure matrices instead::

    "ring":   {"type": "raw", "dims": {"1": 2, ...}, "mult": {"1,1": <matrix>, ...}}
    "module": {"type": "raw", "dims": {...}, "action": {"1,1": <matrix>, ...}}

with matrices as ``{"rows", "cols", "entries": [[r, c, "p/q"], ...]}``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .exact import GF, QQ, ContractError, ExactMatrix, Field
from .graded import GradedModule, GradedRing, HilbertData, build_polynomial_ring, free_module
from .instance import Instance
from .io import digest, matrix_from_json


class ConfigError(ValueError):
    """Malformed configuration; ``line`` points into the source text when known."""

    def __init__(self, message: str, path: str = "<config>", line: Optional[int] = None):
        self.message, self.path, self.line = message, path, line
        loc = f"{path}:{line}" if line else path
        super().__init__(f"{loc}: {message}")


class InvariantViolation(ValueError):
    def __init__(self, invariant: str, detail: str, path: str = "<config>", line: Optional[int] = None):
        self.invariant, self.detail = invariant, detail
        loc = f"{path}:{line}" if line else path
        super().__init__(f"{loc}: {detail} [{invariant}]")


KNOWN_KEYS = {"ring", "module", "floor", "ceiling", "hilbert", "field", "seed", "point", "name"}


def _key_line(text: str, key: str) -> Optional[int]:
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count("\n", 0, m.start()) + 1 if m else None


@dataclass
class InstanceConfig:
    raw: dict
    path: str = "<config>"
    text: str = ""

    @property
    def digest(self) -> str:
        return digest(self.raw)

    def line_of(self, key: str) -> Optional[int]:
        return _key_line(self.text, key)

    def error(self, key: str, message: str) -> ConfigError:
        return ConfigError(message, self.path, self.line_of(key))

    # ------------------------------------------------------------ fields

    def _int(self, key: str, default=None, minimum: Optional[int] = None) -> int:
        v = self.raw.get(key, default)
        if v is None:
            raise self.error(key, f"missing required key {key!r}")
        if isinstance(v, bool) or not isinstance(v, int):
            raise self.error(key, f"{key!r} must be an integer, got {v!r}")
        if minimum is not None and v < minimum:
            raise self.error(key, f"{key!r} must be >= {minimum}, got {v}")
        return v

    @property
    def floor(self) -> int:
        return self._int("floor", minimum=1)

    @property
    def ceiling(self) -> int:
        t = self._int("ceiling", minimum=1)
        if t < self.floor:
            raise self.error("ceiling", f"ceiling {t} below floor {self.floor}")
        return t

    @property
    def seed(self) -> int:
        return self._int("seed", default=0, minimum=0)

    @property
    def field(self) -> Field:
        v = self.raw.get("field", "rational")
        if v in ("rational", "QQ"):
            return QQ
        if isinstance(v, dict) and set(v) == {"prime"} and isinstance(v["prime"], int):
            try:
                return GF(v["prime"])
            except ContractError as exc:
                raise self.error("field", str(exc)) from None
        raise self.error("field", f'field must be "rational" or {{"prime": q}}, got {v!r}')

    def hilbert_values(self) -> dict[int, int]:
        a, t = self.floor, self.ceiling
        v = self.raw.get("hilbert")
        if isinstance(v, list):
            if len(v) != t - a + 1:
                raise self.error("hilbert", f"hilbert needs {t - a + 1} values for degrees {a}..{t}, got {len(v)}")
            vals = dict(zip(range(a, t + 1), v))
        elif isinstance(v, dict):
            try:
                vals = {int(k): x for k, x in v.items()}
            except ValueError:
                raise self.error("hilbert", "hilbert keys must be degrees") from None
            missing = [s for s in range(a, t + 1) if s not in vals]
            if missing:
                raise self.error("hilbert", f"hilbert value missing at degree {missing[0]}")
        else:
            raise self.error("hilbert", "hilbert must be a list or an object")
        for s, x in vals.items():
            if isinstance(x, bool) or not isinstance(x, int) or x < 0:
                raise self.error("hilbert", f"hilbert value at degree {s} must be a non-negative integer")
        return {s: vals[s] for s in range(a, t + 1)}

    # ----------------------------------------------------------- builders

    def build_ring(self) -> GradedRing:
        spec = self.raw.get("ring")
        t = self.ceiling
        if not isinstance(spec, dict) or "type" not in spec:
            raise self.error("ring", "ring must be an object with a 'type'")
        if spec["type"] == "polynomial":
            n = spec.get("variables")
            if isinstance(n, bool) or not isinstance(n, int) or n < 1:
                raise self.error("variables", "polynomial ring needs a positive 'variables' count")
            return build_polynomial_ring(n, t)
        if spec["type"] == "raw":
            return self._raw_ring(spec, t)
        raise self.error("ring", f"unknown ring type {spec['type']!r}")

    def _raw_dims(self, spec: dict, key: str) -> dict[int, int]:
        try:
            return {int(k): int(v) for k, v in spec["dims"].items()}
        except (KeyError, AttributeError, ValueError, TypeError):
            raise self.error(key, "raw spec needs 'dims' mapping degrees to dimensions") from None

    def _raw_maps(self, spec: dict, name: str, key: str) -> dict[tuple[int, int], ExactMatrix]:
        out = {}
        for k, m in spec.get(name, {}).items():
            try:
                s1, s2 = (int(x) for x in k.split(","))
                out[(s1, s2)] = matrix_from_json(m, QQ)
            except (ValueError, KeyError, TypeError) as exc:
                raise ConfigError(f"bad {name} entry {k!r}: {exc}", self.path, _key_line(self.text, k) or self.line_of(key)) from None
        return out

    def _raw_ring(self, spec: dict, t: int) -> GradedRing:
        dims = self._raw_dims(spec, "ring")
        dims[0] = 1
        mult = self._raw_maps(spec, "mult", "ring")
        for s in range(0, t + 1):
            d = dims.get(s, 0)
            # unit
            mult[(0, s)] = ExactMatrix.identity(d)
            mult[(s, 0)] = ExactMatrix.identity(d)
        for (s1, s2), m in mult.items():
            if s1 + s2 <= t and (m.rows, m.cols) != (dims.get(s1 + s2, 0), dims.get(s1, 0) * dims.get(s2, 0)):
                raise self.error("mult", f"mult {s1},{s2} has shape {m.rows}x{m.cols}, expected {dims.get(s1 + s2, 0)}x{dims.get(s1, 0) * dims.get(s2, 0)}")
        for s1 in range(1, t + 1):
            for s2 in range(1, t + 1 - s1):
                mult.setdefault((s1, s2), ExactMatrix.zeros(dims.get(s1 + s2, 0), dims.get(s1, 0) * dims.get(s2, 0)))
        ring = GradedRing({s: dims.get(s, 0) for s in range(t + 1)}, mult, t, True)
        if not ring.check_associativity():
            raise InvariantViolation("ring-associativity", "ring multiplication is not associative", self.path, self.line_of("mult"))
        return ring

    def build_module(self, ring: GradedRing) -> GradedModule:
        spec = self.raw.get("module")
        a, t = self.floor, self.ceiling
        if not isinstance(spec, dict) or "type" not in spec:
            raise self.error("module", "module must be an object with a 'type'")
        if spec["type"] == "free":
            r = spec.get("rank", 1)
            if isinstance(r, bool) or not isinstance(r, int) or r < 1:
                raise self.error("rank", "free module needs a positive 'rank'")
            return free_module(ring, r, floor=a, t_max=t)
        if spec["type"] == "raw":
            dims = self._raw_dims(spec, "module")
            action = self._raw_maps(spec, "action", "module")
            for (p, s), m in action.items():
                if p + s <= t and (m.rows, m.cols) != (dims.get(p + s, 0), ring.dim(p) * dims.get(s, 0)):
                    raise self.error("action", f"action {p},{s} has shape {m.rows}x{m.cols}")
            mod = GradedModule(ring, {s: dims.get(s, 0) for s in range(a, t + 1)}, action, a, t)
            if not mod.check_associativity():
                raise InvariantViolation("module-associativity", "module action is not associative", self.path, self.line_of("action"))
            return mod
        raise self.error("module", f"unknown module type {spec['type']!r}")

    def build(self, strict: bool = False) -> Instance:
        """Assemble the instance; ``strict`` also rejects ``h(s) = dim M_s``."""
        unknown = sorted(set(self.raw) - KNOWN_KEYS)
        if unknown:
            raise self.error(unknown[0], f"unknown key {unknown[0]!r}")
        a, t = self.floor, self.ceiling
        ring = self.build_ring()
        module = self.build_module(ring)
        h = self.hilbert_values()
        for s in range(a, t + 1):
            d = module.dim(s)
            if h[s] > d:
                raise InvariantViolation("hilbert-bound", f"hilbert exceeds module dimension at degree {s} ({h[s]} > {d})", self.path, self.line_of("hilbert"))
            if strict and h[s] == d:
                raise InvariantViolation("hilbert-bound", f"hilbert equals module dimension at degree {s} ({h[s]} = {d})", self.path, self.line_of("hilbert"))
        point = self.raw.get("point")
        if point is not None:
            if not (isinstance(point, list) and len(point) == module.dim(a) and all(isinstance(r, list) and len(r) == h[a] for r in point)):
                raise self.error("point", f"point must be a {module.dim(a)} x {h[a]} matrix (rows of M_{a})")
        return Instance(ring, module, HilbertData(h, a), a, t, self.field, self.seed, str(self.raw.get("name", "")), point)


def parse_config(text: str, path: str = "<config>") -> InstanceConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg} (column {exc.colno})", path, exc.lineno) from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object", path, 1)
    return InstanceConfig(raw, path, text)


def load_config(path) -> InstanceConfig:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", str(path)) from None
    return parse_config(text, str(path))
