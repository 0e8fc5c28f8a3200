"""INI run configuration: parsing, typing and line-anchored validation.

A run file has one ``[run]`` section and one section per experiment::

    [run]
    seed = 2024
    output_dir = out

    [nodal_convergence]
    model = gaussian
    n_list = 500, 1000, 2000
    interval = 0, pi/2

    [nodal_convergence:full]      ; second instance of the same kind
    interval = 0, 2*pi

Section names are ``kind`` or ``kind:label``.  Keys not given take the
defaults listed by ``randtrig list-experiments``.  Real-valued entries
accept arithmetic in ``pi`` (``2*pi/256``).  Overrides on the command
line use ``seed=7``, ``output_dir=...`` or ``section.key=value``.
"""

from __future__ import annotations

import ast
import configparser
import math
import operator
import os
import re
from dataclasses import dataclass, field
from pathlib import Path

from .coeffs import get_model
from .errors import ConfigurationError

__all__ = ["OUTPUT_ENV", "Param", "RunConfig", "SectionConfig", "load_config", "parse_real", "format_value"]

OUTPUT_ENV = "RANDTRIG_OUTPUT_DIR"
DEFAULT_OUTPUT = "randtrig-out"
MAX_SEED = (1 << 64) - 1

_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def parse_real(text: str) -> float:
    """Evaluate a real literal with optional ``pi`` arithmetic (+ - * / only)."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and type(node.value) in (int, float):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        raise ValueError(f"not a real number: {text!r}")

    try:
        return float(ev(ast.parse(text.strip(), mode="eval")))
    except (SyntaxError, ZeroDivisionError) as exc:
        raise ValueError(f"not a real number: {text!r}") from exc


def _split(text):
    return [t.strip() for t in text.split(",") if t.strip()]


def _int(text):
    if not re.fullmatch(r"[+-]?\d+", text.strip()):
        raise ValueError(f"not an integer: {text!r}")
    return int(text)


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


_PARSERS = {
    "int": _int,
    "float": parse_real,
    "str": lambda s: s.strip(),
    "bool": _bool,
    "ints": lambda s: tuple(_int(x) for x in _split(s)),
    "floats": lambda s: tuple(parse_real(x) for x in _split(s)),
    "strs": lambda s: tuple(_split(s)),
    "interval": lambda s: tuple(parse_real(x) for x in _split(s)),
}


@dataclass(frozen=True)
class Param:
    """One typed experiment parameter with its default (as config text)."""

    kind: str
    default: str
    doc: str = ""
    tolerance: bool = False

    def parse(self, text: str):
        return _PARSERS[self.kind](text)


def check_value(name: str, kind: str, value) -> None:
    """Schema invariants shared by all experiments; raises ValueError."""
    if kind in ("ints", "floats", "strs") and len(value) == 0:
        raise ValueError("empty list")
    if name == "n_list":
        if any(v < 1 for v in value):
            raise ValueError("degrees must be >= 1")
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("n_list must be strictly increasing")
    if name in ("n", "trials", "polys", "per_model", "grid_size", "samples", "x_samples", "gp_trials", "bins") and value < 1:
        raise ValueError(f"{name} must be >= 1")
    if kind == "interval":
        if len(value) != 2:
            raise ValueError("interval needs two endpoints a, b")
        a, b = value
        if not (-1e-12 <= a < b <= 2 * math.pi + 1e-12):
            raise ValueError("interval must satisfy 0 <= a < b <= 2*pi")
    if name in ("model", "models"):
        for m in (value if isinstance(value, tuple) else (value,)):
            try:
                get_model(m)
            except ConfigurationError as exc:
                raise ValueError(str(exc)) from None
    if name == "seed" and not 0 <= value <= MAX_SEED:
        raise ValueError("seed must be a 64-bit unsigned integer")


def format_value(v) -> str:
    """Canonical text for a parsed value (used in the manifest echo)."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return ", ".join(format_value(x) for x in v)
    return str(v)


@dataclass
class SectionConfig:
    name: str
    kind: str
    enabled: bool
    seed: int
    params: dict


@dataclass
class RunConfig:
    path: str
    seed: int
    output_dir: str
    sections: list[SectionConfig] = field(default_factory=list)


def _line_index(text: str) -> dict:
    """(section, key) -> 1-based line; (section, None) for headers."""
    idx, sect = {}, None
    for i, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s or s[0] in "#;":
            continue
        m = re.fullmatch(r"\[(.+)\]", s)
        if m:
            sect = m.group(1).strip()
            idx.setdefault((sect, None), i)
            continue
        m = re.match(r"([^=:]+?)\s*[=:]", s)
        if m and sect is not None:
            idx.setdefault((sect, m.group(1).strip().lower()), i)
    return idx


def load_config(path, overrides=(), registry=None) -> RunConfig:
    """Parse and validate a run file.  Raises ConfigurationError with ``path:line:`` prefixes."""
    if registry is None:
        from .registry import REGISTRY as registry
    path = str(path)
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"{path}: cannot read config: {exc.strerror or exc}") from None
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"),
                                   default_section="__defaults__")
    try:
        cp.read_string(text, source=path)
    except configparser.Error as exc:
        raise ConfigurationError(" ".join(str(exc).split())) from None
    lines = _line_index(text)

    def where(section, key=None):
        ln = lines.get((section, key), lines.get((section, None)))
        return f"{path}:{ln}" if ln else path

    # overrides are applied on top of the file; remember them for error messages
    origin = {}
    for ov in overrides:
        if "=" not in ov:
            raise ConfigurationError(f"override {ov!r}: expected key=value")
        k, v = (x.strip() for x in ov.split("=", 1))
        if "." in k:
            sect, key = k.split(".", 1)
        else:
            sect, key = "run", k
        key = key.lower()
        if not cp.has_section(sect):
            raise ConfigurationError(f"override {ov!r}: no section [{sect}] in {path}")
        cp.set(sect, key, v)
        origin[(sect, key)] = f"override {ov!r}"

    def fail(section, key, msg):
        loc = origin.get((section, key)) or where(section, key)
        raise ConfigurationError(f"{loc}: [{section}] {key}: {msg}" if key else f"{loc}: [{section}] {msg}")

    if not cp.has_section("run"):
        raise ConfigurationError(f"{path}:1: missing [run] section")
    run = cp["run"]
    for key in run:
        if key not in ("seed", "output_dir"):
            fail("run", key, "unknown key (expected seed, output_dir)")
    if "seed" not in run:
        fail("run", None, "missing required key 'seed'")
    try:
        seed = _int(run["seed"])
        check_value("seed", "int", seed)
    except ValueError as exc:
        fail("run", "seed", str(exc))
    out = run.get("output_dir") or os.environ.get(OUTPUT_ENV) or DEFAULT_OUTPUT
    cfg = RunConfig(path=path, seed=seed, output_dir=out)

    for name in cp.sections():
        if name == "run":
            continue
        kind = name.split(":", 1)[0].strip()
        if kind not in registry:
            fail(name, None, f"unknown experiment kind {kind!r}; see list-experiments")
        entry = registry[kind]
        params, enabled, sseed = {}, True, seed
        for key, raw in cp[name].items():
            try:
                if key == "enabled":
                    enabled = _bool(raw)
                elif key == "seed":
                    sseed = _int(raw)
                    check_value("seed", "int", sseed)
                elif key in entry.params:
                    params[key] = entry.params[key].parse(raw)
                    check_value(key, entry.params[key].kind, params[key])
                else:
                    raise ValueError(f"unknown key for {kind} (known: {', '.join(sorted(entry.params))})")
            except ValueError as exc:
                fail(name, key, str(exc))
        for key, par in entry.params.items():
            if key not in params:
                params[key] = par.parse(par.default)
        if entry.validate is not None:
            try:
                entry.validate(params)
            except ValueError as exc:
                fail(name, None, str(exc))
        cfg.sections.append(SectionConfig(name=name, kind=kind, enabled=enabled, seed=sseed, params=params))
    if not cfg.sections:
        raise ConfigurationError(f"{path}: no experiment sections")
    return cfg
