"""
Declarative parameter sweeps over the steady state.

A sweep config is a small text file::

    # comment
    delta_c = -30
    g = 5
    omega_p = 0.1
    n_max = 6                  # or "auto"

    [axis]
    param = delta_a
    start = -5
    stop = 25
    count = 301
    scale = linear             # or "log"

    derive: j_ddi = 3.5*g

Global ``key = value`` lines set :class:`~ddiblockade.model.SystemParams`
fields or run options.  ``derive:`` lines bind one parameter to an affine
function of another and are resolved in dependency order at every grid
point.  Overrides use the same keys (``axis1.count`` addresses the first
axis block) and take precedence over the file.
"""

from __future__ import annotations

import ast
import csv
import io
import itertools
import json
import math
import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from graphlib import CycleError, TopologicalSorter
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .exceptions import BlockadeError, ConfigError
from .hilbert import HilbertSpace
from .model import PARAM_NAMES, SIGN_CONVENTIONS, SystemParams
from .observables import photon_statistics
from .solvers import auto_truncate, solve

OBSERVABLES = ("g2_zero", "mean_n", "p_n", "poisson_deviation")
AXIS_KEYS = ("param", "start", "stop", "count", "scale")


def _version() -> str:
    from . import __version__

    return __version__


@dataclass(frozen=True)
class Axis:
    param: str
    start: float
    stop: float
    count: int
    scale: str = "linear"

    def validate(self):
        if self.param not in PARAM_NAMES:
            raise ConfigError(f"axis parameter {self.param!r} is not a model parameter")
        if self.scale not in ("linear", "log"):
            raise ConfigError(f"axis scale must be 'linear' or 'log', got {self.scale!r}")
        if self.count < 1 or (self.count == 1 and self.start != self.stop):
            raise ConfigError(f"axis {self.param}: count must be >= 2 (or 1 with start == stop)")
        if self.scale == "log" and (self.start <= 0 or self.stop <= 0):
            raise ConfigError(f"axis {self.param}: log spacing needs positive endpoints")

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([float(self.start)])
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)

    @property
    def step(self) -> float:
        return (self.stop - self.start) / (self.count - 1) if self.count > 1 else 0.0


@dataclass(frozen=True)
class DerivedRule:
    """``target = coef * source + offset``."""

    target: str
    source: Optional[str]
    coef: float = 1.0
    offset: float = 0.0

    def __call__(self, values: Dict[str, float]) -> float:
        base = values[self.source] if self.source is not None else 0.0
        return self.coef * base + self.offset

    def __str__(self):
        if self.source is None:
            return f"{self.target} = {self.offset!r}"
        return f"{self.target} = {self.coef!r}*{self.source} + {self.offset!r}"

    @classmethod
    def parse(cls, text: str) -> "DerivedRule":
        if "=" not in text:
            raise ConfigError(f"derived rule needs '=': {text!r}")
        target, expr = (part.strip() for part in text.split("=", 1))
        if target not in PARAM_NAMES:
            raise ConfigError(f"derived target {target!r} is not a model parameter")
        try:
            tree = ast.parse(expr, mode="eval").body
        except SyntaxError as exc:
            raise ConfigError(f"cannot parse derived rule {text!r}") from exc
        coef, source, offset = _affine(tree)
        return cls(target, source, coef, offset)


def _affine(node) -> Tuple[float, Optional[str], float]:
    """Reduce an expression tree to ``(coef, name, offset)`` or fail."""
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return 0.0, None, float(node.value)
    if isinstance(node, ast.Name):
        if node.id not in PARAM_NAMES:
            raise ConfigError(f"unknown parameter {node.id!r} in derived rule")
        return 1.0, node.id, 0.0
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        c, n, o = _affine(node.operand)
        sign = -1.0 if isinstance(node.op, ast.USub) else 1.0
        return sign * c, n, sign * o
    if isinstance(node, ast.BinOp):
        lc, ln, lo = _affine(node.left)
        rc, rn, ro = _affine(node.right)
        if isinstance(node.op, (ast.Add, ast.Sub)):
            sign = 1.0 if isinstance(node.op, ast.Add) else -1.0
            if ln and rn and ln != rn:
                raise ConfigError("derived rules may depend on a single parameter")
            return lc + sign * rc, ln or rn, lo + sign * ro
        if isinstance(node.op, ast.Mult):
            if ln and rn:
                raise ConfigError("derived rules must be affine")
            if ln is None:
                return lo * rc, rn, lo * ro
            return ro * lc, ln, ro * lo
        if isinstance(node.op, ast.Div):
            if rn is not None:
                raise ConfigError("derived rules must be affine")
            return lc / ro, ln, lo / ro
    raise ConfigError(f"unsupported expression in derived rule: {ast.dump(node)}")


@dataclass(frozen=True)
class SweepConfig:
    base: SystemParams
    axes: Tuple[Axis, ...]
    derived: Tuple[DerivedRule, ...] = ()
    observables: Tuple[str, ...] = ("g2_zero", "mean_n")
    n_max: Union[int, str] = "auto"
    tol: float = 1e-10
    auto_tol: float = 1e-8
    workers: int = 1
    check_condition: bool = True
    name: str = "sweep"

    def __post_init__(self):
        self.validate()

    def validate(self):
        if not 1 <= len(self.axes) <= 2:
            raise ConfigError("a sweep needs one or two axes")
        names = [a.param for a in self.axes]
        if len(set(names)) != len(names):
            raise ConfigError(f"duplicate axis parameters: {names}")
        for axis in self.axes:
            axis.validate()
        targets = [r.target for r in self.derived]
        if len(set(targets)) != len(targets):
            raise ConfigError(f"parameter derived more than once: {targets}")
        clash = set(targets) & set(names)
        if clash:
            raise ConfigError(f"derived parameters cannot also be axes: {sorted(clash)}")
        self.ordered_rules()
        unknown = set(self.observables) - set(OBSERVABLES)
        if unknown:
            raise ConfigError(f"unknown observables {sorted(unknown)}; choose from {OBSERVABLES}")
        if self.n_max != "auto" and (not isinstance(self.n_max, int) or self.n_max < 1):
            raise ConfigError(f"n_max must be a positive integer or 'auto', got {self.n_max!r}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.tol <= 0 or self.auto_tol <= 0:
            raise ConfigError("tolerances must be positive")

    def ordered_rules(self) -> List[DerivedRule]:
        by_target = {r.target: r for r in self.derived}
        graph = {r.target: ({r.source} & by_target.keys()) for r in self.derived}
        try:
            order = list(TopologicalSorter(graph).static_order())
        except CycleError as exc:
            raise ConfigError(f"derived rules form a cycle: {exc.args[1]}") from None
        return [by_target[t] for t in order]

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(a.count for a in self.axes)

    def points(self):
        """Axis coordinates in row-major order (last axis fastest)."""
        return itertools.product(*(a.values() for a in self.axes))

    def resolve(self, coords: Sequence[float]) -> Dict[str, float]:
        values = {k: v for k, v in self.base.as_dict().items() if k in PARAM_NAMES}
        for axis, x in zip(self.axes, coords):
            values[axis.param] = float(x)
        for rule in self.ordered_rules():
            values[rule.target] = rule(values)
        return values

    def echo(self) -> dict:
        return {
            "name": self.name,
            "base": self.base.as_dict(),
            "axes": [a.__dict__ for a in self.axes],
            "derived": [str(r) for r in self.derived],
            "observables": list(self.observables),
            "n_max": self.n_max,
            "tol": self.tol,
            "auto_tol": self.auto_tol,
            "check_condition": self.check_condition,
        }


# -- config text ---------------------------------------------------------------

_LINE = re.compile(r"^\s*([A-Za-z_][\w.]*)\s*=\s*(.*?)\s*$")


def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _parse_float(key: str, text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {text!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"{key}: value must be finite")
    return value


def parse_config_text(text: str) -> dict:
    """Split config text into ``{"keys": {...}, "axes": [...], "derive": [...]}``."""
    raw = {"keys": {}, "axes": [], "derive": []}
    in_axis = False
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "[axis]":
            raw["axes"].append({})
            in_axis = True
            continue
        if line.startswith("["):
            raise ConfigError(f"line {lineno}: unknown section {line!r}")
        if line.startswith("derive:"):
            raw["derive"].append(line[len("derive:"):].strip())
            continue
        m = _LINE.match(line)
        if not m:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = m.groups()
        if in_axis and key in AXIS_KEYS:
            if key in raw["axes"][-1]:
                raise ConfigError(f"line {lineno}: duplicate axis key {key!r}")
            raw["axes"][-1][key] = value
        else:
            raw["keys"][key] = value
    return raw


def apply_overrides(raw: dict, overrides: Dict[str, str]) -> dict:
    raw = {"keys": dict(raw["keys"]), "axes": [dict(a) for a in raw["axes"]], "derive": list(raw["derive"])}
    for key, value in overrides.items():
        m = re.fullmatch(r"axis(\d+)\.(\w+)", key)
        if m:
            k, sub = int(m.group(1)), m.group(2)
            if not 1 <= k <= len(raw["axes"]) or sub not in AXIS_KEYS:
                raise ConfigError(f"override {key!r} does not address an existing axis key")
            raw["axes"][k - 1][sub] = value
        elif key == "derive":
            raw["derive"].append(value)
        else:
            raw["keys"][key] = value
    return raw


def config_from_raw(raw: dict) -> SweepConfig:
    keys = dict(raw["keys"])
    params = {}
    for name in PARAM_NAMES:
        if name in keys:
            params[name] = _parse_float(name, keys.pop(name))
    if "sign_convention" in keys:
        conv = keys.pop("sign_convention")
        if conv not in SIGN_CONVENTIONS:
            raise ConfigError(f"sign_convention must be one of {SIGN_CONVENTIONS}")
        params["sign_convention"] = conv
    options = {}
    if "n_max" in keys:
        text = keys.pop("n_max")
        if text == "auto":
            options["n_max"] = "auto"
        else:
            try:
                options["n_max"] = int(text)
            except ValueError:
                raise ConfigError(f"n_max must be an integer or 'auto', got {text!r}") from None
    for name in ("tol", "auto_tol"):
        if name in keys:
            options[name] = _parse_float(name, keys.pop(name))
    if "workers" in keys:
        try:
            options["workers"] = int(keys.pop("workers"))
        except ValueError:
            raise ConfigError("workers must be an integer") from None
    if "check_condition" in keys:
        options["check_condition"] = _parse_bool(keys.pop("check_condition"))
    if "observables" in keys:
        options["observables"] = tuple(x.strip() for x in keys.pop("observables").split(",") if x.strip())
    if "name" in keys:
        options["name"] = keys.pop("name")
    if keys:
        raise ConfigError(f"unknown config keys: {sorted(keys)}")

    axes = []
    for block in raw["axes"]:
        missing = {"param", "start", "stop", "count"} - block.keys()
        if missing:
            raise ConfigError(f"axis block missing keys {sorted(missing)}")
        try:
            count = int(block["count"])
        except ValueError:
            raise ConfigError(f"axis count must be an integer, got {block['count']!r}") from None
        axes.append(
            Axis(
                block["param"],
                _parse_float("start", block["start"]),
                _parse_float("stop", block["stop"]),
                count,
                block.get("scale", "linear"),
            )
        )
    derived = tuple(DerivedRule.parse(d) for d in raw["derive"])
    try:
        base = SystemParams(**params)
    except BlockadeError as exc:
        raise ConfigError(f"invalid base parameters: {exc}") from exc
    return SweepConfig(base=base, axes=tuple(axes), derived=derived, **options)


def parse_config(text: str, overrides: Optional[Dict[str, str]] = None) -> SweepConfig:
    raw = apply_overrides(parse_config_text(text), overrides or {})
    return config_from_raw(raw)


def load_config(path, overrides: Optional[Dict[str, str]] = None) -> SweepConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    cfg = parse_config(text, overrides)
    if cfg.name == "sweep":
        cfg = replace(cfg, name=os.path.splitext(os.path.basename(str(path)))[0])
    return cfg


# -- execution -------------------------------------------------------------------


@dataclass(frozen=True)
class PointResult:
    coords: Tuple[float, ...]
    params: Dict[str, float]
    g2_zero: Optional[float] = None
    mean_n: Optional[float] = None
    p_n: Optional[Tuple[float, ...]] = None
    poisson_deviation: Optional[Tuple[Optional[float], ...]] = None
    residual: Optional[float] = None
    n_max: Optional[int] = None
    error: str = ""


def evaluate_point(
    params: SystemParams,
    n_max: Union[int, str] = "auto",
    tol: float = 1e-10,
    auto_tol: float = 1e-8,
    check_condition: bool = True,
):
    """Solve one parameter set; returns ``(result, stats, n_max)``."""
    n = auto_truncate(params, tol=auto_tol, solver_tol=tol) if n_max == "auto" else int(n_max)
    res = solve(params, n, tol=tol, check_condition=check_condition)
    stats = photon_statistics(res.rho, HilbertSpace(n))
    return res, stats, n


def _evaluate(task) -> PointResult:
    config, coords = task
    values = config.resolve(coords)
    out = {"coords": tuple(float(c) for c in coords), "params": values}
    n = None
    try:
        params = replace(config.base, **values)
        res, stats, n = evaluate_point(params, config.n_max, config.tol, config.auto_tol, config.check_condition)
    except BlockadeError as exc:
        return PointResult(**out, n_max=n, error=exc.tag)
    out.update(mean_n=stats.mean_n, residual=res.residual, n_max=n)
    if "p_n" in config.observables:
        out["p_n"] = tuple(float(x) for x in stats.p_n)
    if "poisson_deviation" in config.observables:
        out["poisson_deviation"] = tuple(stats.deviation(k) for k in range(len(stats.p_n)))
    if stats.g2_zero is None and "g2_zero" in config.observables:
        return PointResult(**out, error="undefined-correlation")
    return PointResult(**out, g2_zero=stats.g2_zero)


@dataclass(frozen=True, eq=False)
class SweepResult:
    config: SweepConfig
    points: Tuple[PointResult, ...]

    @property
    def axis_names(self) -> List[str]:
        return [a.param for a in self.config.axes]

    @property
    def derived_names(self) -> List[str]:
        return [r.target for r in self.config.ordered_rules()]

    @property
    def failures(self) -> int:
        return sum(1 for p in self.points if p.error)

    def _width(self, attr: str) -> int:
        lengths = [len(getattr(p, attr)) for p in self.points if getattr(p, attr) is not None]
        return max(lengths, default=0)

    def columns(self) -> List[str]:
        cols = self.axis_names + self.derived_names
        cols += [o for o in ("g2_zero", "mean_n") if o in self.config.observables]
        if "p_n" in self.config.observables:
            cols += [f"p_{k}" for k in range(self._width("p_n"))]
        if "poisson_deviation" in self.config.observables:
            cols += [f"dev_{k}" for k in range(self._width("poisson_deviation"))]
        return cols + ["residual", "n_max", "error"]

    def rows(self) -> List[list]:
        obs = self.config.observables
        wp, wd = self._width("p_n"), self._width("poisson_deviation")
        rows = []
        for p in self.points:
            row = list(p.coords) + [p.params[t] for t in self.derived_names]
            row += [getattr(p, o) for o in ("g2_zero", "mean_n") if o in obs]
            if "p_n" in obs:
                vals = list(p.p_n or ())
                row += vals + [None] * (wp - len(vals))
            if "poisson_deviation" in obs:
                vals = list(p.poisson_deviation or ())
                row += vals + [None] * (wd - len(vals))
            row += [p.residual, p.n_max, p.error]
            rows.append(row)
        return rows

    def column(self, name: str) -> np.ndarray:
        idx = self.columns().index(name)
        return np.array([np.nan if r[idx] is None or r[idx] == "" else r[idx] for r in self.rows()], dtype=float)

    def grid(self, name: str) -> np.ndarray:
        """Column reshaped to the axis shape (first axis along rows)."""
        return self.column(name).reshape(self.config.shape)


def run_sweep(config: SweepConfig, workers: Optional[int] = None) -> SweepResult:
    workers = config.workers if workers is None else workers
    tasks = [(config, coords) for coords in config.points()]
    if workers <= 1 or len(tasks) <= 1:
        points = [_evaluate(t) for t in tasks]
    else:
        chunk = max(1, len(tasks) // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(_evaluate, tasks, chunksize=chunk))
    return SweepResult(config, tuple(points))


# -- output ----------------------------------------------------------------------


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return format(float(value), ".17g")


def to_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(result.columns())
    for row in result.rows():
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def to_json(result: SweepResult, timestamp: Optional[str] = None) -> str:
    def clean(v):
        if isinstance(v, (np.floating, float)):
            return float(v)
        if isinstance(v, np.integer):
            return int(v)
        return v

    doc = {
        "metadata": {
            "config": result.config.echo(),
            "version": _version(),
            "timestamp": timestamp or datetime.now(timezone.utc).isoformat(),
        },
        "columns": result.columns(),
        "rows": [[clean(v) for v in row] for row in result.rows()],
    }
    return json.dumps(doc, indent=1)


def emit(result: SweepResult, fmt: str = "csv", path=None) -> str:
    """Serialise ``result``; writes to ``path`` when given and returns the text."""
    if fmt == "csv":
        text = to_csv(result)
    elif fmt == "json":
        text = to_json(result)
    else:
        raise ConfigError(f"unknown output format {fmt!r}")
    if path is not None:
        try:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise ConfigError(f"cannot write {path}: {exc}") from exc
    return text
