"""Scenario files: flat ``key = value`` lines with dotted section names.

Example::

    model.alpha = 0.2
    model.beta = 0.2
    model.g = saturating(slope=0.6)
    model.h = saturating(slope=0.6)
    kernel.u = normal(mean=0, var=1)
    kernel.v = uniform(lower=-1, upper=1)
    time.horizon = 50

``#`` starts a comment. Every key except the model rates, the coupling
slopes and the two kernels has a default. Instead of ``model.g`` and
``model.h`` a scenario may give ``model.gh_product``, which is split as
``g'(0) = t*beta``, ``h'(0) = t*alpha``.
"""

from __future__ import annotations

import dataclasses
import hashlib
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import ConfigError, DomainError, HypothesisViolation, NLSpreadError
from .kernels import Dirac, Kernel, Normal, Uniform, load_table
from .model import ModelParams, Saturating

_CALL = re.compile(r"^\s*([a-z_]+)\s*(?:\((.*)\))?\s*$")


def _parse_call(text):
    m = _CALL.match(text)
    if not m:
        raise ValueError(f"cannot parse {text!r}")
    return m.group(1), m.group(2)


def _parse_kwargs(body, allowed):
    out = {}
    if body is None or not body.strip():
        return out
    for part in body.split(","):
        if "=" not in part:
            raise ValueError(f"expected name=value, got {part.strip()!r}")
        name, val = (s.strip() for s in part.split("=", 1))
        if name not in allowed:
            raise ValueError(f"unknown argument {name!r}; expected one of {sorted(allowed)}")
        if name in out:
            raise ValueError(f"argument {name!r} given twice")
        out[name] = float(val)
    return out


@dataclass(frozen=True)
class KernelSpec:
    """Textual kernel description, kept separate from the built kernel for round-tripping."""

    kind: str
    args: tuple = ()
    path: Optional[str] = None

    @classmethod
    def parse(cls, text: str) -> "KernelSpec":
        name, body = _parse_call(text)
        if name == "dirac":
            if body not in (None, ""):
                raise ValueError("dirac takes no arguments")
            return cls("dirac")
        if name == "table":
            if not body or not body.strip():
                raise ValueError("table(path) needs a path")
            return cls("table", path=body.strip().strip("'\""))
        if name == "normal":
            kw = _parse_kwargs(body, {"mean", "var"})
            if "var" not in kw:
                raise ValueError("normal kernel needs var=")
            kw.setdefault("mean", 0.0)
            return cls("normal", (("mean", kw["mean"]), ("var", kw["var"])))
        if name == "uniform":
            kw = _parse_kwargs(body, {"lower", "upper"})
            if set(kw) != {"lower", "upper"}:
                raise ValueError("uniform kernel needs lower= and upper=")
            return cls("uniform", (("lower", kw["lower"]), ("upper", kw["upper"])))
        raise ValueError(f"unknown kernel {name!r}; expected normal, uniform, dirac or table")

    def get(self, name):
        return dict(self.args)[name]

    def replace(self, name, value) -> "KernelSpec":
        if name == "sigma":
            if self.kind == "normal":
                return self.replace("var", value)
            if self.kind == "uniform":
                return KernelSpec("uniform", (("lower", -float(value)), ("upper", float(value))))
            raise DomainError(f"{self.kind} kernel has no mobility parameter")
        names = dict(self.args)
        if name not in names:
            raise DomainError(f"{self.kind} kernel has no parameter {name!r}")
        names[name] = float(value)
        return KernelSpec(self.kind, tuple((k, names[k]) for k, _ in self.args), self.path)

    @property
    def family(self) -> Optional[str]:
        """One-parameter symmetric family this spec belongs to, if any."""
        if self.kind == "normal" and self.get("mean") == 0.0:
            return "normal"
        if self.kind == "uniform" and self.get("lower") == -self.get("upper"):
            return "uniform"
        return None

    def build(self, base_dir: Path = Path(".")) -> Kernel:
        if self.kind == "dirac":
            return Dirac()
        if self.kind == "normal":
            return Normal(self.get("mean"), self.get("var"))
        if self.kind == "uniform":
            return Uniform(self.get("lower"), self.get("upper"))
        path = Path(self.path)
        return load_table(path if path.is_absolute() else base_dir / path)

    def __str__(self):
        if self.kind == "dirac":
            return "dirac"
        if self.kind == "table":
            return f"table({self.path})"
        return f"{self.kind}(" + ", ".join(f"{k}={_fmt(v)}" for k, v in self.args) + ")"


@dataclass(frozen=True)
class CouplingSpec:
    """``saturating(slope=s)`` or ``linear`` (slope equal to the cap)."""

    kind: str
    slope: Optional[float] = None

    @classmethod
    def parse(cls, text):
        name, body = _parse_call(text)
        if name == "linear":
            if body not in (None, ""):
                raise ValueError("linear takes no arguments")
            return cls("linear")
        if name == "saturating":
            kw = _parse_kwargs(body, {"slope"})
            if "slope" not in kw:
                raise ValueError("saturating needs slope=")
            return cls("saturating", kw["slope"])
        raise ValueError(f"unknown coupling {name!r}; expected saturating or linear")

    def build(self, cap: float) -> Saturating:
        return Saturating(cap if self.kind == "linear" else self.slope, cap)

    def __str__(self):
        return "linear" if self.kind == "linear" else f"saturating(slope={_fmt(self.slope)})"


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _positive(text):
    v = float(text)
    if not (v > 0 and math.isfinite(v)):
        raise ValueError("must be a positive number")
    return v


def _finite(text):
    v = float(text)
    if not math.isfinite(v):
        raise ValueError("must be finite")
    return v


def _fraction(text):
    v = float(text)
    if not 0 < v < 1:
        raise ValueError("must lie in (0, 1)")
    return v


def _window(text):
    v = float(text)
    if not 0 < v <= 1:
        raise ValueError("must lie in (0, 1]")
    return v


def _choice(*options):
    def parse(text):
        t = text.strip()
        if t not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return t

    return parse


def _optional(parse):
    def wrapped(text):
        return None if text.strip() in ("auto", "none") else parse(text)

    return wrapped


def _integer(text):
    return int(text)


# key -> (field name, parser, required)
SCHEMA = {
    "model.alpha": ("alpha", _positive, True),
    "model.beta": ("beta", _positive, True),
    "model.g": ("g", CouplingSpec.parse, False),
    "model.h": ("h", CouplingSpec.parse, False),
    "model.gh_product": ("gh_product", _positive, False),
    "kernel.u": ("kernel_u", KernelSpec.parse, True),
    "kernel.v": ("kernel_v", KernelSpec.parse, True),
    "grid.dx": ("dx", _positive, False),
    "grid.halfwidth": ("halfwidth", _optional(_positive), False),
    "time.dt": ("dt", _positive, False),
    "time.horizon": ("horizon", _positive, False),
    "time.snapshot_stride": ("snapshot_stride", _positive, False),
    "time.trace_stride": ("trace_stride", _positive, False),
    "time.method": ("method", _choice("direct", "spectral"), False),
    "initial.kind": ("initial_kind", _choice("bump", "exponential"), False),
    "initial.center": ("center", _finite, False),
    "initial.halfwidth": ("bump_halfwidth", _positive, False),
    "initial.height": ("height", _positive, False),
    "initial.rate": ("rate", _optional(_positive), False),
    "initial.rate_fraction": ("rate_fraction", _optional(_fraction), False),
    "initial.amplitude": ("amplitude", _positive, False),
    "initial.plateau": ("plateau", _finite, False),
    "front.nu": ("nu", _fraction, False),
    "front.fit_window": ("fit_window", _window, False),
    "seed": ("seed", _integer, False),
}
FIELD_TO_KEY = {v[0]: k for k, v in SCHEMA.items()}


@dataclass(frozen=True)
class ScenarioConfig:
    alpha: float
    beta: float
    kernel_u: KernelSpec
    kernel_v: KernelSpec
    g: Optional[CouplingSpec] = None
    h: Optional[CouplingSpec] = None
    gh_product: Optional[float] = None
    dx: float = 0.1
    halfwidth: Optional[float] = None
    dt: float = 0.05
    horizon: float = 200.0
    snapshot_stride: float = 10.0
    trace_stride: float = 0.5
    method: str = "direct"
    initial_kind: str = "bump"
    center: float = 0.0
    bump_halfwidth: float = 5.0
    height: float = 1.0
    rate: Optional[float] = None
    rate_fraction: Optional[float] = None
    amplitude: float = 1.0
    plateau: float = 0.0
    nu: float = 0.1
    fit_window: float = 0.5
    seed: int = 0
    base_dir: str = field(default=".", compare=False)

    # -- construction --------------------------------------------------

    def params(self) -> ModelParams:
        if self.gh_product is not None:
            if self.g is not None or self.h is not None:
                raise HypothesisViolation("give either model.gh_product or model.g/model.h, not both")
            return ModelParams.from_product(self.alpha, self.beta, self.gh_product)
        if self.g is None or self.h is None:
            raise HypothesisViolation("model.g and model.h (or model.gh_product) are required")
        p = ModelParams(self.alpha, self.beta, self.g.build(self.beta), self.h.build(self.alpha))
        return p.check()

    def kernels(self):
        base = Path(self.base_dir)
        return self.kernel_u.build(base), self.kernel_v.build(base)

    def with_value(self, key: str, value) -> "ScenarioConfig":
        """Copy with one key replaced; ``kernel.u.<arg>`` / ``kernel.v.<arg>`` edit a kernel argument."""
        parts = key.split(".")
        if len(parts) == 3 and parts[0] == "kernel" and parts[1] in ("u", "v"):
            name = "kernel_" + parts[1]
            return dataclasses.replace(self, **{name: getattr(self, name).replace(parts[2], value)})
        if key not in SCHEMA:
            raise ConfigError(f"unknown key {key!r}")
        fname, parse, _ = SCHEMA[key]
        try:
            v = parse(value if isinstance(value, str) else repr(value))
        except ValueError as exc:
            raise ConfigError(f"{key}: {exc}") from None
        return dataclasses.replace(self, **{fname: v})

    # -- text form -----------------------------------------------------

    def dumps(self) -> str:
        lines = []
        for key, (fname, _, _) in SCHEMA.items():
            v = getattr(self, fname)
            if v is None:
                continue
            lines.append(f"{key} = {_fmt(v)}")
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        """Content hash of the canonical text form; names output directories."""
        return hashlib.sha256(self.dumps().encode()).hexdigest()[:16]


def _assign(values, lines, key, text, where):
    if key not in SCHEMA:
        raise ConfigError(f"unknown key {key!r}", where)
    fname, parse, _ = SCHEMA[key]
    try:
        values[fname] = parse(text)
    except (ValueError, NLSpreadError) as exc:
        raise ConfigError(f"{key}: {exc}", where) from None
    lines[fname] = where


def loads(text: str, overrides=(), base_dir=".") -> ScenarioConfig:
    """Parse scenario text; ``overrides`` are ``key=value`` strings applied last."""
    values, lines = {}, {}
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", no)
        key, val = (s.strip() for s in line.split("=", 1))
        if SCHEMA.get(key, ("",))[0] in values:
            raise ConfigError(f"duplicate key {key!r}", no)
        _assign(values, lines, key, val, no)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, val = (s.strip() for s in item.split("=", 1))
        _assign(values, lines, key, val, None)
    for key, (fname, _, required) in SCHEMA.items():
        if required and fname not in values:
            raise ConfigError(f"missing required key {key!r}")
    cfg = ScenarioConfig(base_dir=str(base_dir), **values)
    _validate(cfg, lines)
    return cfg


def _validate(cfg, lines):
    def first_line(*fields):
        found = [lines[f] for f in fields if lines.get(f) is not None]
        return min(found) if found else None

    try:
        cfg.params()
    except NLSpreadError as exc:
        raise ConfigError(str(exc), first_line("g", "h", "gh_product", "alpha", "beta")) from None
    for fname in ("kernel_u", "kernel_v"):
        try:
            getattr(cfg, fname).build(Path(cfg.base_dir))
        except (NLSpreadError, OSError, ValueError) as exc:
            raise ConfigError(f"{FIELD_TO_KEY[fname]}: {exc}", lines.get(fname)) from None
    if cfg.initial_kind == "exponential" and (cfg.rate is None) == (cfg.rate_fraction is None):
        raise ConfigError(
            "exponential initial data needs exactly one of initial.rate, initial.rate_fraction",
            first_line("initial_kind", "rate", "rate_fraction"),
        )


def load(path, overrides=()) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return loads(text, overrides, base_dir=path.parent)
