"""Run configuration: plain-text key=value files plus flag overrides.

Example config::

    case = sod
    p = 3
    c = c_DG          # preset name or a raw value
    flux = CH_RA      # CH_RA | CH | IR | KG | CENTRAL
    dissipation = Roe # Roe | LLF | None
    flux_nodes = GLL  # GLL | GL
    scheme = nsfr     # nsfr | strong-dg
    limiter = on
    cfl = 0.5         # or: dt = 0.0005
    t_end = 0.2
    n = 512           # or: n = 300x150
    extract = y:0.4, x:1.05
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

from ..cases import REGISTRY


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    case: str
    p: int = 3
    c: object = "c_DG"
    flux: str = "CH_RA"
    dissipation: str = "Roe"
    flux_nodes: str = "GLL"
    scheme: str = "nsfr"
    limiter: bool = True
    eps: float = 1e-13
    wang_shu: bool = False          # drop solution-node sampling
    cfl: float | None = None
    dt: float | None = None
    t_end: float | None = None
    n: tuple | None = None
    monitor_every: int = 20
    max_steps: int = 50_000_000
    extract: tuple = ()             # ((axis, value), ...)
    out_dir: str | None = None
    seed: int = 0                   # reserved; the solver is deterministic

    def validated(self) -> "RunConfig":
        if self.case not in REGISTRY:
            raise ConfigError(f"unknown case {self.case!r}; "
                              f"known: {sorted(REGISTRY)}")
        if self.p < 1:
            raise ConfigError("p must be >= 1")
        if self.flux not in ("CH_RA", "CH", "IR", "KG", "CENTRAL"):
            raise ConfigError(f"unknown flux {self.flux!r}")
        if self.dissipation not in ("Roe", "LLF", "None"):
            raise ConfigError(f"unknown dissipation {self.dissipation!r}")
        if self.flux_nodes not in ("GLL", "GL"):
            raise ConfigError(f"flux_nodes must be GLL or GL")
        if self.scheme not in ("nsfr", "strong-dg"):
            raise ConfigError("scheme must be nsfr or strong-dg")
        if (self.cfl is None) == (self.dt is None):
            raise ConfigError("exactly one of cfl / dt must be set")
        if self.scheme == "strong-dg" and self.flux_nodes == "GL":
            raise ConfigError("the strong-DG baseline runs on GLL nodes")
        for v in (self.cfl, self.dt):
            if v is not None and v <= 0:
                raise ConfigError("cfl and dt must be positive")
        if self.t_end is not None and self.t_end < 0:
            raise ConfigError("t_end must be >= 0")
        return self

    def as_text(self) -> str:
        lines = [f"case = {self.case}", f"p = {self.p}", f"c = {self.c}",
                 f"flux = {self.flux}", f"dissipation = {self.dissipation}",
                 f"flux_nodes = {self.flux_nodes}", f"scheme = {self.scheme}",
                 f"limiter = {'on' if self.limiter else 'off'}",
                 f"eps = {self.eps!r}",
                 f"wang_shu = {'on' if self.wang_shu else 'off'}"]
        if self.cfl is not None:
            lines.append(f"cfl = {self.cfl!r}")
        if self.dt is not None:
            lines.append(f"dt = {self.dt!r}")
        if self.t_end is not None:
            lines.append(f"t_end = {self.t_end!r}")
        if self.n is not None:
            lines.append("n = " + "x".join(str(k) for k in self.n))
        if self.extract:
            lines.append("extract = " + ", ".join(
                f"{'xy'[a]}:{v!r}" for a, v in self.extract))
        lines.append(f"monitor_every = {self.monitor_every}")
        lines.append(f"max_steps = {self.max_steps}")
        lines.append(f"seed = {self.seed}")
        return "\n".join(lines) + "\n"


_BOOLS = {"on": True, "true": True, "1": True, "yes": True,
          "off": False, "false": False, "0": False, "no": False}


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    if key in ("p", "monitor_every", "max_steps", "seed"):
        return int(raw)
    if key in ("limiter", "wang_shu"):
        try:
            return _BOOLS[raw.lower()]
        except KeyError:
            raise ConfigError(f"bad boolean for {key}: {raw!r}")
    if key in ("cfl", "dt", "t_end", "eps"):
        return float(raw)
    if key == "c":
        try:
            return float(raw)
        except ValueError:
            return raw
    if key == "n":
        return tuple(int(s) for s in raw.lower().split("x"))
    if key == "extract":
        out = []
        for part in raw.split(","):
            axis_s, val = part.split(":")
            axis_s = axis_s.strip().lower()
            if axis_s not in ("x", "y"):
                raise ConfigError(f"extract axis must be x or y: {part!r}")
            out.append(("xy".index(axis_s), float(val)))
        return tuple(out)
    return raw


_KEY_ALIASES = {"flux": "flux", "volume_flux": "flux"}


def parse_overrides(pairs, base: RunConfig | None = None,
                    case_required=True) -> RunConfig:
    """Build a RunConfig from `key=value` strings, optionally over a base."""
    values = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"override {pair!r} is not key=value")
        key, raw = pair.split("=", 1)
        key = key.strip()
        key = _KEY_ALIASES.get(key, key)
        if key not in RunConfig.__dataclass_fields__:
            raise ConfigError(f"unknown config key {key!r}")
        values[key] = _parse_value(key, raw)
    if base is not None:
        return replace(base, **values).validated()
    if "case" not in values and case_required:
        raise ConfigError("config must name a case")
    return RunConfig(**values).validated()


def load_config(path, overrides=()) -> RunConfig:
    """Parse a key=value config file, then apply overrides."""
    pairs = []
    text = Path(path).read_text()
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        pairs.append(line)
    pairs.extend(overrides)
    return parse_overrides(pairs)
