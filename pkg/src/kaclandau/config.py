"""INI run configuration: parsing, defaults, and full validation.

parse_config collects every violation (unknown keys, type mismatches,
constraint failures) with its section.key location instead of stopping
at the first, so a bad file is fixable in one pass. Every module
precondition that is expressible from the config alone is checked here
before any run starts; the only deferred check is the state-dependent
diffusion step-size guard.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field

from .core import InteractionConfig
from .diffusion import DiffusionConfig
from .initial import make_sampler
from .kernels import KernelConfig, RadialKernel

__all__ = ["ConfigError", "RunConfig", "parse_config", "load_config",
           "default_config_text"]

_FORMATS = ("snapshots", "csv", "jsonl")


class ConfigError(ValueError):
    """Carries the full list of violations; str() shows one per line."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid configuration:\n  "
                         + "\n  ".join(self.violations))


@dataclass(frozen=True)
class RunConfig:
    """Validated flat view of one run configuration."""

    n: int = 256
    alpha: float = 1.0
    mollifier_scale: float | None = None  # None = 1/n at runtime
    identity_weight: float | None = None  # None = 1/n at runtime
    profile: str = "gaussian"
    epsilon: float = 1.0
    quadrature_order: int = 32
    mode: str = "diffusion"
    dt: float = 1e-5
    horizon: float = 0.1
    snapshot_interval: float | None = None
    runs: int = 4
    master_seed: int = 12345
    distribution: str = "gaussian"
    initial_params: dict = field(default_factory=dict)
    directory: str = "out"
    formats: tuple = _FORMATS

    def interaction(self) -> InteractionConfig:
        return InteractionConfig(alpha=self.alpha,
                                 mollifier_scale=self.mollifier_scale,
                                 identity_weight=self.identity_weight)

    def kernel(self) -> KernelConfig:
        profile = (RadialKernel.gaussian() if self.profile == "gaussian"
                   else RadialKernel.uniform())
        return KernelConfig(profile=profile, epsilon=self.epsilon,
                            quadrature_order=self.quadrature_order)

    def diffusion(self) -> DiffusionConfig:
        return DiffusionConfig(dt=self.dt, interaction=self.interaction())


def _parse_int(raw: str):
    return int(raw.strip())

def _parse_float(raw: str):
    return float(raw.strip())

def _parse_optional_float(raw: str):
    raw = raw.strip().lower()
    if raw in ("none", "auto", ""):
        return None
    return float(raw)


# section -> key -> (parser, default is taken from RunConfig)
_SCHEMA = {
    "system": {"n": _parse_int, "alpha": _parse_float,
               "mollifier_scale": _parse_optional_float,
               "identity_weight": _parse_optional_float},
    "kernel": {"profile": str.strip, "epsilon": _parse_float,
               "quadrature_order": _parse_int},
    "dynamics": {"mode": str.strip, "dt": _parse_float,
                 "horizon": _parse_float,
                 "snapshot_interval": _parse_optional_float},
    "ensemble": {"runs": _parse_int, "master_seed": _parse_int},
    "initial": {"distribution": str.strip, "temperature": _parse_float,
                "t1": _parse_float, "t2": _parse_float, "t3": _parse_float,
                "shift": _parse_float},
    "output": {"directory": str.strip, "formats": str.strip},
}

_INITIAL_KEYS = {
    "gaussian": {"required": set(), "optional": {"temperature"}},
    "anisotropic_gaussian": {"required": {"t1", "t2", "t3"},
                             "optional": set()},
    "bimaxwellian": {"required": {"shift"}, "optional": {"temperature"}},
}


def parse_config(text: str) -> RunConfig:
    """Parse INI text into a RunConfig or raise ConfigError with every
    violation found."""
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError([str(exc)]) from None

    violations = []
    values = {}
    for section in cp.sections():
        if section not in _SCHEMA:
            violations.append(f"{section}: unknown section")
            continue
        for key, raw in cp.items(section):
            parser = _SCHEMA[section].get(key)
            if parser is None:
                violations.append(f"{section}.{key}: unknown key")
                continue
            try:
                values[(section, key)] = parser(raw)
            except ValueError:
                violations.append(f"{section}.{key}: cannot parse "
                                  f"{raw.strip()!r}")

    def got(section, key, default):
        return values.get((section, key), default)

    n = got("system", "n", 256)
    alpha = got("system", "alpha", 1.0)
    mollifier_scale = got("system", "mollifier_scale", None)
    identity_weight = got("system", "identity_weight", None)
    profile = got("kernel", "profile", "gaussian")
    epsilon = got("kernel", "epsilon", 1.0)
    quadrature_order = got("kernel", "quadrature_order", 32)
    mode = got("dynamics", "mode", "diffusion")
    dt = got("dynamics", "dt", 1e-5)
    horizon = got("dynamics", "horizon", 0.1)
    snapshot_interval = got("dynamics", "snapshot_interval", None)
    runs = got("ensemble", "runs", 4)
    master_seed = got("ensemble", "master_seed", 12345)
    distribution = got("initial", "distribution", "gaussian")
    directory = got("output", "directory", "out")
    formats_raw = got("output", "formats", ",".join(_FORMATS))

    if n < 1:
        violations.append("system.n: n must be at least 1")
    try:
        InteractionConfig(alpha=alpha, mollifier_scale=mollifier_scale,
                          identity_weight=identity_weight)
    except ValueError as exc:
        violations.append(f"system: {exc}")
    if profile not in ("gaussian", "uniform"):
        violations.append(f"kernel.profile: unknown profile {profile!r}")
    try:
        KernelConfig(epsilon=epsilon, quadrature_order=quadrature_order)
    except ValueError as exc:
        violations.append(f"kernel: {exc}")
    if mode not in ("jump", "diffusion"):
        violations.append("dynamics.mode: mode must be jump or diffusion")
    elif mode == "jump" and n < 2:
        violations.append("system.n: jump dynamics requires n >= 2")
    if dt <= 0:
        violations.append("dynamics.dt: dt must be positive")
    if horizon < 0:
        violations.append("dynamics.horizon: horizon must be nonnegative")
    if snapshot_interval is not None and snapshot_interval <= 0:
        violations.append("dynamics.snapshot_interval: must be positive")
    if runs < 1:
        violations.append("ensemble.runs: runs must be at least 1")
    if not 0 <= master_seed < 2 ** 64:
        violations.append("ensemble.master_seed: must fit in u64")

    initial_params = {}
    spec = _INITIAL_KEYS.get(distribution)
    if spec is None:
        violations.append(
            f"initial.distribution: unknown distribution {distribution!r}")
    else:
        allowed = spec["required"] | spec["optional"]
        for key in ("temperature", "t1", "t2", "t3", "shift"):
            if ("initial", key) in values:
                if key in allowed:
                    initial_params[key] = values[("initial", key)]
                else:
                    violations.append(f"initial.{key}: not a parameter of "
                                      f"{distribution}")
        missing = spec["required"] - set(initial_params)
        if missing:
            violations.append(f"initial: {distribution} needs "
                              + ", ".join(sorted(missing)))
        else:
            try:
                make_sampler(distribution, **initial_params)
            except ValueError as exc:
                violations.append(f"initial: {exc}")

    formats = tuple(f.strip() for f in formats_raw.split(",") if f.strip())
    for f in formats:
        if f not in _FORMATS:
            violations.append(f"output.formats: unknown format {f!r}")

    if violations:
        raise ConfigError(violations)
    return RunConfig(n=n, alpha=alpha, mollifier_scale=mollifier_scale,
                     identity_weight=identity_weight, profile=profile,
                     epsilon=epsilon, quadrature_order=quadrature_order,
                     mode=mode, dt=dt, horizon=horizon,
                     snapshot_interval=snapshot_interval, runs=runs,
                     master_seed=master_seed, distribution=distribution,
                     initial_params=initial_params, directory=directory,
                     formats=formats)


def load_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def default_config_text() -> str:
    """A commented sample covering every section and key."""
    return """\
[system]
n = 256
alpha = 1.0
; none means 1/n at runtime
mollifier_scale = none
identity_weight = none

[kernel]
profile = gaussian
epsilon = 1.0
quadrature_order = 32

[dynamics]
mode = diffusion
dt = 1e-5
horizon = 0.1
snapshot_interval = 0.02

[ensemble]
runs = 4
master_seed = 12345

[initial]
distribution = gaussian
temperature = 1.0

[output]
directory = out
formats = snapshots,csv,jsonl
"""
