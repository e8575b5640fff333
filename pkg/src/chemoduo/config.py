"""Parameterization of the two-vessel competition models.

A single vessel is a chemostat with dilution rate ``delta``, resource input
``r0`` and one Monod consumption law per species.  A :class:`DuoConfig`
couples two vessels through the pair ``(s, lam)``: in the switched model
``lam1 = s*lam`` and ``lam2 = (1-s)*lam`` are the regime jump rates, in the
gradostat they are the per-vessel exchange rates.

Configs can be read from / written to a flat key-value text format with
dotted keys (``vessel1.delta = 1.0``), which is what the CLI consumes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

SPECIES = ("u", "v")


class ConfigError(ValueError):
    """Invalid or missing configuration data; message names the field."""


@dataclass(frozen=True)
class MonodParams:
    """Monod consumption law f(r) = a*r / (b + r)."""

    a: float  # maximum growth rate, 1/time
    b: float  # half-saturation concentration, mass/volume

    def __post_init__(self):
        if not self.a > 0:
            raise ConfigError(f"monod a must be > 0, got {self.a}")
        if not self.b > 0:
            raise ConfigError(f"monod b must be > 0, got {self.b}")

    def __call__(self, r: float) -> float:
        if r < 0:
            raise ValueError(f"resource concentration must be >= 0, got {r}")
        return self.a * r / (self.b + r)


@dataclass(frozen=True)
class BreakEven:
    """Minimal resource level at which a species' growth balances dilution.

    ``value`` is None when the species cannot reach the dilution rate at any
    resource level (a <= delta); use :meth:`as_float` for comparisons.
    """

    value: float | None

    @property
    def finite(self) -> bool:
        return self.value is not None

    def as_float(self) -> float:
        return self.value if self.value is not None else math.inf


@dataclass(frozen=True)
class VesselParams:
    delta: float  # dilution rate, 1/time
    r0: float  # resource input concentration, mass/volume
    monod_u: MonodParams
    monod_v: MonodParams

    def __post_init__(self):
        if not self.delta > 0:
            raise ConfigError(f"vessel delta must be > 0, got {self.delta}")
        if not self.r0 > 0:
            raise ConfigError(f"vessel r0 must be > 0, got {self.r0}")

    def monod(self, w: str) -> MonodParams:
        if w == "u":
            return self.monod_u
        if w == "v":
            return self.monod_v
        raise ValueError(f"unknown species {w!r}")

    def growth(self, w: str, r: float) -> float:
        """Per-capita growth rate f_w(r) - delta."""
        return self.monod(w)(r) - self.delta


@dataclass(frozen=True)
class DuoConfig:
    vessel1: VesselParams
    vessel2: VesselParams
    s: float  # dimensionless fraction in (0, 1)
    lam: float  # global switch / exchange intensity, >= 0

    def __post_init__(self):
        if not 0 < self.s < 1:
            raise ConfigError(f"s must be in (0,1), got {self.s}")
        if not self.lam >= 0:
            raise ConfigError(f"lambda must be >= 0, got {self.lam}")

    @property
    def lam1(self) -> float:
        return self.s * self.lam

    @property
    def lam2(self) -> float:
        return (1.0 - self.s) * self.lam

    def vessel(self, j: int) -> VesselParams:
        if j == 1:
            return self.vessel1
        if j == 2:
            return self.vessel2
        raise ValueError(f"vessel index must be 1 or 2, got {j}")

    @property
    def equal_inputs(self) -> bool:
        return self.vessel1.r0 == self.vessel2.r0

    def with_coupling(self, s: float | None = None, lam: float | None = None) -> "DuoConfig":
        return DuoConfig(
            vessel1=self.vessel1,
            vessel2=self.vessel2,
            s=self.s if s is None else s,
            lam=self.lam if lam is None else lam,
        )

    def swapped(self) -> "DuoConfig":
        """Relabel the vessels 1 <-> 2 (requires s -> 1-s to keep jump rates)."""
        return DuoConfig(
            vessel1=self.vessel2, vessel2=self.vessel1, s=1.0 - self.s, lam=self.lam
        )


def other(w: str) -> str:
    """The competitor of species ``w``."""
    if w == "u":
        return "v"
    if w == "v":
        return "u"
    raise ValueError(f"unknown species {w!r}")


# --- flat config file format -------------------------------------------------

_FIELDS = [
    ("vessel{j}.delta", "dilution rate [1/time]"),
    ("vessel{j}.r0", "resource input concentration [mass/volume]"),
    ("vessel{j}.a_u", "species u max growth rate [1/time]"),
    ("vessel{j}.b_u", "species u half-saturation [mass/volume]"),
    ("vessel{j}.a_v", "species v max growth rate [1/time]"),
    ("vessel{j}.b_v", "species v half-saturation [mass/volume]"),
]


def parse_config_text(text: str) -> DuoConfig:
    """Parse the dotted-key config grammar into a :class:`DuoConfig`.

    Lines are ``key = value``; ``#`` starts a comment; blank lines ignored.
    """
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        try:
            values[key] = float(val.strip())
        except ValueError:
            raise ConfigError(f"line {lineno}: bad numeric value for {key}: {val.strip()!r}")

    def take(key: str) -> float:
        if key not in values:
            raise ConfigError(f"missing required field: {key}")
        return values.pop(key)

    vessels = []
    for j in (1, 2):
        vessels.append(
            VesselParams(
                delta=take(f"vessel{j}.delta"),
                r0=take(f"vessel{j}.r0"),
                monod_u=MonodParams(take(f"vessel{j}.a_u"), take(f"vessel{j}.b_u")),
                monod_v=MonodParams(take(f"vessel{j}.a_v"), take(f"vessel{j}.b_v")),
            )
        )
    cfg = DuoConfig(vessel1=vessels[0], vessel2=vessels[1], s=take("s"), lam=take("lambda"))
    if values:
        raise ConfigError(f"unknown field: {sorted(values)[0]}")
    return cfg


def load_config(path: str | Path) -> DuoConfig:
    return parse_config_text(Path(path).read_text())


def format_config(c: DuoConfig) -> str:
    """Serialize with 17 significant digits so doubles round-trip exactly."""
    lines = []
    for j in (1, 2):
        v = c.vessel(j)
        vals = [v.delta, v.r0, v.monod_u.a, v.monod_u.b, v.monod_v.a, v.monod_v.b]
        for (tmpl, comment), val in zip(_FIELDS, vals):
            lines.append(f"{tmpl.format(j=j)} = {val:.17g}  # {comment}")
    lines.append(f"s = {c.s:.17g}  # fraction in (0,1)")
    lines.append(f"lambda = {c.lam:.17g}  # coupling / switch intensity [1/time]")
    return "\n".join(lines) + "\n"


def save_config(c: DuoConfig, path: str | Path) -> None:
    Path(path).write_text(format_config(c))
