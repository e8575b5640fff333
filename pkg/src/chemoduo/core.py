"""Single-chemostat baseline: Monod kinetics, break-even levels, competitive
exclusion, and the averaged vessel obtained as a convex mix of the two
environments."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .config import SPECIES, BreakEven, DuoConfig, MonodParams, VesselParams, other

DEFAULT_TOL = 1e-9


class IntegrationError(RuntimeError):
    """Integrator failed to converge; message carries the time stamp."""


@dataclass
class Trajectory:
    """Time-stamped state stream shared by all simulators.

    ``regime`` is None for single-vessel (non-switching) runs.
    """

    t: np.ndarray
    r: np.ndarray
    u: np.ndarray
    v: np.ndarray
    regime: np.ndarray | None = None

    def endpoint(self) -> tuple[float, float, float]:
        return float(self.r[-1]), float(self.u[-1]), float(self.v[-1])


def monod_eval(p: MonodParams, r: float) -> float:
    """Consumption rate a*r/(b+r); strictly increasing in r, bounded by a."""
    return p(r)


def break_even(p: MonodParams, delta: float) -> BreakEven:
    """Resource level where growth balances dilution: b*delta/(a-delta).

    Infinite (marker value None) when a <= delta: the species cannot grow at
    any resource level.
    """
    if not delta > 0:
        raise ValueError(f"delta must be > 0, got {delta}")
    if p.a > delta:
        return BreakEven(p.b * delta / (p.a - delta))
    return BreakEven(None)


def simulate_simple_chemostat(
    vessel: VesselParams,
    init: tuple[float, float, float],
    horizon: float,
    tol: float = DEFAULT_TOL,
    n_samples: int = 2000,
) -> Trajectory:
    """Integrate the single-chemostat dynamics from ``init = (R, U, V)``.

    The total concentration Sigma = R+U+V relaxes to r0 exponentially at
    rate delta, which the caller can use as an exactness check.
    """
    r0, u0, v0 = init
    if u0 < 0 or v0 < 0 or r0 < 0:
        raise ValueError("initial concentrations must be nonnegative")

    fu, fv, delta, rin = vessel.monod_u, vessel.monod_v, vessel.delta, vessel.r0

    def rhs(t, y):
        r, u, v = y
        r = max(r, 0.0)
        cu, cv = fu(r), fv(r)
        return (
            delta * (rin - r) - u * cu - v * cv,
            u * (cu - delta),
            v * (cv - delta),
        )

    sol = solve_ivp(
        rhs,
        (0.0, horizon),
        [r0, u0, v0],
        method="RK45",
        rtol=tol,
        atol=tol,
        dense_output=True,
    )
    if not sol.success:
        raise IntegrationError(f"simple chemostat integration failed at t={sol.t[-1]}: {sol.message}")
    t = np.linspace(0.0, horizon, n_samples)
    y = sol.sol(t)
    y = np.where(y > -tol, np.maximum(y, 0.0), y)
    return Trajectory(t=t, r=y[0], u=y[1], v=y[2])


@dataclass(frozen=True)
class AveragedVessel:
    """Convex combination (1-s)*vessel1 + s*vessel2 of the two environments.

    The mixed consumption laws are no longer Monod but stay increasing with
    value 0 at r=0, so the single-chemostat exclusion logic still applies.
    """

    delta: float
    r0: float
    s: float
    vessel1: VesselParams = field(repr=False)
    vessel2: VesselParams = field(repr=False)

    def consumption(self, w: str, r: float) -> float:
        return (1.0 - self.s) * self.vessel1.monod(w)(r) + self.s * self.vessel2.monod(w)(r)

    def growth(self, w: str, r: float) -> float:
        return self.consumption(w, r) - self.delta

    def break_even(self, w: str) -> BreakEven:
        """Root of the averaged consumption minus averaged dilution.

        The averaged law is monotone so bisection on [0, 10*r0] is safe; a
        missing sign change means the species never reaches the dilution rate
        in that span and is reported as infinite.
        """
        lo, hi = 0.0, 10.0 * self.r0
        if self.growth(w, hi) <= 0.0:
            return BreakEven(None)
        root = brentq(lambda r: self.growth(w, r), lo, hi, xtol=1e-12, rtol=8.9e-16)
        return BreakEven(float(root))


def averaged_chemostat(c: DuoConfig, s_override: float | None = None) -> AveragedVessel:
    """The averaged vessel governing both models' fast-switching limit."""
    s = c.s if s_override is None else s_override
    if not 0 < s < 1:
        raise ValueError(f"s must be in (0,1), got {s}")
    d1, d2 = c.vessel1.delta, c.vessel2.delta
    delta_bar = (1.0 - s) * d1 + s * d2
    r0_bar = ((1.0 - s) * d1 * c.vessel1.r0 + s * d2 * c.vessel2.r0) / delta_bar
    return AveragedVessel(delta=delta_bar, r0=r0_bar, s=s, vessel1=c.vessel1, vessel2=c.vessel2)


def best_competitor_averaged(c: DuoConfig, s: float) -> str | None:
    """Species with the strictly smaller averaged break-even below r0_bar.

    None when neither species survives or when the break-evens tie.
    """
    avg = averaged_chemostat(c, s_override=s)
    bu = avg.break_even("u").as_float()
    bv = avg.break_even("v").as_float()
    if bu == bv:
        return None
    best, level = ("u", bu) if bu < bv else ("v", bv)
    return best if level < avg.r0 else None


def vessel_unfavorable(vessel: VesselParams, w: str) -> bool:
    """True when ``w`` is not the strict best surviving competitor in ``vessel``."""
    bw = break_even(vessel.monod(w), vessel.delta).as_float()
    bo = break_even(vessel.monod(other(w)), vessel.delta).as_float()
    return not (bw < vessel.r0 and bw < bo)


@dataclass(frozen=True)
class HwWitness:
    holds: bool
    vessel: int | None = None  # clause (i) witness
    s_value: float | None = None  # clause (ii) witness


def hypothesis_Hw(c: DuoConfig, w: str, s_grid_size: int = 101) -> HwWitness:
    """Does some environment (a vessel or an averaged mix) disfavor species w?

    Clause (ii) is checked on a uniform grid over (0,1) with endpoints
    excluded, so a False answer is grid-relative.
    """
    if s_grid_size < 2:
        raise ValueError("s_grid_size must be >= 2")
    for j in (1, 2):
        if vessel_unfavorable(c.vessel(j), w):
            return HwWitness(True, vessel=j)
    for s in np.linspace(0.0, 1.0, s_grid_size + 2)[1:-1]:
        best = best_competitor_averaged(c, float(s))
        if best != w:
            return HwWitness(True, s_value=float(s))
    return HwWitness(False)
