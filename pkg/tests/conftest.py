"""Shared factories for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from chemoduo.config import DuoConfig, MonodParams, VesselParams
from chemoduo.core import break_even


def make_config(a_u, b_u, a_v, b_v, delta, r0, s=0.5, lam=1.0) -> DuoConfig:
    """Build a DuoConfig from per-vessel parameter pairs."""
    r0_pair = r0 if isinstance(r0, tuple) else (r0, r0)
    vessels = [
        VesselParams(
            delta=delta[j],
            r0=r0_pair[j],
            monod_u=MonodParams(a_u[j], b_u[j]),
            monod_v=MonodParams(a_v[j], b_v[j]),
        )
        for j in (0, 1)
    ]
    return DuoConfig(vessel1=vessels[0], vessel2=vessels[1], s=s, lam=lam)


def random_config(rng: np.random.Generator, equal_r0: bool = False) -> DuoConfig:
    """Random config; growth can exceed dilution but viability is not forced."""
    r0a = rng.uniform(2.0, 20.0)
    r0b = r0a if equal_r0 else rng.uniform(2.0, 20.0)
    vessels = []
    for r0 in (r0a, r0b):
        delta = rng.uniform(0.5, 2.0)
        vessels.append(
            VesselParams(
                delta=delta,
                r0=r0,
                monod_u=MonodParams(delta + rng.uniform(0.2, 3.0), rng.uniform(0.1, 5.0)),
                monod_v=MonodParams(delta + rng.uniform(0.2, 3.0), rng.uniform(0.1, 5.0)),
            )
        )
    return DuoConfig(
        vessel1=vessels[0],
        vessel2=vessels[1],
        s=float(rng.uniform(0.05, 0.95)),
        lam=float(10.0 ** rng.uniform(-2.0, 3.0)),
    )


def random_viable_config(rng: np.random.Generator) -> DuoConfig:
    """Equal inputs, both species strictly viable in both vessels."""
    while True:
        c = random_config(rng, equal_r0=True)
        ok = all(
            break_even(c.vessel(j).monod(w), c.vessel(j).delta).as_float() < 0.8 * c.vessel(j).r0
            for j in (1, 2)
            for w in ("u", "v")
        )
        if ok:
            return c


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)
