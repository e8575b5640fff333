"""Parameter-plane sweeps: (s, lam) sign maps of the invasion rates for both
models, zero-level contours, and the hard-coded figure parameter sets.

A sweep evaluates every grid cell independently (row-major in (s, lam)),
records per-cell failures without aborting, and serializes to CSV with
17-significant-digit floats so identical inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import gradostat, invasion
from .config import DuoConfig, MonodParams, VesselParams

ZERO_BAND_DEFAULT = invasion.ZERO_BAND_DEFAULT

SIGNMAP_COLUMNS = [
    "s", "lambda",
    "rate_u", "rate_v", "grate_u", "grate_v",
    "sign_u", "sign_v", "gsign_u", "gsign_v",
    "verdict_prob", "verdict_det",
]


@dataclass(frozen=True)
class SweepGrid:
    """Log-spaced lam axis times a uniform s axis."""

    lam_count: int = 64
    lam_min: float = 1e-2
    lam_max: float = 1e3
    s_count: int = 63
    s_min: float = 0.015
    s_max: float = 0.985
    label: str = "custom"

    def __post_init__(self):
        if self.lam_count < 2 or self.s_count < 2:
            raise ValueError("grid counts must be >= 2")
        if not 0 < self.lam_min < self.lam_max:
            raise ValueError("need 0 < lam_min < lam_max")
        if not 0 < self.s_min < self.s_max < 1:
            raise ValueError("need 0 < s_min < s_max < 1")

    @property
    def lam_values(self) -> np.ndarray:
        return np.geomspace(self.lam_min, self.lam_max, self.lam_count)

    @property
    def s_values(self) -> np.ndarray:
        return np.linspace(self.s_min, self.s_max, self.s_count)


@dataclass(frozen=True)
class SignMapCell:
    s: float
    lam: float
    rate_u: float  # switched-model invasion rate of u (nan on failure)
    rate_v: float
    grate_u: float  # gradostat invasion rate of u
    grate_v: float
    sign_u: int  # -1 / 0 / +1 with the zero band collapsed to 0
    sign_v: int
    gsign_u: int
    gsign_v: int
    verdict_prob: str
    verdict_det: str


def _sign(x: float, zero_band: float) -> int:
    if not math.isfinite(x) or abs(x) <= zero_band:
        return 0
    return 1 if x > 0 else -1


def _sign_word(x: float, zero_band: float) -> str:
    return {1: "positive", 0: "zero", -1: "negative"}[_sign(x, zero_band)]


def _one_species_cell(c: DuoConfig, zero_band: float) -> SignMapCell:
    try:
        lam_u = invasion.lambda0(c, "u")
        lam_v = invasion.lambda0(c, "v")
        verdict_prob = _sign_word(lam_u, zero_band)
    except Exception as exc:  # recorded, never propagated
        lam_u = lam_v = math.nan
        verdict_prob = f"error:{type(exc).__name__}"
    try:
        g_u = gradostat.gamma0(c, "u")
        g_v = gradostat.gamma0(c, "v")
        verdict_det = _sign_word(g_u, zero_band)
    except Exception as exc:
        g_u = g_v = math.nan
        verdict_det = f"error:{type(exc).__name__}"
    return SignMapCell(
        s=c.s, lam=c.lam,
        rate_u=lam_u, rate_v=lam_v, grate_u=g_u, grate_v=g_v,
        sign_u=_sign(lam_u, zero_band), sign_v=_sign(lam_v, zero_band),
        gsign_u=_sign(g_u, zero_band), gsign_v=_sign(g_v, zero_band),
        verdict_prob=verdict_prob, verdict_det=verdict_det,
    )


def _two_species_cell(c: DuoConfig, zero_band: float) -> SignMapCell:
    try:
        sv = invasion.classify_switching(c, zero_band=zero_band)
        lam_u, lam_v, verdict_prob = sv.lambda_u, sv.lambda_v, sv.tag
    except Exception as exc:
        lam_u = lam_v = math.nan
        verdict_prob = f"error:{type(exc).__name__}"
    try:
        gv = gradostat.classify_gradostat(c, zero_band=zero_band)
        g_u = gv.gamma_u if gv.gamma_u is not None else gv.gamma0_u
        g_v = gv.gamma_v if gv.gamma_v is not None else gv.gamma0_v
        verdict_det = gv.tag
    except Exception as exc:
        g_u = g_v = math.nan
        verdict_det = f"error:{type(exc).__name__}"
    return SignMapCell(
        s=c.s, lam=c.lam,
        rate_u=lam_u, rate_v=lam_v, grate_u=g_u, grate_v=g_v,
        sign_u=_sign(lam_u, zero_band), sign_v=_sign(lam_v, zero_band),
        gsign_u=_sign(g_u, zero_band), gsign_v=_sign(g_v, zero_band),
        verdict_prob=verdict_prob, verdict_det=verdict_det,
    )


def _eval_cell(args) -> SignMapCell:
    template, s, lam, mode, zero_band = args
    c = template.with_coupling(s=s, lam=lam)
    if mode == "one-species":
        return _one_species_cell(c, zero_band)
    return _two_species_cell(c, zero_band)


def sign_map(
    template: DuoConfig,
    grid: SweepGrid,
    mode: str = "two-species",
    zero_band: float = ZERO_BAND_DEFAULT,
    jobs: int = 1,
) -> list[SignMapCell]:
    """Evaluate every grid cell; row-major in (s, lam), s outermost.

    Cells are independent; with jobs > 1 they are evaluated in a process
    pool, and the output order is identical either way.
    """
    if mode not in ("one-species", "two-species"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "two-species" and not template.equal_inputs:
        raise ValueError("two-species sweeps require equal resource inputs")
    work = [
        (template, float(s), float(lam), mode, zero_band)
        for s in grid.s_values
        for lam in grid.lam_values
    ]
    if jobs <= 1:
        return [_eval_cell(w) for w in work]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_eval_cell, work, chunksize=8))


# --- contours ----------------------------------------------------------------

RATE_SELECTORS = ("rate_u", "rate_v", "grate_u", "grate_v")


def _cell_grid(table: list[SignMapCell]) -> tuple[np.ndarray, np.ndarray]:
    ss = sorted({c.s for c in table})
    ls = sorted({c.lam for c in table})
    return np.array(ss), np.array(ls)


def zero_contours(table: list[SignMapCell], rate: str) -> list[np.ndarray]:
    """Marching-squares zero contours of one rate column.

    Returns polylines as (n, 2) arrays of (s, lam) points; lam is
    interpolated on its log axis.  Empty when the rate never changes sign.
    """
    if rate not in RATE_SELECTORS:
        raise ValueError(f"rate must be one of {RATE_SELECTORS}")
    ss, ls = _cell_grid(table)
    ns, nl = ss.size, ls.size
    vals = np.full((ns, nl), np.nan)
    for c in table:
        i = int(np.searchsorted(ss, c.s))
        j = int(np.searchsorted(ls, c.lam))
        vals[i, j] = getattr(c, rate)
    logl = np.log(ls)

    def interp(p0, p1, v0, v1):
        t = v0 / (v0 - v1)
        return (p0[0] + t * (p1[0] - p0[0]), p0[1] + t * (p1[1] - p0[1]))

    segments = []
    for i in range(ns - 1):
        for j in range(nl - 1):
            corners = [
                ((ss[i], logl[j]), vals[i, j]),
                ((ss[i + 1], logl[j]), vals[i + 1, j]),
                ((ss[i + 1], logl[j + 1]), vals[i + 1, j + 1]),
                ((ss[i], logl[j + 1]), vals[i, j + 1]),
            ]
            if any(not math.isfinite(v) for _, v in corners):
                continue
            pts = []
            for k in range(4):
                (p0, v0), (p1, v1) = corners[k], corners[(k + 1) % 4]
                if (v0 > 0) != (v1 > 0):
                    pts.append(interp(p0, p1, v0, v1))
            if len(pts) == 2:
                segments.append((pts[0], pts[1]))
            elif len(pts) == 4:
                # saddle: orient by the midpoint value
                mid = sum(v for _, v in corners) / 4.0
                first_pos = corners[0][1] > 0
                if (mid > 0) == first_pos:
                    segments.append((pts[0], pts[3]))
                    segments.append((pts[1], pts[2]))
                else:
                    segments.append((pts[0], pts[1]))
                    segments.append((pts[2], pts[3]))

    polylines = _chain_segments(segments)
    return [
        np.column_stack([np.array([p[0] for p in line]),
                         np.exp([p[1] for p in line])])
        for line in polylines
    ]


def _chain_segments(segments):
    """Greedy chaining of segments into polylines by endpoint matching."""
    def key(p):
        return (round(p[0], 12), round(p[1], 12))

    remaining = list(segments)
    lines = []
    while remaining:
        a, b = remaining.pop(0)
        line = [a, b]
        grew = True
        while grew:
            grew = False
            for k, (p, q) in enumerate(remaining):
                if key(p) == key(line[-1]):
                    line.append(q)
                elif key(q) == key(line[-1]):
                    line.append(p)
                elif key(p) == key(line[0]):
                    line.insert(0, q)
                elif key(q) == key(line[0]):
                    line.insert(0, p)
                else:
                    continue
                remaining.pop(k)
                grew = True
                break
        lines.append(line)
    return lines


# --- figure parameter sets ---------------------------------------------------


def _duo(a_u, b_u, a_v, b_v, delta, r0) -> DuoConfig:
    vessels = []
    r0_pair = r0 if isinstance(r0, tuple) else (r0, r0)
    for j in (0, 1):
        vessels.append(
            VesselParams(
                delta=delta[j],
                r0=r0_pair[j],
                monod_u=MonodParams(a_u[j], b_u[j]),
                monod_v=MonodParams(a_v[j], b_v[j]),
            )
        )
    return DuoConfig(vessel1=vessels[0], vessel2=vessels[1], s=0.5, lam=1.0)


def figure_config(name: str) -> tuple[DuoConfig, str]:
    """Hard-coded parameter set and sweep mode for each reference figure.

    fig2-a / fig2-b are single-species vessel pairs (the second species is a
    copy of the first, so both rate columns coincide); the rest are genuine
    two-species competitions with equal resource inputs.
    """
    if name == "fig2-a":
        return _duo((1.1, 2), (0.4, 4), (1.1, 2), (0.4, 4), (1, 1), (10, 1)), "one-species"
    if name == "fig2-b":
        return _duo((1.1, 2), (0.05, 2), (1.1, 2), (0.05, 2), (1, 1), (0.55, 2.1)), "one-species"
    if name == "fig3-a":
        return _duo((4.2, 4), (5, 5), (2.1, 2), (0.5, 0.5), (1.9, 1.5), 8), "two-species"
    if name == "fig3-b":
        return _duo((4.2, 2), (5, 0.5), (2.1, 4), (0.5, 5), (1.7, 1.5), 8), "two-species"
    if name == "fig4-a":
        return _duo((3.5, 2.5), (8.75, 0.125), (1.25, 7), (1.125, 3.75), (1, 2), 7), "two-species"
    if name == "fig4-b":
        return _duo((3.7, 3.6), (1.55, 3.55), (4.4, 2.5), (3.6, 0.4), (2.5, 1.1), 20), "two-species"
    raise KeyError(f"unknown figure name {name!r}")

FIGURE_NAMES = ("fig2-a", "fig2-b", "fig3-a", "fig3-b", "fig4-a", "fig4-b")


# --- serialization -----------------------------------------------------------


def _fmt(x: float) -> str:
    return "%.17g" % x


def write_signmap_csv(path, table: list[SignMapCell]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SIGNMAP_COLUMNS)
        for c in table:
            w.writerow(
                [
                    _fmt(c.s), _fmt(c.lam),
                    _fmt(c.rate_u), _fmt(c.rate_v), _fmt(c.grate_u), _fmt(c.grate_v),
                    c.sign_u, c.sign_v, c.gsign_u, c.gsign_v,
                    c.verdict_prob, c.verdict_det,
                ]
            )


def write_contours_csv(path, table: list[SignMapCell]) -> None:
    """All four rates' zero contours; curve_id is '<rate>-<index>'."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["curve_id", "s", "lambda"])
        for rate in RATE_SELECTORS:
            for k, line in enumerate(zero_contours(table, rate)):
                for s, lam in line:
                    w.writerow([f"{rate}-{k}", _fmt(s), _fmt(lam)])


def reproduce_figure(
    name: str,
    out_dir,
    grid: SweepGrid | None = None,
    jobs: int = 1,
) -> dict[str, str]:
    """Run the sweep for a reference figure and write its CSV bundle.

    Returns {'signmap': path, 'contours': path}.
    """
    import os

    template, mode = figure_config(name)
    if grid is None:
        grid = SweepGrid(label=name)
    else:
        grid = replace(grid, label=name)
    table = sign_map(template, grid, mode=mode, jobs=jobs)
    os.makedirs(out_dir, exist_ok=True)
    signmap_path = os.path.join(out_dir, f"{name}-signmap.csv")
    contours_path = os.path.join(out_dir, f"{name}-contours.csv")
    write_signmap_csv(signmap_path, table)
    write_contours_csv(contours_path, table)
    return {"signmap": signmap_path, "contours": contours_path}
