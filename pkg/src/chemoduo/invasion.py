"""Closed-form invasion rates for the randomly-switched chemostat.

Two layers of exact results are implemented:

* the one-species rate ``lambda0`` — the growth rate of a species dropped
  into the species-free switched resource flow, expressed as a Beta-weighted
  average of the frozen-environment growth rates;
* the two-species rate ``lambda_two_species`` — the growth rate of a rare
  invader against the resident's switched attractor, expressed as a ratio of
  two weighted integrals over the interval between the resident's two
  single-vessel equilibria.

Both are evaluated with endpoint-singularity-aware quadrature: the power-law
behavior of the stationary density at the support endpoints is read off
analytically and absorbed into a Gauss-Jacobi weight, so the remaining
integrand is smooth.  For very large shape exponents (fast switching) the
density concentrates in the interior and a windowed Gauss-Legendre rule on
the log-density is used instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats
from scipy.optimize import brentq
from scipy.special import betaln, roots_jacobi, roots_legendre

from .config import BreakEven, DuoConfig, other
from .core import averaged_chemostat, break_even, hypothesis_Hw, HwWitness

DEFAULT_NODES = 256
ZERO_BAND_DEFAULT = 1e-4
# beyond this shape exponent Gauss-Jacobi node computation degrades; the
# density is then sharply peaked in the interior and windowed rules win
_GJ_MAX_EXPONENT = 120.0


class DegenerateDensityError(RuntimeError):
    """No absolutely continuous invariant density exists (lam == 0)."""


class ResidentNotViableError(RuntimeError):
    """The resident cannot persist alone in some vessel, so the two-species
    stationary-density formula does not apply; callers fall back to Monte
    Carlo."""

    def __init__(self, resident: str, vessel: int, message: str):
        super().__init__(message)
        self.resident = resident
        self.vessel = vessel


@dataclass(frozen=True)
class BetaSpec:
    """Shape parameters gamma_j = lam_j / delta_j of the face resource law."""

    gamma1: float
    gamma2: float

    def __post_init__(self):
        if not (self.gamma1 > 0 and self.gamma2 > 0):
            raise ValueError("beta shape parameters must be positive")


@dataclass(frozen=True)
class FaceDensity:
    """Invariant law of the species-free resource process on [r_lo, r_hi].

    Per-regime densities (r_lo = vessel-1 input, r_hi = vessel-2 input):

        rho1(R) = C (R - r_lo)^(gamma1-1) (r_hi - R)^gamma2
        rho2(R) = C (delta1/delta2) (R - r_lo)^gamma1 (r_hi - R)^(gamma2-1)

    Equivalently, in x = (R - r_lo)/(r_hi - r_lo), a mixture
    (1-s) Beta(gamma1, gamma2+1) + s Beta(gamma1+1, gamma2).  ``swapped``
    records that the input config had r0_1 > r0_2 and was relabeled.
    """

    r_lo: float
    r_hi: float
    beta: BetaSpec
    weight1: float  # regime-1 occupation = 1 - s
    weight2: float  # regime-2 occupation = s
    log_norm: float  # log of the constant C
    swapped: bool = False

    @property
    def norm_const(self) -> float:
        return math.exp(self.log_norm)

    def _x(self, r):
        return (np.asarray(r, dtype=float) - self.r_lo) / (self.r_hi - self.r_lo)

    def pdf(self, r):
        g1, g2 = self.beta.gamma1, self.beta.gamma2
        x = self._x(r)
        span = self.r_hi - self.r_lo
        return (
            self.weight1 * stats.beta.pdf(x, g1, g2 + 1.0)
            + self.weight2 * stats.beta.pdf(x, g1 + 1.0, g2)
        ) / span

    def cdf(self, r):
        g1, g2 = self.beta.gamma1, self.beta.gamma2
        x = np.clip(self._x(r), 0.0, 1.0)
        return self.weight1 * stats.beta.cdf(x, g1, g2 + 1.0) + self.weight2 * stats.beta.cdf(
            x, g1 + 1.0, g2
        )

    def branch_pdf(self, j: int, r):
        """Unnormalized-in-branch density rho_j; integrates to the branch mass."""
        g1, g2 = self.beta.gamma1, self.beta.gamma2
        x = self._x(r)
        span = self.r_hi - self.r_lo
        if j == 1:
            return self.weight1 * stats.beta.pdf(x, g1, g2 + 1.0) / span
        if j == 2:
            return self.weight2 * stats.beta.pdf(x, g1 + 1.0, g2) / span
        raise ValueError(f"regime index must be 1 or 2, got {j}")


def invariant_density(c: DuoConfig) -> FaceDensity:
    """Invariant law of the species-free resource process.

    Requires distinct resource inputs; a config with r0_1 > r0_2 is
    relabeled internally (the law itself does not depend on labels).
    """
    if c.lam == 0.0:
        raise DegenerateDensityError(
            "lam = 0: the resource freezes in its initial regime; no absolutely "
            "continuous invariant density exists"
        )
    swapped = False
    if c.vessel1.r0 > c.vessel2.r0:
        c = c.swapped()
        swapped = True
    if c.vessel1.r0 == c.vessel2.r0:
        raise ValueError("equal resource inputs: invariant law is a point mass at r0")
    d1, d2 = c.vessel1.delta, c.vessel2.delta
    g1, g2 = c.lam1 / d1, c.lam2 / d2
    span = c.vessel2.r0 - c.vessel1.r0
    # masses: C * span^(g1+g2) * [B(g1, g2+1) + (d1/d2) B(g1+1, g2)] = 1
    m1 = betaln(g1, g2 + 1.0)
    m2 = math.log(d1 / d2) + betaln(g1 + 1.0, g2)
    log_total = (g1 + g2) * math.log(span) + np.logaddexp(m1, m2)
    w1 = 1.0 / (1.0 + math.exp(m2 - m1))  # equals 1 - s algebraically
    return FaceDensity(
        r_lo=c.vessel1.r0,
        r_hi=c.vessel2.r0,
        beta=BetaSpec(g1, g2),
        weight1=w1,
        weight2=1.0 - w1,
        log_norm=-log_total,
        swapped=swapped,
    )


# --- quadrature helpers ------------------------------------------------------


def _beta_expectation(alpha: float, beta_: float, g, n: int) -> float:
    """E[g(X)] for X ~ Beta(alpha, beta_) and g smooth on (0, 1).

    Gauss-Jacobi with the Beta weight for moderate shapes; for very large
    shapes the mass is a sharp interior bump and a Gauss-Legendre rule on
    the quantile-windowed support is used.
    """
    if max(alpha, beta_) <= _GJ_MAX_EXPONENT:
        nodes, wts = roots_jacobi(n, beta_ - 1.0, alpha - 1.0)
        x = 0.5 * (nodes + 1.0)
        vals = g(x)
        return float(np.sum(wts * vals) / np.sum(wts))
    dist = stats.beta(alpha, beta_)
    lo, hi = float(dist.ppf(1e-15)), float(dist.ppf(1.0 - 1e-15))
    t, wt = roots_legendre(max(n, 200))
    x = 0.5 * (hi - lo) * (t + 1.0) + lo
    logw = dist.logpdf(x)
    w = np.exp(logw - logw.max())
    vals = g(x)
    return float(np.sum(wt * w * vals) / np.sum(wt * w))


# --- one-species rate --------------------------------------------------------


def _averaged_growth(c: DuoConfig, w: str, r1: float, r2: float, s: float) -> float:
    """(1-s)(f_w^1(r1) - delta1) + s (f_w^2(r2) - delta2)."""
    return (1.0 - s) * c.vessel1.growth(w, r1) + s * c.vessel2.growth(w, r2)


def resource_mix_fast_limit(c: DuoConfig) -> float:
    """Resource level R_inf reached in the fast-switching limit."""
    d1, d2, s = c.vessel1.delta, c.vessel2.delta, c.s
    den = (1.0 - s) * d1 + s * d2
    return ((1.0 - s) * d1 * c.vessel1.r0 + s * d2 * c.vessel2.r0) / den


def lambda0(c: DuoConfig, w: str, n_nodes: int = DEFAULT_NODES) -> float:
    """One-species invasion rate over the species-free switched resource.

    Equals the expectation of the frozen-environment growth rates against
    the invariant Beta law, with prefactor (g1+g2)/(lam1+lam2); degenerate
    branches (equal inputs, lam = 0) are evaluated exactly.
    """
    if c.lam == 0.0:
        return lambda0_limits(c, w)[0]
    if c.equal_inputs:
        r0 = c.vessel1.r0
        return _averaged_growth(c, w, r0, r0, c.s)
    if c.vessel1.r0 > c.vessel2.r0:
        c = c.swapped()
    d1, d2 = c.vessel1.delta, c.vessel2.delta
    g1, g2 = c.lam1 / d1, c.lam2 / d2
    r_lo, r_hi = c.vessel1.r0, c.vessel2.r0
    f1, f2 = c.vessel1.monod(w), c.vessel2.monod(w)

    def phi(x):
        r = r_lo + (r_hi - r_lo) * x
        t1 = d2 * (1.0 - x) * (f1.a * r / (f1.b + r) - d1)
        t2 = d1 * x * (f2.a * r / (f2.b + r) - d2)
        return t1 + t2

    phi0 = float(phi(0.0))
    phi1 = float(phi(1.0))

    def peeled(x):
        # doubly-vanishing remainder of phi after removing the affine
        # interpolant; smooth on [0, 1] because phi is analytic there
        return (phi(x) - phi0 * (1.0 - x) - phi1 * x) / (x * (1.0 - x))

    # endpoint Beta masses peeled off exactly: the Jacobi rule is unstable
    # for shape parameters near zero, while Beta(g1+1, g2+1) has shapes >= 1
    endpoint = (g2 * phi0 + g1 * phi1) / (g1 + g2)
    bulk_weight = g1 * g2 / ((g1 + g2) * (g1 + g2 + 1.0))
    expectation = endpoint + bulk_weight * _beta_expectation(
        g1 + 1.0, g2 + 1.0, peeled, n_nodes
    )
    prefactor = (g1 + g2) / (c.lam1 + c.lam2)
    return prefactor * expectation


def phi_convexity(c: DuoConfig, w: str, n_grid: int = 1024) -> str:
    """Sign pattern of the growth kernel's second derivative on [0, 1].

    The one-species rate is the prefactored expectation of Phi against a
    Beta law whose parameters scale with lam; by the convex order of Beta
    laws, the rate is monotone in lam whenever Phi is convex or concave on
    the whole interval.  Returns 'convex', 'concave', 'affine', or 'mixed'.
    Mixed convexity does occur for some vessel pairs, and then the rate can
    genuinely fail to be monotone in lam.
    """
    if c.equal_inputs:
        return "affine"
    if c.vessel1.r0 > c.vessel2.r0:
        c = c.swapped()
    d1, d2 = c.vessel1.delta, c.vessel2.delta
    f1, f2 = c.vessel1.monod(w), c.vessel2.monod(w)
    span = c.vessel2.r0 - c.vessel1.r0
    x = np.linspace(0.0, 1.0, n_grid)
    r = c.vessel1.r0 + span * x
    d1f = f1.a * f1.b / (f1.b + r) ** 2
    d2f = f2.a * f2.b / (f2.b + r) ** 2
    dd1f = -2.0 * f1.a * f1.b / (f1.b + r) ** 3
    dd2f = -2.0 * f2.a * f2.b / (f2.b + r) ** 3
    second = (
        d2 * (-2.0 * span * d1f + (1.0 - x) * span * span * dd1f)
        + d1 * (2.0 * span * d2f + x * span * span * dd2f)
    )
    scale = float(np.max(np.abs(second)))
    if scale == 0.0:
        return "affine"
    has_pos = bool(np.any(second > 1e-12 * scale))
    has_neg = bool(np.any(second < -1e-12 * scale))
    if has_pos and has_neg:
        return "mixed"
    return "convex" if has_pos else "concave"


def lambda0_limits(c: DuoConfig, w: str) -> tuple[float, float]:
    """(slow-switching limit, fast-switching limit) of the one-species rate."""
    s = c.s
    at0 = _averaged_growth(c, w, c.vessel1.r0, c.vessel2.r0, s)
    r_inf = resource_mix_fast_limit(c)
    at_inf = _averaged_growth(c, w, r_inf, r_inf, s)
    return at0, at_inf


def lambda0_monotone_check(
    c: DuoConfig, w: str, lambda_grid, tol: float = 1e-9
) -> bool:
    """True iff lambda0 along the ascending lam grid is monotone up to tol."""
    grid = np.asarray(lambda_grid, dtype=float)
    if grid.size < 3 or np.any(np.diff(grid) <= 0):
        raise ValueError("lambda_grid must be ascending with at least 3 points")
    vals = np.array([lambda0(c.with_coupling(lam=float(l)), w) for l in grid])
    d = np.diff(vals)
    return bool(np.all(d >= -tol) or np.all(d <= tol))


# --- two-species rate --------------------------------------------------------


@dataclass(frozen=True)
class TwoSpeciesIntegrand:
    """All ingredients of the two-species rate for invader ``w``.

    The support [x_lo, x_hi] (resident biomass coordinate x = R0 - R) runs
    between the resident's two single-vessel equilibria.  The stationary
    log-weight is

        lam*H(x) = -(g1*b1 + g2*b2) log x
                   + g1*a1 log|x1 - x| + g2*a2 log|x2 - x|

    with resident constants a_j = alpha_j = a/(a-delta), b_j = beta_j =
    1 + R0/b, g_j = gamma_j = lam_j * omega_j, omega_j =
    (s_j/delta_j) R*_j/(R0 - R*_j); the density of regime j carries an extra
    1/|X_j|, giving endpoint exponents gamma*alpha - 1 > -1.
    """

    invader: str
    resident: str
    r0: float
    x_lo: float
    x_hi: float
    x_star: tuple[float, float]  # per-vessel resident fixed points
    alpha: tuple[float, float]
    beta_: tuple[float, float]
    omega: tuple[float, float]
    gamma: tuple[float, float]
    exponent_lo: float
    exponent_hi: float
    _config: DuoConfig

    def resident_field(self, j: int, x):
        """X_j(x) = x (f_res^j(R0 - x) - delta_j)."""
        x = np.asarray(x, dtype=float)
        return x * self._growth(self.resident, j, x)

    def _growth(self, species: str, j: int, x):
        v = self._config.vessel(j)
        m = v.monod(species)
        r = self.r0 - np.asarray(x, dtype=float)
        return m.a * r / (m.b + r) - v.delta

    def h_tilde(self, j: int, x):
        """Invader growth rate in vessel j at resident biomass x."""
        return self._growth(self.invader, j, x)

    def h_w(self, x):
        """Occupation-weighted invader growth (the paper-level h function)."""
        x = np.asarray(x, dtype=float)
        a1 = np.abs(x * self._growth(self.resident, 1, x))
        a2 = np.abs(x * self._growth(self.resident, 2, x))
        return (self.h_tilde(1, x) * a2 + self.h_tilde(2, x) * a1) / (a1 + a2)

    def log_H(self, x):
        """lam*H(x), up to an additive constant (cancels in the rate ratio)."""
        x = np.asarray(x, dtype=float)
        g1, g2 = self.gamma
        a1, a2 = self.alpha
        b1, b2 = self.beta_
        x1, x2 = self.x_star
        return (
            -(g1 * b1 + g2 * b2) * np.log(x)
            + g1 * a1 * np.log(np.abs(x1 - x))
            + g2 * a2 * np.log(np.abs(x2 - x))
        )

    def weight(self, x):
        """Stationary weight g(x) = (|X1| + |X2|)/(|X1| |X2|), the smooth part
        multiplying e^(lam H); vanishes nowhere inside the support but its
        reciprocal factors vanish at the endpoints."""
        x = np.asarray(x, dtype=float)
        a1 = np.abs(x * self._growth(self.resident, 1, x))
        a2 = np.abs(x * self._growth(self.resident, 2, x))
        return (a1 + a2) / (a1 * a2)


def _resident_fixed_points(c: DuoConfig, w: str) -> tuple[TwoSpeciesIntegrand, float, float]:
    if not c.equal_inputs:
        raise ValueError("two-species rate requires equal resource inputs")
    res = other(w)
    r0 = c.vessel1.r0
    stars = []
    for j in (1, 2):
        v = c.vessel(j)
        be = break_even(v.monod(res), v.delta)
        if not be.finite or be.as_float() >= r0:
            raise ResidentNotViableError(
                res,
                j,
                f"resident {res!r} cannot persist in vessel {j}: "
                f"break-even {be.as_float()} >= r0 {r0}",
            )
        stars.append(be.as_float())
    x_star = (r0 - stars[0], r0 - stars[1])
    alpha = []
    beta_ = []
    omega = []
    gamma = []
    lams = (c.lam1, c.lam2)
    for j in (1, 2):
        v = c.vessel(j)
        m = v.monod(res)
        alpha.append(m.a / (m.a - v.delta))
        beta_.append(1.0 + r0 / m.b)
        om = (stars[j - 1] / (r0 - stars[j - 1])) / v.delta
        omega.append(om * (c.s if j == 1 else 1.0 - c.s))
        gamma.append(lams[j - 1] / v.delta * stars[j - 1] / (r0 - stars[j - 1]))
    x_lo, x_hi = sorted(x_star)
    lo_j = 0 if x_star[0] <= x_star[1] else 1
    hi_j = 1 - lo_j
    integ = TwoSpeciesIntegrand(
        invader=w,
        resident=res,
        r0=r0,
        x_lo=x_lo,
        x_hi=x_hi,
        x_star=tuple(x_star),
        alpha=tuple(alpha),
        beta_=tuple(beta_),
        omega=tuple(omega),
        gamma=tuple(gamma),
        exponent_lo=gamma[lo_j] * alpha[lo_j] - 1.0,
        exponent_hi=gamma[hi_j] * alpha[hi_j] - 1.0,
        _config=c,
    )
    return integ, stars[0], stars[1]


def two_species_integrand(c: DuoConfig, w: str) -> TwoSpeciesIntegrand:
    """Expose the support, constants and evaluators of the rate integrals."""
    return _resident_fixed_points(c, w)[0]


def _log_smooth_branch(integ: TwoSpeciesIntegrand, j: int, x: np.ndarray) -> np.ndarray:
    """log of e^(lam H)/|X_j| with the endpoint power laws divided out.

    The result is the log of a smooth positive function on [x_lo, x_hi]:
    the Jacobi weight (x - x_lo)^p_lo (x_hi - x)^p_hi carries the removed
    singular factors.
    """
    c = integ._config
    g1, g2 = integ.gamma
    a1, a2 = integ.alpha
    b1, b2 = integ.beta_
    x1, x2 = integ.x_star
    v = c.vessel(j)
    m = v.monod(integ.resident)
    # |X_j| = x |a - d| |x_j - x| / (b + R0 - x); keep the smooth factor only
    log_smooth = -np.log(x * abs(m.a - v.delta) / (m.b + integ.r0 - x))
    e1 = g1 * a1 - (1.0 if j == 1 else 0.0)
    e2 = g2 * a2 - (1.0 if j == 2 else 0.0)
    lo_is_1 = integ.x_star[0] <= integ.x_star[1]
    p_lo, p_hi = integ.exponent_lo, integ.exponent_hi
    # subtract the endpoint exponents handled by the quadrature weight
    if lo_is_1:
        e1 -= p_lo
        e2 -= p_hi
    else:
        e2 -= p_lo
        e1 -= p_hi
    # a branch's own endpoint has coefficient exactly 0 by construction; guard
    # the 0 * log(0) = nan case there.  The other branch carries coefficient 1
    # and its exp() correctly underflows to 0 at that endpoint.
    with np.errstate(divide="ignore"):
        t1 = np.zeros_like(x) if e1 == 0.0 else e1 * np.log(np.abs(x1 - x))
        t2 = np.zeros_like(x) if e2 == 0.0 else e2 * np.log(np.abs(x2 - x))
        total = log_smooth - (g1 * b1 + g2 * b2) * np.log(x) + t1 + t2
    return total


def _rate_gauss_jacobi(integ: TwoSpeciesIntegrand, n: int) -> float:
    """Ratio of the two stationary integrals by endpoint decomposition.

    Substituting t = (x - x_lo)/span, each integral has the form
    int t^(e1-1) (1-t)^(e2-1) S(t) dt with S smooth and e_j = gamma_j*alpha_j
    possibly tiny (slow switching).  The mass then concentrates in endpoint
    layers of width exp(-1/e) that no quadrature can resolve, so the endpoint
    contributions are peeled off exactly as Beta functions:

        int = S(0) B(e1, e2+1) + S(1) B(e1+1, e2) + int t^e1 (1-t)^e2 Q(t) dt

    with Q(t) = (S(t) - S(0)(1-t) - S(1)t)/(t(1-t)) smooth.  The remaining
    integral has mild positive exponents and is done by Gauss-Jacobi.
    """
    e1 = integ.exponent_lo + 1.0
    e2 = integ.exponent_hi + 1.0
    span = integ.x_hi - integ.x_lo
    nodes, wts = roots_jacobi(n, e2, e1)
    t = 0.5 * (nodes + 1.0)
    x = integ.x_lo + span * t
    x_all = np.concatenate((x, [integ.x_lo, integ.x_hi]))
    ls1 = _log_smooth_branch(integ, 1, x_all)
    ls2 = _log_smooth_branch(integ, 2, x_all)
    shift = max(ls1.max(), ls2.max())
    w1 = np.exp(ls1 - shift)
    w2 = np.exp(ls2 - shift)
    s_den = w1 + w2
    s_num = integ.h_tilde(1, x_all) * w1 + integ.h_tilde(2, x_all) * w2
    sn, sn0, sn1 = s_num[:-2], s_num[-2], s_num[-1]
    sd, sd0, sd1 = s_den[:-2], s_den[-2], s_den[-1]
    b1 = math.exp(betaln(e1, e2 + 1.0))
    b2 = math.exp(betaln(e1 + 1.0, e2))
    scale = 0.5 ** (e1 + e2 + 1.0)
    qn = (sn - sn0 * (1.0 - t) - sn1 * t) / (t * (1.0 - t))
    qd = (sd - sd0 * (1.0 - t) - sd1 * t) / (t * (1.0 - t))
    num = sn0 * b1 + sn1 * b2 + scale * np.sum(wts * qn)
    den = sd0 * b1 + sd1 * b2 + scale * np.sum(wts * qd)
    return float(num / den)


def _side_nodes(e_side: float, w_max: float, n_gl: int):
    """Panel nodes for the half-interval [0, 0.5] in the distance coordinate.

    Panels are geometric (ratio 4) from t_min up to 0.5 so that the
    power-law factor t^(e-1) varies boundedly per panel; t_min is chosen so
    the neglected [0, t_min] mass fraction t_min^e is below 1e-14 of the
    endpoint mass (floored at 1e-280 to stay in double range).  Panels are
    further split to at most w_max width to resolve interior peaks.
    Distances t are kept as their own floats, never rounded through x.
    """
    t_min = min(10.0 ** max(-14.0 / max(e_side, 1e-3), -280.0), 1e-3)
    edges = [t_min]
    while edges[-1] < 0.5:
        edges.append(min(edges[-1] * 4.0, 0.5))
    refined = []
    for a, b in zip(edges[:-1], edges[1:]):
        k = max(1, int(math.ceil((b - a) / w_max)))
        refined.extend(np.linspace(a, b, k + 1)[:-1])
    refined.append(0.5)
    refined = np.asarray(refined)
    xi, wt = roots_legendre(n_gl)
    a = refined[:-1][:, None]
    b = refined[1:][:, None]
    t = (0.5 * (b - a) * (xi + 1.0) + a).ravel()
    w = (0.5 * (b - a) * wt).ravel()
    return t, w


def _rate_layered(integ: TwoSpeciesIntegrand, n_gl: int) -> float:
    """Universal evaluator for the rate ratio on log-graded panels.

    Nodes are parameterized by their exact distance to the nearest support
    endpoint, so endpoint layers far below the floating-point spacing of x
    remain resolvable; all magnitudes are handled in log space with one
    global shift (which cancels in the ratio).
    """
    c = integ._config
    span = integ.x_hi - integ.x_lo
    lo_is_1 = integ.x_star[0] <= integ.x_star[1]
    e_lo = integ.exponent_lo + 1.0
    e_hi = integ.exponent_hi + 1.0
    g1, g2 = integ.gamma
    a1, a2 = integ.alpha
    b1c, b2c = integ.beta_
    # crude bound on the log-range of the integrand, for peak resolution
    rough = (
        e_lo
        + e_hi
        + abs(g1 * b1c + g2 * b2c) * abs(math.log(integ.x_hi / integ.x_lo))
        + 10.0
    )
    w_max = 1.0 / (8.0 + 2.0 * math.sqrt(rough))

    def half(side: str, e_side: float):
        t, w = _side_nodes(e_side, w_max, n_gl)
        d_near = span * t  # exact distance to this side's endpoint
        d_far = span * (1.0 - t)
        if side == "lo":
            x = integ.x_lo + d_near
            d1 = d_near if lo_is_1 else d_far
            d2 = d_far if lo_is_1 else d_near
        else:
            x = integ.x_hi - d_near
            d1 = d_far if lo_is_1 else d_near
            d2 = d_near if lo_is_1 else d_far
        log_h_common = -(g1 * b1c + g2 * b2c) * np.log(x) + g1 * a1 * np.log(
            d1
        ) + g2 * a2 * np.log(d2)
        parts = []
        for j, dj in ((1, d1), (2, d2)):
            v = c.vessel(j)
            m = v.monod(integ.resident)
            ld = log_h_common - np.log(x * abs(m.a - v.delta) * dj / (m.b + integ.r0 - x))
            parts.append(ld)
        h1 = integ.h_tilde(1, x)
        h2 = integ.h_tilde(2, x)
        return w, parts[0], parts[1], h1, h2

    w_l, ld1_l, ld2_l, h1_l, h2_l = half("lo", e_lo)
    w_h, ld1_h, ld2_h, h1_h, h2_h = half("hi", e_hi)
    shift = max(ld1_l.max(), ld2_l.max(), ld1_h.max(), ld2_h.max())
    num = 0.0
    den = 0.0
    for w, ld1, ld2, h1, h2 in (
        (w_l, ld1_l, ld2_l, h1_l, h2_l),
        (w_h, ld1_h, ld2_h, h1_h, h2_h),
    ):
        w1 = np.exp(ld1 - shift)
        w2 = np.exp(ld2 - shift)
        num += float(np.sum(w * (h1 * w1 + h2 * w2)))
        den += float(np.sum(w * (w1 + w2)))
    return num / den


def lambda_two_species(c: DuoConfig, w: str, rel_tol: float = 1e-8) -> float:
    """Invasion rate of species w against the other species' attractor.

    Evaluated as a ratio of two integrals sharing the same stationary weight
    and quadrature nodes; refined until two successive node counts agree to
    ``rel_tol`` relative.
    """
    integ, r1s, r2s = _resident_fixed_points(c, w)
    span = integ.x_hi - integ.x_lo
    if span <= 1e-12 * max(1.0, integ.r0):
        # both single-vessel equilibria coincide: frozen-point average
        s = c.s
        return (1.0 - s) * float(integ.h_tilde(1, integ.x_star[0])) + s * float(
            integ.h_tilde(2, integ.x_star[1])
        )
    if c.lam == 0.0:
        return lambda_two_species_limits(c, w)[0]
    # tiny endpoint exponents (slow switching): the stationary mass sits in
    # endpoint layers of width exp(-1/e) that no node placement resolves;
    # peel the endpoint Beta masses off analytically.  The smooth factor is
    # then near-constant, so the peeling is also numerically benign.
    tiny_exponents = min(integ.exponent_lo, integ.exponent_hi) + 1.0 < 0.02
    evaluate = _rate_gauss_jacobi if tiny_exponents else _rate_layered
    schedule = (80, 160, 320, 640) if tiny_exponents else (12, 20, 28)
    prev = None
    for n in schedule:
        val = evaluate(integ, n)
        if prev is not None and abs(val - prev) <= rel_tol * max(1.0, abs(val)):
            return val
        prev = val
    return prev


def lambda_two_species_limits(c: DuoConfig, w: str) -> tuple[float, float]:
    """(slow, fast) switching limits of the two-species rate.

    The fast limit evaluates the invader's mixed growth at the resource level
    where the mixed resident growth vanishes (found by bisection, residual
    below 1e-12)."""
    integ, r1s, r2s = _resident_fixed_points(c, w)
    s = c.s
    at0 = (1.0 - s) * c.vessel1.growth(w, r1s) + s * c.vessel2.growth(w, r2s)
    res = integ.resident
    r0 = integ.r0

    def mixed_resident(r):
        return (1.0 - s) * c.vessel1.growth(res, r) + s * c.vessel2.growth(res, r)

    lo, hi = 0.0, r0
    if not mixed_resident(lo) < 0 < mixed_resident(hi):
        # mixed growth is increasing in r; no root means the averaged
        # resident cannot equilibrate inside (0, r0)
        raise ValueError("averaged resident growth has no root in (0, r0)")
    r_inf = brentq(mixed_resident, lo, hi, xtol=1e-14, rtol=8.9e-16)
    at_inf = (1.0 - s) * c.vessel1.growth(w, r_inf) + s * c.vessel2.growth(w, r_inf)
    return float(at0), float(at_inf)


# --- classification ----------------------------------------------------------


@dataclass(frozen=True)
class SwitchVerdict:
    """Long-time verdict for the switched model from the invasion-rate signs."""

    tag: str  # extinction-of-u | extinction-of-v | exclusive-bistability | coexistence | inconclusive
    lambda_u: float
    lambda_v: float
    hw_u: HwWitness | None = None
    hw_v: HwWitness | None = None
    notes: tuple[str, ...] = ()


def _rate_with_fallback(c: DuoConfig, w: str) -> tuple[float, str]:
    try:
        return lambda_two_species(c, w), "analytic"
    except ResidentNotViableError:
        # resident dies out on its own; the invader then experiences the
        # species-free resource, whose growth rate is the one-species rate
        return lambda0(c, w), "one-species-fallback"


def classify_switching(c: DuoConfig, zero_band: float = ZERO_BAND_DEFAULT) -> SwitchVerdict:
    """Sign-table classification of the switched two-species competition.

    Mixed signs additionally require the unfavorability hypothesis for the
    species with the negative rate; otherwise the verdict is inconclusive.
    """
    lu, src_u = _rate_with_fallback(c, "u")
    lv, src_v = _rate_with_fallback(c, "v")
    notes = []
    if src_u != "analytic":
        notes.append(f"lambda_u via {src_u}: resident v not viable alone")
    if src_v != "analytic":
        notes.append(f"lambda_v via {src_v}: resident u not viable alone")

    def verdict(tag, hw_u=None, hw_v=None):
        return SwitchVerdict(tag, lu, lv, hw_u, hw_v, tuple(notes))

    if abs(lu) < zero_band or abs(lv) < zero_band:
        notes.append("a rate lies inside the zero band")
        return verdict("inconclusive")
    if lu > 0 and lv > 0:
        return verdict("coexistence")
    if lu < 0 and lv < 0:
        return verdict("exclusive-bistability")
    if lu > 0 > lv:
        hw = hypothesis_Hw(c, "v")
        if hw.holds:
            return verdict("extinction-of-v", hw_v=hw)
        notes.append("H_v failed: extinction-of-v not certified")
        return verdict("inconclusive", hw_v=hw)
    hw = hypothesis_Hw(c, "u")
    if hw.holds:
        return verdict("extinction-of-u", hw_u=hw)
    notes.append("H_u failed: extinction-of-u not certified")
    return verdict("inconclusive", hw_u=hw)
