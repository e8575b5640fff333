"""The deterministic two-vessel model (gradostat).

Two chemostats exchange their contents at rates lam1 = s*lam (vessel 1 ->
vessel 2 direction of the convention below) and lam2 = (1-s)*lam.  The total
concentration per vessel relaxes to a fixed vector Sigma, after which the
dynamics reduce to a four-dimensional competitive system whose equilibria are
all computable in closed form:

* semi-trivial equilibria lie on the intersection of a decreasing Mobius
  curve F_w (the per-species survival relation) with an increasing resource
  line g_w;
* coexistence equilibria are intersections of the two species' Mobius
  curves, i.e. roots of a quadratic;
* stability reduces to the sign of the fourth leading minor d4 of the
  (sign-conjugated) Jacobian, with a closed form cross-checked against the
  direct determinant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .config import DuoConfig, other
from .core import IntegrationError, break_even
from .invasion import resource_mix_fast_limit

ZERO_BAND_DEFAULT = 1e-4
_BISECT_XTOL = 1e-12
_MARGINAL_D4 = 1e-12
_MARGINAL_DISC = 1e-12


def coupling_matrix(c: DuoConfig) -> np.ndarray:
    """K = [[-s, s], [1-s, s-1]]; lam*K are the exchange rates."""
    s = c.s
    return np.array([[-s, s], [1.0 - s, s - 1.0]])


@dataclass(frozen=True)
class SigmaVector:
    sigma1: float
    sigma2: float
    residual: float

    def as_array(self) -> np.ndarray:
        return np.array([self.sigma1, self.sigma2])


def sigma_star(c: DuoConfig) -> SigmaVector:
    """Equilibrium total concentration: (Delta - lam*K) Sigma = delta*R0."""
    d1, d2 = c.vessel1.delta, c.vessel2.delta
    mat = np.diag([d1, d2]) - c.lam * coupling_matrix(c)
    rhs = np.array([d1 * c.vessel1.r0, d2 * c.vessel2.r0])
    sigma = np.linalg.solve(mat, rhs)
    residual = float(np.max(np.abs(mat @ sigma - rhs)))
    return SigmaVector(float(sigma[0]), float(sigma[1]), residual)


def _growth(c: DuoConfig, w: str, j: int, r: float) -> float:
    return c.vessel(j).growth(w, r)


def _max_eig_2x2(x1: float, x2: float, l1: float, l2: float) -> float:
    """Largest eigenvalue of [[x1 - l1, l1], [l2, x2 - l2]] in closed form."""
    half_tr = 0.5 * ((x1 - l1) + (x2 - l2))
    disc = 0.25 * ((x1 - l1) - (x2 - l2)) ** 2 + l1 * l2
    return half_tr + math.sqrt(disc)


def gamma0(c: DuoConfig, w: str) -> float:
    """One-species invasion rate: growth of w dropped into the species-free
    gradostat, i.e. the top eigenvalue of the coupling-corrected growth
    matrix at Sigma."""
    sig = sigma_star(c)
    x1 = _growth(c, w, 1, sig.sigma1)
    x2 = _growth(c, w, 2, sig.sigma2)
    return _max_eig_2x2(x1, x2, c.lam1, c.lam2)


def gamma0_matrix(c: DuoConfig, w: str) -> np.ndarray:
    """The matrix whose top eigenvalue is gamma0 (for oracle cross-checks)."""
    sig = sigma_star(c)
    x1 = _growth(c, w, 1, sig.sigma1)
    x2 = _growth(c, w, 2, sig.sigma2)
    l1, l2 = c.lam1, c.lam2
    return np.array([[x1 - l1, l1], [l2, x2 - l2]])


def gamma0_limits(c: DuoConfig, w: str) -> tuple[float, float]:
    """(slow, fast) exchange limits of gamma0."""
    at0 = max(_growth(c, w, 1, c.vessel1.r0), _growth(c, w, 2, c.vessel2.r0))
    r_inf = resource_mix_fast_limit(c)
    s = c.s
    at_inf = (1.0 - s) * _growth(c, w, 1, r_inf) + s * _growth(c, w, 2, r_inf)
    return at0, at_inf


# --- simulation --------------------------------------------------------------


def simulate_gradostat_full(
    c: DuoConfig,
    init,
    horizon: float,
    tol: float = 1e-9,
    n_samples: int = 2000,
) -> np.ndarray:
    """Integrate the six-dimensional gradostat from init = (R1,R2,U1,U2,V1,V2).

    Returns an array with columns (t, R1, R2, U1, U2, V1, V2).
    """
    y0 = np.asarray(init, dtype=float)
    if y0.shape != (6,) or np.any(y0 < 0):
        raise ValueError("init must be 6 nonnegative concentrations")
    l1, l2 = c.lam1, c.lam2
    v1, v2 = c.vessel1, c.vessel2

    def rhs(t, y):
        r1, r2, u1, u2, w1, w2 = y
        r1c, r2c = max(r1, 0.0), max(r2, 0.0)
        cu1, cu2 = v1.monod_u(r1c), v2.monod_u(r2c)
        cv1, cv2 = v1.monod_v(r1c), v2.monod_v(r2c)
        return (
            v1.delta * (v1.r0 - r1) - u1 * cu1 - w1 * cv1 + l1 * (r2 - r1),
            v2.delta * (v2.r0 - r2) - u2 * cu2 - w2 * cv2 + l2 * (r1 - r2),
            u1 * (cu1 - v1.delta) + l1 * (u2 - u1),
            u2 * (cu2 - v2.delta) + l2 * (u1 - u2),
            w1 * (cv1 - v1.delta) + l1 * (w2 - w1),
            w2 * (cv2 - v2.delta) + l2 * (w1 - w2),
        )

    sol = solve_ivp(rhs, (0.0, horizon), y0, method="RK45", rtol=tol, atol=tol, dense_output=True)
    if not sol.success:
        raise IntegrationError(f"gradostat integration failed at t={sol.t[-1]}: {sol.message}")
    t = np.linspace(0.0, horizon, n_samples)
    y = sol.sol(t)
    y = np.where((y > -tol) & (y < 0.0), 0.0, y)
    return np.column_stack([t, y.T])


def simulate_gradostat_reduced(
    c: DuoConfig,
    init,
    horizon: float,
    tol: float = 1e-9,
    n_samples: int = 2000,
) -> np.ndarray:
    """Integrate the reduced four-dimensional flow on the Sigma slice.

    init = (U1, U2, V1, V2); resources are R_j = Sigma_j - U_j - V_j.
    Returns an array with columns (t, U1, U2, V1, V2).
    """
    y0 = np.asarray(init, dtype=float)
    if y0.shape != (4,) or np.any(y0 < 0):
        raise ValueError("init must be 4 nonnegative concentrations")
    sig = sigma_star(c).as_array()
    l1, l2 = c.lam1, c.lam2
    v1, v2 = c.vessel1, c.vessel2

    def rhs(t, y):
        u1, u2, w1, w2 = y
        r1 = max(sig[0] - u1 - w1, 0.0)
        r2 = max(sig[1] - u2 - w2, 0.0)
        return (
            u1 * (v1.monod_u(r1) - v1.delta) + l1 * (u2 - u1),
            u2 * (v2.monod_u(r2) - v2.delta) + l2 * (u1 - u2),
            w1 * (v1.monod_v(r1) - v1.delta) + l1 * (w2 - w1),
            w2 * (v2.monod_v(r2) - v2.delta) + l2 * (w1 - w2),
        )

    sol = solve_ivp(rhs, (0.0, horizon), y0, method="RK45", rtol=tol, atol=tol, dense_output=True)
    if not sol.success:
        raise IntegrationError(f"reduced gradostat integration failed at t={sol.t[-1]}: {sol.message}")
    t = np.linspace(0.0, horizon, n_samples)
    y = sol.sol(t)
    y = np.where((y > -tol) & (y < 0.0), 0.0, y)
    return np.column_stack([t, y.T])


# --- curve geometry (equal resource inputs) ----------------------------------


def _require_equal_inputs(c: DuoConfig) -> float:
    if not c.equal_inputs:
        raise ValueError("the equilibrium machinery requires equal resource inputs")
    return c.vessel1.r0


@dataclass(frozen=True)
class MobiusCurve:
    """F_w(r) = (m1 r + m2)/(m3 r + m4), the vessel-2 resource level at which
    species w is stationary given vessel-1 level r; defined where the vessel-1
    growth stays below the exchange rate (r_min <= r < r_max)."""

    species: str
    m1: float
    m2: float
    m3: float
    m4: float
    r_min: float
    r_max: float

    def contains(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        return (r >= self.r_min) & (r < self.r_max)

    def value(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return (self.m1 * r + self.m2) / (self.m3 * r + self.m4)

    def deriv(self, r):
        r = np.asarray(r, dtype=float)
        den = self.m3 * r + self.m4
        with np.errstate(divide="ignore", invalid="ignore"):
            return (self.m1 * self.m4 - self.m2 * self.m3) / (den * den)


class EmptyDomainError(RuntimeError):
    """The survival relation has an empty domain for this species."""


def curve_F(c: DuoConfig, w: str) -> MobiusCurve:
    """Mobius form of the per-species stationarity relation.

    Derived by clearing Monod denominators from
    (X_w1(r) - lam1)(X_w2(F) - lam2) = lam1*lam2.
    """
    r0 = _require_equal_inputs(c)
    if not c.lam > 0:
        raise ValueError("curve geometry requires lam > 0")
    l1, l2 = c.lam1, c.lam2
    va, vb = c.vessel1, c.vessel2
    a1, b1 = va.monod(w).a, va.monod(w).b
    a2, b2 = vb.monod(w).a, vb.monod(w).b
    d1, d2 = va.delta, vb.delta
    p1 = l2 * (a1 - d1)
    p2 = -l2 * b1 * d1
    q1 = a1 - d1 - l1
    q2 = -(d1 + l1) * b1
    m1 = b2 * (p1 + d2 * q1)
    m2 = b2 * (p2 + d2 * q2)
    m3 = (a2 - d2) * q1 - p1
    m4 = (a2 - d2) * q2 - p2
    # domain: X_w1(r) < lam1  <=>  q1*r + q2 < 0 (q2 < 0 always)
    if q1 > 0:
        r_max = min(r0, -q2 / q1)
    else:
        r_max = r0
    if r_max <= 0:
        raise EmptyDomainError(f"species {w!r}: survival relation has empty domain")
    return MobiusCurve(species=w, m1=m1, m2=m2, m3=m3, m4=m4, r_min=0.0, r_max=r_max)


def resource_line_g(c: DuoConfig, w: str, r) -> np.ndarray:
    """g_w(r) = R0 + (R0 - r)(X_w1(r) - lam1)/lam1, increasing on the domain.

    At a semi-trivial equilibrium g_w(R1) = R2; g_w(R0) = R0.
    """
    r0 = _require_equal_inputs(c)
    if not c.lam1 > 0:
        raise ValueError("resource line requires lam1 > 0")
    r = np.asarray(r, dtype=float)
    m = c.vessel1.monod(w)
    x1 = m.a * r / (m.b + r) - c.vessel1.delta
    return r0 + (r0 - r) * (x1 - c.lam1) / c.lam1


@dataclass(frozen=True)
class EquilibriumRecord:
    kind: str  # trivial | semi-trivial-u | semi-trivial-v | coexistence
    r: tuple[float, float]
    u: tuple[float, float]
    v: tuple[float, float]
    stable: bool | None
    max_real_eig: float | None = None
    mu: tuple[float, float] | None = None  # coexistence eigenvector scalars
    residual: float | None = None

    def state_reduced(self) -> np.ndarray:
        return np.array([self.u[0], self.u[1], self.v[0], self.v[1]])


def _reduced_rhs_at(c: DuoConfig, y: np.ndarray) -> np.ndarray:
    sig = sigma_star(c).as_array()
    l1, l2 = c.lam1, c.lam2
    v1, v2 = c.vessel1, c.vessel2
    u1, u2, w1, w2 = y
    r1 = sig[0] - u1 - w1
    r2 = sig[1] - u2 - w2
    return np.array(
        [
            u1 * (v1.monod_u(r1) - v1.delta) + l1 * (u2 - u1),
            u2 * (v2.monod_u(r2) - v2.delta) + l2 * (u1 - u2),
            w1 * (v1.monod_v(r1) - v1.delta) + l1 * (w2 - w1),
            w2 * (v2.monod_v(r2) - v2.delta) + l2 * (w1 - w2),
        ]
    )


def _record(c: DuoConfig, kind, r_pair, u_pair, v_pair, stable, mu=None, eig=None):
    y = np.array([u_pair[0], u_pair[1], v_pair[0], v_pair[1]])
    residual = float(np.max(np.abs(_reduced_rhs_at(c, y))))
    return EquilibriumRecord(
        kind=kind,
        r=(float(r_pair[0]), float(r_pair[1])),
        u=(float(u_pair[0]), float(u_pair[1])),
        v=(float(v_pair[0]), float(v_pair[1])),
        stable=stable,
        max_real_eig=eig,
        mu=mu,
        residual=residual,
    )


def _semi_trivial_decoupled(c: DuoConfig, w: str) -> EquilibriumRecord | None:
    """lam = 0: the vessels are independent simple chemostats."""
    r0 = _require_equal_inputs(c)
    rs = []
    ws = []
    any_pos = False
    for j in (1, 2):
        v = c.vessel(j)
        be = break_even(v.monod(w), v.delta)
        if be.finite and be.as_float() < r0:
            rs.append(be.as_float())
            ws.append(r0 - be.as_float())
            any_pos = True
        else:
            rs.append(r0)
            ws.append(0.0)
    if not any_pos:
        return None
    u_pair = tuple(ws) if w == "u" else (0.0, 0.0)
    v_pair = tuple(ws) if w == "v" else (0.0, 0.0)
    return _record(c, f"semi-trivial-{w}", tuple(rs), u_pair, v_pair, stable=None)


def semi_trivial_equilibrium(c: DuoConfig, w: str) -> EquilibriumRecord | None:
    """One-species equilibrium E_w, or None when the species washes out.

    Exists iff gamma0(w) > 0; located as the unique root of the increasing
    function g_w - F_w on the survival domain.
    """
    r0 = _require_equal_inputs(c)
    if gamma0(c, w) <= 0.0:
        return None
    if c.lam == 0.0:
        return _semi_trivial_decoupled(c, w)
    curve = curve_F(c, w)

    def gap(r):
        return float(resource_line_g(c, w, r) - curve.value(r))

    # F is a Mobius map; its pole splits the domain, and the physical branch
    # (the one containing the break-even anchor, where F is finite and
    # decreasing) starts just past the pole.
    lo = 0.0
    hi = curve.r_max * (1.0 - 1e-13)
    if curve.m3 != 0.0:
        pole = -curve.m4 / curve.m3
        if 0.0 <= pole < hi:
            lo = pole * (1.0 + 1e-12) + 1e-300
    glo, ghi = gap(lo), gap(hi)
    if not glo < 0 < ghi:
        # fall back to a grid scan for the sign change (robust to edge cases
        # where the pole offset lands on the wrong side)
        grid = np.linspace(lo, hi, 1024)
        vals = resource_line_g(c, w, grid) - curve.value(grid)
        finite = np.isfinite(vals)
        sign_change = np.nonzero(finite[:-1] & finite[1:] & (vals[:-1] < 0) & (vals[1:] > 0))[0]
        if sign_change.size == 0:
            raise RuntimeError(
                f"internal inconsistency: gamma0({w}) > 0 but g - F has no "
                f"bracketable root on [{lo}, {hi}]"
            )
        k = int(sign_change[-1])
        lo, hi = float(grid[k]), float(grid[k + 1])
    r1 = brentq(gap, lo, hi, xtol=_BISECT_XTOL, rtol=8.9e-16)
    r2 = float(curve.value(r1))
    w_pair = (r0 - r1, r0 - r2)
    if min(w_pair) <= 0:
        raise RuntimeError("internal inconsistency: nonpositive biomass at E_w")
    u_pair = w_pair if w == "u" else (0.0, 0.0)
    v_pair = w_pair if w == "v" else (0.0, 0.0)
    return _record(c, f"semi-trivial-{w}", (r1, r2), u_pair, v_pair, stable=None)


def invasion_gamma(c: DuoConfig, w: str, resident_eq: EquilibriumRecord | None = None) -> float:
    """Invasion rate of w against the other species' equilibrium: top
    eigenvalue of the coupling-corrected growth matrix at E_wbar's resources."""
    if resident_eq is None:
        resident_eq = semi_trivial_equilibrium(c, other(w))
    if resident_eq is None:
        raise ValueError(f"resident equilibrium E_{other(w)} does not exist")
    x1 = _growth(c, w, 1, resident_eq.r[0])
    x2 = _growth(c, w, 2, resident_eq.r[1])
    return _max_eig_2x2(x1, x2, c.lam1, c.lam2)


def invasion_gamma_limits(c: DuoConfig, w: str) -> tuple[float, float]:
    """(slow, fast) exchange limits of the two-species rate.

    Slow: best frozen-vessel growth at the resident's per-vessel break-evens.
    Fast: mixed growth at the resource level annihilating the mixed resident
    growth (shared with the switched model)."""
    r0 = _require_equal_inputs(c)
    res = other(w)
    vals = []
    for j in (1, 2):
        v = c.vessel(j)
        be = break_even(v.monod(res), v.delta)
        if not (be.finite and be.as_float() < r0):
            raise ValueError(f"resident {res!r} has no interior equilibrium in vessel {j}")
        vals.append(_growth(c, w, j, be.as_float()))
    at0 = max(vals)
    s = c.s

    def mixed_resident(r):
        return (1.0 - s) * _growth(c, res, 1, r) + s * _growth(c, res, 2, r)

    r_inf = brentq(mixed_resident, 0.0, r0, xtol=1e-14, rtol=8.9e-16)
    at_inf = (1.0 - s) * _growth(c, w, 1, r_inf) + s * _growth(c, w, 2, r_inf)
    return at0, float(at_inf)


# --- coexistence -------------------------------------------------------------


class DegenerateSpeciesPairError(RuntimeError):
    """The two species have identical survival curves (F_u == F_v)."""


def coexistence_candidates(c: DuoConfig) -> list[tuple[float, float]]:
    """Vessel-resource pairs where both species are simultaneously stationary.

    Intersections of the two Mobius curves, i.e. roots of a quadratic; at
    most two.  Roots are kept when they lie in both survival domains with
    positive resources.  A near-zero discriminant (tangency) yields the
    double root once.
    """
    r0 = _require_equal_inputs(c)
    fu = curve_F(c, "u")
    fv = curve_F(c, "v")
    # (m1u r + m2u)(m3v r + m4v) = (m1v r + m2v)(m3u r + m4u)
    qa = fu.m1 * fv.m3 - fv.m1 * fu.m3
    qb = fu.m1 * fv.m4 + fu.m2 * fv.m3 - fv.m1 * fu.m4 - fv.m2 * fu.m3
    qc = fu.m2 * fv.m4 - fv.m2 * fu.m4
    scale = max(abs(qa), abs(qb), abs(qc))
    if scale == 0.0 or (
        abs(qa) <= 1e-14 * scale and abs(qb) <= 1e-14 * scale and abs(qc) <= 1e-14 * scale
    ):
        raise DegenerateSpeciesPairError("identical survival curves for both species")
    if abs(qa) <= 1e-14 * scale:
        roots = [-qc / qb] if qb != 0.0 else []
    else:
        disc = qb * qb - 4.0 * qa * qc
        if disc < -_MARGINAL_DISC * scale * scale:
            roots = []
        elif abs(disc) <= _MARGINAL_DISC * scale * scale:
            roots = [-qb / (2.0 * qa)]
        else:
            sq = math.sqrt(disc)
            # numerically stable quadratic roots
            q = -0.5 * (qb + math.copysign(sq, qb))
            roots = sorted({q / qa, qc / q if q != 0.0 else -qb / qa})
    out = []
    r_max = min(fu.r_max, fv.r_max)
    for r in roots:
        if not (0.0 < r < r_max):
            continue
        f_val = float(fu.value(r))
        if not (0.0 < f_val < r0):
            continue
        out.append((float(r), f_val))
    return out


def _mu(c: DuoConfig, w: str, rc: tuple[float, float]) -> float:
    """Eigenvector scalar: W_w = mu_w (lam1, lam1 - X_w1(Rc1))."""
    res = other(w)
    g_res = float(resource_line_g(c, res, rc[0]))
    x_res = _growth(c, res, 1, rc[0])
    x_w = _growth(c, w, 1, rc[0])
    return (g_res - rc[1]) / (x_res - x_w)


def admissible_coexistence(c: DuoConfig, rc: tuple[float, float]) -> EquilibriumRecord | None:
    """Concentrations at a candidate coexistence point, or None.

    Admissible iff the semi-trivial resources interlace
    ((Ru1 - Rv1)(Ru2 - Rv2) < 0), the candidate lies in the rectangle they
    span, and both eigenvector scalars mu are positive.
    """
    eu = semi_trivial_equilibrium(c, "u")
    ev = semi_trivial_equilibrium(c, "v")
    if eu is None or ev is None:
        return None
    if (eu.r[0] - ev.r[0]) * (eu.r[1] - ev.r[1]) >= 0.0:
        return None
    for k in (0, 1):
        lo, hi = sorted((eu.r[k], ev.r[k]))
        if not (lo <= rc[k] <= hi):
            return None
    mu_u = _mu(c, "u", rc)
    mu_v = _mu(c, "v", rc)
    if not (mu_u > 0.0 and mu_v > 0.0):
        return None
    l1 = c.lam1
    u_pair = (mu_u * l1, mu_u * (l1 - _growth(c, "u", 1, rc[0])))
    v_pair = (mu_v * l1, mu_v * (l1 - _growth(c, "v", 1, rc[0])))
    return _record(c, "coexistence", rc, u_pair, v_pair, stable=None, mu=(mu_u, mu_v))


def coexistence_jacobian(c: DuoConfig, record: EquilibriumRecord) -> np.ndarray:
    """Jacobian of the reduced flow at a coexistence equilibrium, ordered
    (U1, U2, V1, V2)."""
    l1, l2 = c.lam1, c.lam2
    r1, r2 = record.r
    u1, u2 = record.u
    w1, w2 = record.v
    xu1, xu2 = _growth(c, "u", 1, r1), _growth(c, "u", 2, r2)
    xv1, xv2 = _growth(c, "v", 1, r1), _growth(c, "v", 2, r2)
    bu1 = u1 * _monod_deriv(c, "u", 1, r1)
    bu2 = u2 * _monod_deriv(c, "u", 2, r2)
    bv1 = w1 * _monod_deriv(c, "v", 1, r1)
    bv2 = w2 * _monod_deriv(c, "v", 2, r2)
    return np.array(
        [
            [xu1 - l1 - bu1, l1, -bu1, 0.0],
            [l2, xu2 - l2 - bu2, 0.0, -bu2],
            [-bv1, 0.0, xv1 - l1 - bv1, l1],
            [0.0, -bv2, l2, xv2 - l2 - bv2],
        ]
    )


def _monod_deriv(c: DuoConfig, w: str, j: int, r: float) -> float:
    m = c.vessel(j).monod(w)
    return m.a * m.b / (m.b + r) ** 2


def d4_closed_form(c: DuoConfig, record: EquilibriumRecord) -> float:
    """Closed form of the fourth minor at a coexistence equilibrium.

    sign(d4) = sign((Rv1 - Ru1)(F_u'(Rc1)/F_v'(Rc1) - 1)); the full
    expression is cross-checked against the direct determinant."""
    if record.mu is None:
        raise ValueError("record must be a coexistence equilibrium with mu data")
    mu_u, mu_v = record.mu
    l1, l2 = c.lam1, c.lam2
    r1, r2 = record.r
    xu1 = _growth(c, "u", 1, r1)
    xv1 = _growth(c, "v", 1, r1)
    fu = curve_F(c, "u")
    fv = curve_F(c, "v")
    ratio = float(fu.deriv(r1) / fv.deriv(r1))
    return (
        mu_u
        * mu_v
        * l1
        * l1
        * l2
        * _monod_deriv(c, "u", 2, r2)
        * _monod_deriv(c, "v", 1, r1)
        * (xu1 - xv1)
        * (xu1 - l1)
        / (xv1 - l1)
        * (ratio - 1.0)
    )


@dataclass(frozen=True)
class StabilityReport:
    verdict: str  # stable | unstable | marginal
    minors: tuple[float, float, float, float]
    d4_closed: float
    max_real_eig: float


def coexistence_stability(c: DuoConfig, record: EquilibriumRecord) -> StabilityReport:
    """Stability via the leading minors of the sign-conjugated Jacobian.

    The flow is competitive: conjugating by diag(1,1,-1,-1) makes the
    off-diagonal blocks nonnegative, and stability is equivalent to the
    minors d_k alternating in sign, (-1)^k d_k > 0.  The first three always
    satisfy this; the verdict is the sign of d4.
    """
    jac = coexistence_jacobian(c, record)
    sflip = np.diag([1.0, 1.0, -1.0, -1.0])
    bar = sflip @ jac @ sflip
    minors = tuple(float(np.linalg.det(bar[: k + 1, : k + 1])) for k in range(4))
    if not (minors[0] < 0 and minors[1] > 0 and minors[2] < 0):
        raise RuntimeError(f"internal inconsistency: leading minors {minors[:3]} "
                           "violate the guaranteed sign pattern")
    d4c = d4_closed_form(c, record)
    eigs = np.linalg.eigvals(jac)
    max_re = float(np.max(eigs.real))
    if abs(minors[3]) < _MARGINAL_D4:
        verdict = "marginal"
    else:
        verdict = "stable" if minors[3] > 0 else "unstable"
    return StabilityReport(verdict=verdict, minors=minors, d4_closed=d4c, max_real_eig=max_re)


# --- classification ----------------------------------------------------------


@dataclass(frozen=True)
class GradostatVerdict:
    tag: str
    gamma0_u: float
    gamma0_v: float
    gamma_u: float | None
    gamma_v: float | None
    equilibria: tuple[EquilibriumRecord, ...]
    notes: tuple[str, ...] = ()


def classify_gradostat(c: DuoConfig, zero_band: float = ZERO_BAND_DEFAULT) -> GradostatVerdict:
    """Full decision tree for the long-time behavior of the gradostat.

    Existence of the semi-trivial equilibria from the gamma0 signs, then the
    two-species rates; a (+,-) pattern is refined into plain exclusion versus
    odd bistability by checking for a stable admissible coexistence point.
    Rates inside the zero band give an inconclusive verdict.
    """
    g0u = gamma0(c, "u")
    g0v = gamma0(c, "v")
    sig = sigma_star(c)
    notes: list[str] = []

    def done(tag, gu=None, gv=None, eqs=()):
        e0 = _record(
            c, "trivial", (sig.sigma1, sig.sigma2), (0.0, 0.0), (0.0, 0.0),
            stable=(g0u < 0 and g0v < 0),
        )
        return GradostatVerdict(tag, g0u, g0v, gu, gv, (e0, *eqs), tuple(notes))

    if abs(g0u) < zero_band or abs(g0v) < zero_band:
        notes.append("a one-species rate lies inside the zero band")
        return done("inconclusive")
    if g0u < 0 and g0v < 0:
        return done("total-extinction")
    if g0u > 0 and g0v < 0:
        eu = semi_trivial_equilibrium(c, "u")
        eu = _with_stability(eu, True)
        return done("extinction-of-v", eqs=(eu,))
    if g0v > 0 and g0u < 0:
        ev = semi_trivial_equilibrium(c, "v")
        ev = _with_stability(ev, True)
        return done("extinction-of-u", eqs=(ev,))

    eu = semi_trivial_equilibrium(c, "u")
    ev = semi_trivial_equilibrium(c, "v")
    gu = invasion_gamma(c, "u", ev)
    gv = invasion_gamma(c, "v", eu)
    eu = _with_stability(eu, gv < 0)
    ev = _with_stability(ev, gu < 0)
    if abs(gu) < zero_band or abs(gv) < zero_band:
        notes.append("a two-species rate lies inside the zero band")
        return done("inconclusive", gu, gv, (eu, ev))

    coex_records = []
    if c.lam == 0.0:
        # decoupled vessels: the curve machinery is undefined, and each vessel
        # settles independently, so no interior coexistence point is tracked
        notes.append("lam = 0: coexistence candidates not evaluated")
    for rc in coexistence_candidates(c) if c.lam > 0.0 else ():
        rec = admissible_coexistence(c, rc)
        if rec is None:
            continue
        rep = coexistence_stability(c, rec)
        if rep.verdict == "marginal":
            notes.append("marginal coexistence stability (|d4| below tolerance)")
        rec = EquilibriumRecord(
            kind=rec.kind, r=rec.r, u=rec.u, v=rec.v,
            stable=(rep.verdict == "stable"), max_real_eig=rep.max_real_eig,
            mu=rec.mu, residual=rec.residual,
        )
        coex_records.append(rec)

    eqs = (eu, ev, *coex_records)
    if gu > 0 and gv > 0:
        return done("coexistence-global", gu, gv, eqs)
    if gu < 0 and gv < 0:
        return done("exclusive-bistability", gu, gv, eqs)
    # mixed signs: one stable semi-trivial point; odd bistability when a
    # stable coexistence point coexists with it
    has_stable_coex = any(r.stable for r in coex_records)
    if has_stable_coex:
        return done("odd-bistability", gu, gv, eqs)
    if gu > 0 > gv:
        return done("extinction-of-v", gu, gv, eqs)
    return done("extinction-of-u", gu, gv, eqs)


def _with_stability(rec: EquilibriumRecord, stable: bool) -> EquilibriumRecord:
    return EquilibriumRecord(
        kind=rec.kind, r=rec.r, u=rec.u, v=rec.v, stable=stable,
        max_real_eig=rec.max_real_eig, mu=rec.mu, residual=rec.residual,
    )
