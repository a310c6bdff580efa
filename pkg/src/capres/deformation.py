"""Spectral deformation family: cutoff, vector field, map and its geometry.

The deformation maps x -> x + theta*h(|x|)*x with a smooth cutoff h that
vanishes for t < 2R and equals 1 for t > 8R, subject to

    sup_t  h(t) + t h'(t)  <=  3/2.

That bound is tight: in the log variable u = log(t/2R)/log 4 the constraint
reads H(u) + rho(u)/log 4 <= 3/2 for the transition density rho = H', whose
theoretical optimum (density proportional to 4^{-u}) attains 4/3.  The
density used here is that optimal exponential plateau entered and exited
through polynomial smoothstep ramps, which keeps every derivative of h
resolvable on the coarse grids the operators are assembled on.  Flat C-infinity
bump edges (exp(-1/u) style) were tried first and rejected: their derivative
content lives at ever smaller sub-grid scales and displaces deformed
eigenvalues by O(0.1) regardless of stencil order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import ConstraintViolation, GeometryViolation

LN4 = math.log(4.0)

#: C^5 smoothstep: s**6 * (462 - 1980 s + 3465 s^2 - 3080 s^3 + 1386 s^4 - 252 s^5);
#: first five derivatives vanish at s = 0 and s = 1.
_S5 = np.poly1d([-252.0, 1386.0, -3080.0, 3465.0, -1980.0, 462.0, 0, 0, 0, 0, 0, 0])
_S5D1 = _S5.deriv(1)
_S5D2 = _S5.deriv(2)


@dataclass(frozen=True)
class CutoffShape:
    """Shape of the transition density in the log variable u = log(t/2R)/log 4.

    The density is ramp_up(u) * ramp_down(u) * 4**(-skew*(u - u0)) on
    [u0, u1]; ramps are C^5 smoothsteps of widths ramp_lo / ramp_hi.
    """

    u0: float = 0.0
    u1: float = 1.0
    skew: float = 1.0
    ramp_lo: float = 0.20
    ramp_hi: float = 0.15

    def __post_init__(self):
        if not (0.0 <= self.u0 < self.u1 <= 1.0):
            raise ConstraintViolation(f"need 0 <= u0 < u1 <= 1, got {self.u0}, {self.u1}")
        if self.ramp_lo <= 0 or self.ramp_hi <= 0:
            raise ConstraintViolation("ramp widths must be positive")
        if self.ramp_lo + self.ramp_hi >= self.u1 - self.u0:
            raise ConstraintViolation("ramps overlap: ramp_lo + ramp_hi >= u1 - u0")
        if self.skew < 0:
            raise ConstraintViolation("skew must be >= 0")


@dataclass(frozen=True)
class DeformationProfile:
    """Exterior radius, cone angle, scaling parameter and cutoff shape.

    mode="global-dilation" replaces h by the constant 1 (a test harness with
    an exactly solvable similarity transform); it is excluded from resonance
    production runs because it violates the flat-interior requirement.
    """

    R: float = 1.5
    beta0: float = math.pi / 8
    theta: complex = 0.2j
    shape: CutoffShape = field(default_factory=CutoffShape)
    mode: str = "exterior"

    def __post_init__(self):
        if self.R <= 0:
            raise ConstraintViolation(f"R must be positive, got {self.R}")
        if not (0.0 < self.beta0 <= math.pi / 8 + 1e-15):
            raise ConstraintViolation(f"beta0 must lie in (0, pi/8], got {self.beta0}")
        t = complex(self.theta)
        if abs(t.real) + abs(t.imag) >= math.tan(self.beta0):
            raise ConstraintViolation(
                f"theta={t} outside D_beta0: |Re|+|Im| = {abs(t.real)+abs(t.imag):.6f} "
                f">= tan(beta0) = {math.tan(self.beta0):.6f}"
            )
        if abs(t) >= 2.0 / 3.0:
            # implied by the cone condition since tan(pi/8) < 2/3; kept as a guard
            raise ConstraintViolation(f"|theta|={abs(t):.6f} >= 2/3, map not injective")
        if self.mode not in ("exterior", "global-dilation"):
            raise ConstraintViolation(f"unknown mode {self.mode!r}")

    def replace(self, **kw) -> "DeformationProfile":
        from dataclasses import replace as _rep

        return _rep(self, **kw)


def a_of_theta(theta: complex) -> float:
    """Rotation angle of the exterior ray: arg(1 + theta)."""
    return float(np.angle(1.0 + complex(theta)))


class CutoffTable:
    """Dense sample table of the cutoff h with exact derivative evaluation.

    h itself is queried through a monotone cubic (PCHIP) interpolant of the
    cumulative density; h', h'', h''' come from closed-form derivatives of
    the density, so the assembled operators never differentiate the table.
    """

    def __init__(self, R: float, shape: CutoffShape, n: int = 20001, constant_one: bool = False):
        self.R = float(R)
        self.shape = shape
        self.constant_one = constant_one
        self._n = n
        if constant_one:
            self.nodes = np.array([0.0, 16.0 * R])
            self.h_values = np.ones(2)
            self.hprime_values = np.zeros(2)
            return
        ug = np.linspace(0.0, 1.0, n)
        w = self._rho_raw(ug)
        cum = np.concatenate([[0.0], np.cumsum((w[1:] + w[:-1]) * 0.5 * (ug[1] - ug[0]))])
        self._mass = cum[-1]
        self._ug = ug
        self._Hg = cum / self._mass
        self._H_interp = PchipInterpolator(ug, self._Hg)
        self.nodes = 2.0 * R * np.exp(LN4 * ug)
        self.h_values = self._Hg.copy()
        self.hprime_values = (w / self._mass) / (self.nodes * LN4)

    # -- density in the log variable and its exact derivatives --------------

    def _ramps(self, u, der=0):
        sh = self.shape
        sL = np.clip((u - sh.u0) / sh.ramp_lo, 0.0, 1.0)
        sR = np.clip((sh.u1 - u) / sh.ramp_hi, 0.0, 1.0)
        inL = (u > sh.u0) & (u < sh.u0 + sh.ramp_lo)
        inR = (u > sh.u1 - sh.ramp_hi) & (u < sh.u1)
        if der == 0:
            return _S5(sL), _S5(sR)
        if der == 1:
            return (_S5D1(sL) * inL / sh.ramp_lo, -_S5D1(sR) * inR / sh.ramp_hi)
        return (_S5D2(sL) * inL / sh.ramp_lo**2, _S5D2(sR) * inR / sh.ramp_hi**2)

    def _rho_raw(self, u):
        u = np.asarray(u, float)
        sh = self.shape
        out = np.zeros_like(u)
        m = (u > sh.u0) & (u < sh.u1)
        if np.any(m):
            rL, rR = self._ramps(u[m])
            out[m] = rL * rR * np.exp(-sh.skew * LN4 * (u[m] - sh.u0))
        return out

    def _rho_raw_d1(self, u):
        u = np.asarray(u, float)
        sh = self.shape
        out = np.zeros_like(u)
        m = (u > sh.u0) & (u < sh.u1)
        if np.any(m):
            um = u[m]
            rL, rR = self._ramps(um)
            rL1, rR1 = self._ramps(um, 1)
            c = -sh.skew * LN4
            e = np.exp(c * (um - sh.u0))
            out[m] = (rL1 * rR + rL * rR1 + c * rL * rR) * e
        return out

    def _rho_raw_d2(self, u):
        u = np.asarray(u, float)
        sh = self.shape
        out = np.zeros_like(u)
        m = (u > sh.u0) & (u < sh.u1)
        if np.any(m):
            um = u[m]
            rL, rR = self._ramps(um)
            rL1, rR1 = self._ramps(um, 1)
            rL2, rR2 = self._ramps(um, 2)
            c = -sh.skew * LN4
            e = np.exp(c * (um - sh.u0))
            out[m] = (rL2 * rR + 2 * rL1 * rR1 + rL * rR2
                      + 2 * c * (rL1 * rR + rL * rR1) + c * c * rL * rR) * e
        return out

    def _u(self, t):
        return np.log(t / (2.0 * self.R)) / LN4

    def _transition_mask(self, t):
        return (t > 2.0 * self.R) & (t < 8.0 * self.R)

    # -- public evaluation ---------------------------------------------------

    def h(self, t):
        t = np.abs(np.asarray(t, float))
        if self.constant_one:
            return np.ones_like(t)
        out = np.zeros_like(t)
        out[t >= 8.0 * self.R] = 1.0
        m = self._transition_mask(t)
        if np.any(m):
            out[m] = self._H_interp(self._u(t[m]))
        return out

    def hp(self, t):
        t = np.abs(np.asarray(t, float))
        out = np.zeros_like(t)
        if self.constant_one:
            return out
        m = self._transition_mask(t)
        if np.any(m):
            out[m] = (self._rho_raw(self._u(t[m])) / self._mass) / (t[m] * LN4)
        return out

    def hpp(self, t):
        t = np.abs(np.asarray(t, float))
        out = np.zeros_like(t)
        if self.constant_one:
            return out
        m = self._transition_mask(t)
        if np.any(m):
            u = self._u(t[m])
            rho = self._rho_raw(u) / self._mass
            rho1 = self._rho_raw_d1(u) / self._mass
            out[m] = rho1 / (t[m] ** 2 * LN4**2) - rho / (t[m] ** 2 * LN4)
        return out

    def hppp(self, t):
        t = np.abs(np.asarray(t, float))
        out = np.zeros_like(t)
        if self.constant_one:
            return out
        m = self._transition_mask(t)
        if np.any(m):
            u = self._u(t[m])
            t3 = t[m] ** 3
            rho = self._rho_raw(u) / self._mass
            rho1 = self._rho_raw_d1(u) / self._mass
            rho2 = self._rho_raw_d2(u) / self._mass
            out[m] = rho2 / (t3 * LN4**3) - 3 * rho1 / (t3 * LN4**2) + 2 * rho / (t3 * LN4)
        return out

    def sup_constraint(self, n: int | None = None) -> float:
        """max over a dense grid of h(t) + t h'(t) (must stay <= 3/2)."""
        if self.constant_one:
            return 1.0
        n = 10 * self._n if n is None else n
        u = np.linspace(0.0, 1.0, n)
        rho = self._rho_raw(u) / self._mass
        h = self._H_interp(u)
        return float(np.max(h + rho / LN4))


@lru_cache(maxsize=32)
def _cached_table(profile: DeformationProfile, n: int) -> CutoffTable:
    table = CutoffTable(profile.R, profile.shape, n=n,
                        constant_one=(profile.mode == "global-dilation"))
    sup = table.sup_constraint()
    if sup > 1.5:
        raise ConstraintViolation(
            f"constructed cutoff violates sup(h + t h') <= 3/2: got {sup:.6f}; "
            "adjust shape parameters"
        )
    return table


def build_cutoff(profile: DeformationProfile, n: int = 20001) -> CutoffTable:
    """Construct (and verify) the cutoff table for a profile.

    Raises ConstraintViolation when the numerically evaluated
    sup(h + t h') exceeds 3/2 on a grid 10x finer than the construction grid.
    """
    return _cached_table(profile, n)


def phi(profile: DeformationProfile, x):
    """Deformation map and its x-derivative: (phi_theta(x), phi_theta'(x))."""
    p, d1, _, _ = phi_derivatives(profile, x)
    return p, d1


def phi_derivatives(profile: DeformationProfile, x):
    """phi and its first three x-derivatives (the assembly needs all of them)."""
    table = build_cutoff(profile)
    x = np.asarray(x, float)
    ax = np.abs(x)
    s = np.sign(x)
    th = complex(profile.theta)
    if profile.mode == "global-dilation":
        one = np.ones_like(ax)
        zero = np.zeros_like(ax)
        return (1.0 + th) * x, (1.0 + th) * one, zero * 1j, zero * 1j
    h = table.h(ax)
    hp = table.hp(ax)
    hpp = table.hpp(ax)
    hppp = table.hppp(ax)
    p = x * (1.0 + th * h)
    d1 = 1.0 + th * (h + ax * hp)
    d2 = th * s * (2.0 * hp + ax * hpp)
    d3 = th * (3.0 * hpp + ax * hppp)
    return p, d1, d2, d3


def jacobian(profile: DeformationProfile, x):
    """1-D Jacobian of the deformation: J_theta(x) = phi_theta'(x)."""
    _, d1, _, _ = phi_derivatives(profile, x)
    return d1


@dataclass
class GeometryReport:
    """Outcome of the sampled geometry checks; margins are worst-case."""

    identity_inside: bool
    ray_outside: bool
    cone_containment: bool
    real_part_clearance: bool
    worst_ray_angle_error: float
    worst_cone_margin: float
    worst_clearance: float

    @property
    def passed(self) -> bool:
        return (self.identity_inside and self.ray_outside
                and self.cone_containment and self.real_part_clearance)


def validate_geometry(profile: DeformationProfile, samples=None) -> GeometryReport:
    """Check the sampled contour geometry; raises GeometryViolation on failure.

    Clauses: (i) phi(x) = x for |x| < 2R, (ii) phi on the ray of angle
    a(theta) for |x| > 8R, (iii) |Im phi| < tan(beta0)|Re phi| wherever
    Im phi != 0, (iv) |Re phi| > R for |x| >= 2R.
    """
    R = profile.R
    if samples is None:
        samples = np.concatenate([
            np.linspace(-16 * R, 16 * R, 4001),
            np.linspace(-1.999 * R, 1.999 * R, 501),
        ])
    x = np.asarray(samples, float)
    x = x[x != 0.0]
    p, d1, _, _ = phi_derivatives(profile, x)
    a = a_of_theta(profile.theta)
    tanb = math.tan(profile.beta0)

    inner = np.abs(x) < 2 * R
    if profile.mode == "exterior" and np.any(inner):
        dev = np.abs(p[inner] - x[inner])
        if dev.max() > 0.0:
            bad = x[inner][int(np.argmax(dev))]
            raise GeometryViolation("identity-inside", bad, f"|phi - x| = {dev.max():.3e}")

    outer = np.abs(x) > 8 * R
    worst_ray = 0.0
    if np.any(outer):
        # phi(x)*sign(x) must sit on the ray of angle a(theta)
        ang = np.angle(p[outer] * np.sign(x[outer]))
        worst_ray = float(np.max(np.abs(ang - a)))
        if worst_ray > 1e-12:
            bad = x[outer][int(np.argmax(np.abs(ang - a)))]
            raise GeometryViolation("ray-outside", bad, f"angle error {worst_ray:.3e}")

    im = np.abs(p.imag)
    re = np.abs(p.real)
    nz = im > 0
    worst_cone = float("inf")
    if np.any(nz):
        margin = tanb * re[nz] - im[nz]
        worst_cone = float(margin.min())
        if worst_cone <= 0:
            bad = x[nz][int(np.argmin(margin))]
            raise GeometryViolation("cone-containment", bad, f"margin {worst_cone:.3e}")

    far = np.abs(x) >= 2 * R
    worst_clear = float("inf")
    if np.any(far):
        clear = re[far] - R
        worst_clear = float(clear.min())
        if worst_clear <= 0:
            bad = x[far][int(np.argmin(clear))]
            raise GeometryViolation("real-part-clearance", bad, f"|Re phi| - R = {worst_clear:.3e}")

    return GeometryReport(
        identity_inside=True,
        ray_outside=True,
        cone_containment=True,
        real_part_clearance=True,
        worst_ray_angle_error=worst_ray,
        worst_cone_margin=worst_cone,
        worst_clearance=worst_clear,
    )


def smoothstep(s):
    """The shared C^5 smoothstep on [0, 1] (used by the chi cutoff too)."""
    return _S5(np.clip(np.asarray(s, float), 0.0, 1.0))
