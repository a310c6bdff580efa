"""Closed-form potential library with complex-cone evaluation and the chi cutoff."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .deformation import DeformationProfile, phi_derivatives, smoothstep
from .errors import DomainViolation

KINDS = ("free", "square_well", "gaussian_bump", "poschl_teller")


@dataclass(frozen=True)
class PotentialSpec:
    """A closed-form potential with analyticity metadata.

    V0 is the strength (sign included: negative = well, positive = barrier);
    width is the half-width `a` for the square well and sigma for the
    Gaussian bump, unused otherwise.
    """

    kind: str
    V0: float = 0.0
    width: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainViolation(f"unknown potential kind {self.kind!r}")
        if self.kind in ("square_well", "gaussian_bump") and self.width <= 0:
            raise DomainViolation("width must be positive")

    @classmethod
    def free(cls):
        return cls("free")

    @classmethod
    def square_well(cls, V0, a):
        return cls("square_well", V0=V0, width=a)

    @classmethod
    def gaussian_bump(cls, V0, sigma):
        return cls("gaussian_bump", V0=V0, width=sigma)

    @classmethod
    def poschl_teller(cls, V0):
        return cls("poschl_teller", V0=V0)

    def singularities(self):
        """Poles of the analytic continuation (empty for entire/compact kinds)."""
        if self.kind == "poschl_teller":
            # sech^2 has double poles at i(pi/2 + k pi); the nearest dominate
            return np.array([1j * math.pi / 2, -1j * math.pi / 2,
                             3j * math.pi / 2, -3j * math.pi / 2])
        return np.array([], dtype=complex)

    def pole_clearance(self, R: float | None = None, beta0: float | None = None) -> float:
        """Distance from closure(R^1 union cone) to the nearest singularity.

        Infinite for entire or compactly supported kinds.  With R, beta0
        given, the (possibly closer) truncated-cone corner is included.
        """
        poles = self.singularities()
        if poles.size == 0:
            return math.inf
        dist = float(np.min(np.abs(poles.imag)))  # distance to the real line
        if R is not None and beta0 is not None:
            corner = complex(R, math.tan(beta0) * R)
            for p in poles:
                for c in (corner, np.conj(corner), -corner, -np.conj(corner)):
                    dist = min(dist, abs(p - c))
        return dist

    def feature_radius(self) -> float:
        """Radius beyond which |V| is negligible (used for domain sizing)."""
        if self.kind == "free":
            return 0.0
        if self.kind == "square_well":
            return self.width
        if self.kind == "gaussian_bump":
            return 5.0 * self.width
        return 8.0  # sech^2 below 2e-7 of V0


def _sech2(z):
    # overflow-safe sech^2 for complex argument: sech z = 2 e^{-|Re z|-...}/(1+e^{-2z'})
    z = np.asarray(z, dtype=complex)
    zp = np.where(z.real >= 0, z, -z)  # sech is even
    e = np.exp(-zp)
    s = 2.0 * e / (1.0 + e * e)
    return s * s


def _in_cone_or_real(z, R, beta0):
    z = np.asarray(z, dtype=complex)
    on_real = z.imag == 0.0
    in_cone = (np.abs(z.imag) < math.tan(beta0) * np.abs(z.real)) & (np.abs(z.real) > R)
    return on_real | in_cone


def eval_complex(spec: PotentialSpec, z, profile: DeformationProfile | None = None):
    """Analytic continuation value V(z).

    With a profile supplied, z is required to lie in R^1 union the truncated
    cone C^R_beta0, and for kinds with poles a clearance/2 margin from every
    singularity is enforced.  Raises DomainViolation otherwise.
    """
    z = np.asarray(z, dtype=complex)
    if profile is not None:
        ok = _in_cone_or_real(z, profile.R, profile.beta0)
        if not np.all(ok):
            bad = z.reshape(-1)[~ok.reshape(-1)][0]
            raise DomainViolation(f"z={bad} outside R^1 union C^R_beta0")
    poles = spec.singularities()
    if poles.size:
        clearance = spec.pole_clearance(
            profile.R if profile else None, profile.beta0 if profile else None
        )
        d = np.min(np.abs(z.reshape(-1, 1) - poles.reshape(1, -1)), axis=1)
        if np.any(d < clearance / 2):
            bad = z.reshape(-1)[int(np.argmin(d))]
            raise DomainViolation(
                f"z={bad} within pole_clearance/2 = {clearance / 2:.4f} of a singularity"
            )

    if spec.kind == "free":
        return np.zeros_like(z)
    if spec.kind == "square_well":
        # compactly supported: the exterior extension is identically zero
        return np.where(np.abs(z.real) <= spec.width, spec.V0 + 0j, 0j)
    if spec.kind == "gaussian_bump":
        return spec.V0 * np.exp(-((z / spec.width) ** 2))
    return spec.V0 * _sech2(z)


def eval_on_contour(spec: PotentialSpec, profile: DeformationProfile, x):
    """V(phi_theta(x)) on the deformed contour (the assembly entry point)."""
    p, _, _, _ = phi_derivatives(profile, x)
    return eval_complex(spec, p, profile=profile)


def decay_profile(spec: PotentialSpec, profile: DeformationProfile, radii, n_angle: int = 33):
    """sup |V| over cone boundary and interior samples at each radius.

    radii must be increasing; the result must decay to 0 along the cone for
    admissible potentials.
    """
    radii = np.asarray(radii, float)
    if np.any(np.diff(radii) <= 0):
        raise DomainViolation("radii must be strictly increasing")
    angles = np.linspace(-profile.beta0 * 0.999, profile.beta0 * 0.999, n_angle)
    sups = []
    for r in radii:
        zs = r * np.exp(1j * angles)
        zs = zs[_in_cone_or_real(zs, profile.R, profile.beta0)]
        vals = np.abs(eval_complex(spec, zs, profile=profile)) if zs.size else np.array([0.0])
        sups.append(float(vals.max()))
    return sups


@dataclass
class ChiCutoff:
    """Compactly supported cutoff: 1 on [-T, T], 0 outside [-T-width, T+width]."""

    T: float
    width: float
    nodes: np.ndarray
    values: np.ndarray

    def __call__(self, x):
        ax = np.abs(np.asarray(x, float))
        return smoothstep((self.T + self.width - ax) / self.width)


def build_chi(grid, T: float, width: float) -> ChiCutoff:
    """Smooth chi on the grid; support must fit inside the domain."""
    if T <= 0 or width <= 0:
        raise DomainViolation("T and width must be positive")
    if T + width >= grid.L:
        raise DomainViolation(f"chi support [-{T + width}, {T + width}] exceeds grid (L={grid.L})")
    chi = ChiCutoff(T=T, width=width, nodes=grid.nodes, values=np.empty(0))
    chi.values = chi(grid.nodes)
    return chi


def choose_chi(grid, spec: PotentialSpec, profile: DeformationProfile, resolvent_sup: float,
               width: float = 3.0, T_start: float | None = None, growth: float = 1.5):
    """Grow T until sup|R| * sup_{|x|>=T}|(1-chi)V(phi(x))| < 1/2.

    resolvent_sup is a numerically probed bound for ||R_{eps,theta}(z)|| over
    the contour/region of interest; the returned chi makes the Neumann-series
    inversion of the split operator certified rather than assumed.
    """
    x = grid.nodes
    v = np.abs(eval_on_contour(spec, profile, x))
    T = T_start if T_start is not None else max(spec.feature_radius(), 2 * profile.R)
    while T + width < grid.L:
        tail = v[np.abs(x) >= T]
        tail_sup = float(tail.max()) if tail.size else 0.0
        if resolvent_sup * tail_sup < 0.5:
            return build_chi(grid, T, width)
        T *= growth
    raise DomainViolation(
        "could not satisfy the split-inversion condition inside the grid; "
        "increase L or reduce the probed resolvent bound"
    )
