"""Finite-difference matrices for H, H(theta), H_eps(theta) and the chi-split variant.

Uniform interior grid with Dirichlet walls at +-L.  Stencil values that fall
beyond a wall are eliminated by odd reflection (f(wall) = 0, f(wall - s) =
-f(wall + s)), which keeps D2 symmetric and makes the discrete Dirichlet box
spectrum converge at the full stencil order.

The deformed kinetic operator is assembled in the symmetric product form

    p_theta^2 = -(1/phi') d^2/dx^2 (1/phi') + w,
    w = (3/4) (phi''/phi'^2)^2 - (1/2) phi'''/phi'^3,

which is algebraically identical to the square of the conjugated first-order
operator (1/i)((1/phi') d/dx - phi''/(2 phi'^2)) but is exactly complex
symmetric away from the wall rows and, unlike the literal discrete square,
has no spurious kernel at the grid's sawtooth wavenumber (every centered D1
annihilates the sawtooth mode, so squared-D1 assemblies grow a fake
small-|z| eigenvalue branch at (5/3) sqrt(eps) e^{-i pi/4} (2k+1)).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .deformation import DeformationProfile, phi_derivatives
from .errors import ConstraintViolation, DomainViolation
from .potentials import ChiCutoff, PotentialSpec, eval_complex

TAGS = ("H", "Htheta", "Heps", "HepsTheta", "HepsThetaMinusChiV")

_STENCILS_D1 = {
    2: np.array([-1.0, 0.0, 1.0]) / 2.0,
    4: np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0,
    6: np.array([-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0]) / 60.0,
}
_STENCILS_D2 = {
    2: np.array([1.0, -2.0, 1.0]),
    4: np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0,
    6: np.array([2.0, -27.0, 270.0, -490.0, 270.0, -27.0, 2.0]) / 180.0,
}


@dataclass(frozen=True)
class Grid1D:
    """Uniform interior-node grid on (-L, L) with Dirichlet ends."""

    L: float
    N: int

    def __post_init__(self):
        if self.N < 16:
            raise ConstraintViolation(f"N must be >= 16, got {self.N}")
        if self.L <= 0:
            raise ConstraintViolation("L must be positive")

    @property
    def spacing(self) -> float:
        return 2.0 * self.L / (self.N + 1)

    @cached_property
    def nodes(self) -> np.ndarray:
        return -self.L + self.spacing * np.arange(1, self.N + 1)

    def check_domain(self, profile: DeformationProfile, eps_min: float = 0.0):
        """Enforce the sizing rules: L >= 12R and, for CAP runs, L >= 6 eps^-1/4."""
        need = 12.0 * profile.R
        if self.L < need - 1e-12:
            raise DomainViolation(f"L={self.L} < 12R = {need} (ray region truncated)")
        if eps_min > 0:
            cap = 6.0 * eps_min ** (-0.25)
            if self.L < cap - 1e-12:
                raise DomainViolation(
                    f"L={self.L} < 6*eps^(-1/4) = {cap:.2f} for eps={eps_min}"
                )


def auto_length(profile: DeformationProfile, potential: PotentialSpec,
                eps_min: float = 0.0) -> float:
    """Default domain half-length: max(12R, 6 eps_min^-1/4, feature + 10)."""
    L = max(12.0 * profile.R, potential.feature_radius() + 10.0)
    if eps_min > 0:
        L = max(L, 6.0 * eps_min ** (-0.25))
    return float(np.ceil(L))


def derivative_matrices(grid: Grid1D, order: int = 4):
    """Centered D1, D2 of the requested order with odd-reflection Dirichlet ends."""
    if order not in _STENCILS_D1:
        raise ConstraintViolation(f"unsupported order {order}; choose 2, 4 or 6")
    N, dx = grid.N, grid.spacing
    c1 = _STENCILS_D1[order] / dx
    c2 = _STENCILS_D2[order] / dx**2
    half = len(c1) // 2
    D1 = np.zeros((N, N))
    D2 = np.zeros((N, N))
    for j in range(N):
        for s, off in enumerate(range(-half, half + 1)):
            k = j + off
            if 0 <= k < N:
                D1[j, k] += c1[s]
                D2[j, k] += c2[s]
            elif k < -1:
                kr = -k - 2  # odd reflection about the left wall node
                if kr < N:
                    D1[j, kr] -= c1[s]
                    D2[j, kr] -= c2[s]
            elif k > N:
                kr = 2 * N - k  # odd reflection about the right wall node
                if kr >= 0:
                    D1[j, kr] -= c1[s]
                    D2[j, kr] -= c2[s]
            # k == -1 or k == N is the wall itself: value 0
    return D1, D2


@dataclass
class OperatorMatrix:
    """Dense complex matrix plus the provenance needed to interpret its spectrum."""

    entries: np.ndarray
    grid: Grid1D
    tag: str
    profile: DeformationProfile | None = None
    potential: PotentialSpec | None = None
    eps: float = 0.0
    chi: ChiCutoff | None = None
    order: int = 4
    extras: dict = field(default_factory=dict)

    @property
    def theta(self) -> complex:
        return complex(self.profile.theta) if self.profile is not None else 0.0 + 0j

    @property
    def N(self) -> int:
        return self.grid.N

    def norm1(self) -> float:
        return float(np.max(np.sum(np.abs(self.entries), axis=0)))


def deformed_kinetic(grid: Grid1D, profile: DeformationProfile, order: int = 4,
                     form: str = "symmetric") -> np.ndarray:
    """Discrete p_theta^2.

    form="symmetric" (production) uses the symmetric product expansion above;
    form="squared" builds the literal square of the discrete first-order
    conjugated operator and exists to cross-validate the expansion (it is
    4th-order equivalent on smooth modes but carries the sawtooth artifact).
    """
    D1, D2 = derivative_matrices(grid, order)
    _, d1, d2, d3 = phi_derivatives(profile, grid.nodes)
    if form == "squared":
        A = (1.0 / d1)[:, None] * D1.astype(complex) - np.diag(d2 / (2.0 * d1**2))
        return -(A @ A)
    if form != "symmetric":
        raise ConstraintViolation(f"unknown kinetic form {form!r}")
    a = 1.0 / d1
    w = 0.75 * (d2 / d1**2) ** 2 - 0.5 * d3 / d1**3
    P = -(a[:, None] * D2 * a[None, :]).astype(complex)
    P[np.diag_indices_from(P)] += w
    return P


def assemble(tag: str, grid: Grid1D, profile: DeformationProfile,
             potential: PotentialSpec, eps: float = 0.0,
             chi: ChiCutoff | None = None, order: int = 4) -> OperatorMatrix:
    """Build the requested operator matrix on the grid.

    Tags: H = -D2 + V; Htheta = p_theta^2 + V(phi); Heps = H - i eps x^2;
    HepsTheta = p_theta^2 - i eps phi^2 + V(phi); HepsThetaMinusChiV
    subtracts the multiplication by chi(x) V(phi(x)) (the chi-split operator).
    """
    if tag not in TAGS:
        raise ConstraintViolation(f"unknown operator tag {tag!r}")
    x = grid.nodes
    if tag in ("H", "Heps"):
        _, D2 = derivative_matrices(grid, order)
        A = (-D2).astype(complex)
        A[np.diag_indices_from(A)] += eval_complex(potential, x)
        if tag == "Heps":
            if eps <= 0:
                raise ConstraintViolation("Heps requires eps > 0")
            A[np.diag_indices_from(A)] += -1j * eps * x**2
        else:
            eps = 0.0
    else:
        p, _, _, _ = phi_derivatives(profile, x)
        A = deformed_kinetic(grid, profile, order)
        V = eval_complex(potential, p, profile=profile)
        if tag == "Htheta":
            eps = 0.0
            A[np.diag_indices_from(A)] += V
        else:
            if eps <= 0 and tag == "HepsTheta":
                raise ConstraintViolation("HepsTheta requires eps > 0")
            A[np.diag_indices_from(A)] += -1j * eps * p**2 + V
            if tag == "HepsThetaMinusChiV":
                if chi is None:
                    raise ConstraintViolation("HepsThetaMinusChiV requires chi")
                A[np.diag_indices_from(A)] -= chi(x) * V
    return OperatorMatrix(entries=A, grid=grid, tag=tag, profile=profile,
                          potential=potential, eps=eps, chi=chi, order=order)


def chiV_diagonal(grid: Grid1D, profile: DeformationProfile,
                  potential: PotentialSpec, chi: ChiCutoff) -> np.ndarray:
    """The diagonal chi(x) V(phi_theta(x)) used by the split multiplicity formula."""
    p, _, _, _ = phi_derivatives(profile, grid.nodes)
    return chi(grid.nodes) * eval_complex(potential, p, profile=profile)
