"""Local projective nonlinear gauge transformations N₍Λ,γ₎.

The pointwise map

    N₍Λ,γ₎(ψ) = |ψ| · e^{i(γ ln|ψ| + Λ θ)},    θ = unwrapped arg ψ,

depends on two real parameters and leaves |ψ|² invariant.  Elements
compose by the affine group law (Λ₁, γ₁)∘(Λ₂, γ₂) = (Λ₁Λ₂, Λ₁γ₂ + γ₁),
act on the family coefficients so that a transformed solution solves the
transformed equation, scale currents as J′ = ΛJ + (γ/2)∇ρ, and stretch
the pointwise symplectic structure by the factor Λ.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFamily, NodalState, ZeroPoint
from .fields import SPECTRAL, ScalarField, VectorField, Wavefunction, grad_array, phase

ZERO_FLOOR_REL = 1e-12


@dataclass(frozen=True)
class GaugeElement:
    """Group element (Λ, γ); Λ ≠ 0 so the element is invertible."""

    lam: float
    gamma: float

    def __post_init__(self):
        if not (np.isfinite(self.lam) and np.isfinite(self.gamma)):
            raise ValueError("gauge parameters must be finite")
        if self.lam == 0.0:
            raise ValueError("gauge element needs Λ ≠ 0")


IDENTITY = GaugeElement(1.0, 0.0)


@dataclass(frozen=True)
class SymplecticProbe:
    """Pointwise Jacobian determinant of N as a map of (Re ψ, Im ψ)."""

    point_value: complex
    jacobian_det: float


def apply(g: GaugeElement, psi: Wavefunction) -> Wavefunction:
    """Pointwise ψ′ = |ψ|·e^{i(γ ln|ψ| + Λθ)} with θ the unwrapped phase.

    Needs a nodeless 1D state (the unwrapped phase does); the density of
    the result equals that of ψ up to roundoff.
    """
    theta = phase(psi).values
    r = np.abs(psi.values)
    return Wavefunction(psi.grid, r * np.exp(1j * (g.gamma * np.log(r) + g.lam * theta)))


def compose(g1: GaugeElement, g2: GaugeElement) -> GaugeElement:
    """Affine group law (Λ₁Λ₂, Λ₁γ₂ + γ₁); apply(compose(g1,g2)) = apply(g1)∘apply(g2)."""
    return GaugeElement(g1.lam * g2.lam, g1.lam * g2.gamma + g1.gamma)


def inverse(g: GaugeElement) -> GaugeElement:
    """The element h with compose(g, h) = compose(h, g) = (1, 0)."""
    return GaugeElement(1.0 / g.lam, -g.gamma / g.lam)


def act_on_params(g: GaugeElement, p):
    """Parameter action: if ψ solves the family equation with coefficients p,
    then apply(g, ψ) solves it with the primed coefficients returned here.

    This is a left action: act(g1, act(g2, p)) = act(compose(g1, g2), p).
    """
    from .family import FamilyParams  # deferred: family imports this module

    if p.nu1 == 0.0:
        raise DegenerateFamily("parameter action needs ν₁ ≠ 0")
    lam, gam = g.lam, g.gamma
    return FamilyParams(
        nu1=p.nu1 / lam,
        nu2=-(gam / (2.0 * lam)) * p.nu1 + p.nu2,
        mu1=-(gam / lam) * p.nu1 + p.mu1,
        mu2=(gam ** 2 / (2.0 * lam)) * p.nu1 - gam * p.nu2 - (gam / 2.0) * p.mu1 + lam * p.mu2,
        mu3=p.mu3 / lam,
        mu4=-(gam / lam) * p.mu3 + p.mu4,
        mu5=(gam ** 2 / (4.0 * lam)) * p.mu3 - (gam / 2.0) * p.mu4 + lam * p.mu5,
        mu0=lam * p.mu0,
    )


def transform_current(g: GaugeElement, rho: ScalarField, J: VectorField, method=SPECTRAL) -> VectorField:
    """J′ = Λ·J + (γ/2)·∇ρ, the current of the transformed state."""
    if rho.grid != J.grid:
        raise ValueError("density and current live on different grids")
    floor = ZERO_FLOOR_REL * float(np.max(rho.values))
    if float(np.min(rho.values)) <= floor:
        raise NodalState("current transformation needs ρ above the zero floor")
    grad_rho = grad_array(rho.values, rho.grid, method)
    return VectorField(J.grid, g.lam * J.values + 0.5 * g.gamma * grad_rho)


def _pointwise(g: GaugeElement, w: complex, base_arg: float, z: complex) -> complex:
    # Continuous phase branch near z: arg w = arg z + angle(w/z).  Any
    # continuous branch gives the same Jacobian; this one never crosses
    # the principal cut for |w − z| ≪ |z|.
    r = abs(w)
    theta = base_arg + cmath.phase(w / z)
    return r * cmath.exp(1j * (g.gamma * cmath.log(r).real + g.lam * theta))


def symplectic_factor(g: GaugeElement, z: complex) -> SymplecticProbe:
    """Central-difference Jacobian determinant of (Re ψ, Im ψ) ↦ N(ψ) at ψ = z.

    The determinant approximates Λ, the factor by which N scales the
    symplectic form; step h = 1e−6·|z|.
    """
    z = complex(z)
    if z == 0:
        raise ZeroPoint("symplectic probe is singular at ψ = 0")
    h = 1e-6 * abs(z)
    base = cmath.phase(z)

    def f(w):
        return _pointwise(g, w, base, z)

    fxp, fxm = f(z + h), f(z - h)
    fyp, fym = f(z + 1j * h), f(z - 1j * h)
    du_dx = (fxp.real - fxm.real) / (2.0 * h)
    dv_dx = (fxp.imag - fxm.imag) / (2.0 * h)
    du_dy = (fyp.real - fym.real) / (2.0 * h)
    dv_dy = (fyp.imag - fym.imag) / (2.0 * h)
    det = du_dx * dv_dy - du_dy * dv_dx
    return SymplecticProbe(point_value=z, jacobian_det=det)
