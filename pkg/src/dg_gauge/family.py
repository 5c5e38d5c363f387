"""Parameter space of the nonlinear family, its invariants and leaf structure.

The general equation

    i∂ₜψ = i(ν₁R₁ + ν₂R₂)ψ + (μ₁R₁ + μ₂R₂ + μ₃R₃ + μ₄R₄ + μ₅R₅)ψ + μ₀Vψ

carries eight real coefficients.  The physical parameterization (ħ, m,
diffusion D, and model constants D′c₁..D′c₅) embeds into it, the gauge
group acts on it, and six combinations ι₀..ι₅ of the coefficients are
invariant under that action.  Leaves (orbits) are classified by the
invariants; the leaf through the linear Schrödinger equation is singled
out by ι₂ = ι₃ = ι₄ = ι₅ = 0 with ι₁ > 0, and members of it can be
mapped onto the linear equation by an explicit gauge element with an
emergent constant ħ′ = √(8m²ι₁).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFamily, NotLinearizable
from .gauge import IDENTITY, GaugeElement, act_on_params

ALREADY_LINEAR = "already_linear"
LINEARIZABLE = "linearizable"
NOT_LINEARIZABLE = "not_linearizable"


@dataclass(frozen=True)
class FamilyParams:
    """Coefficients (ν₁, ν₂, μ₁..μ₅, μ₀) of the general family equation.

    ν₁, ν₂ multiply the imaginary terms iR₁, iR₂; μ₁..μ₅ the real R_j
    terms; μ₀ couples the external potential.  ν₁ ≠ 0 is required by
    every operation that forms quotients by it, enforced per operation.
    """

    nu1: float
    nu2: float
    mu1: float
    mu2: float
    mu3: float
    mu4: float
    mu5: float
    mu0: float

    def __post_init__(self):
        vals = (self.nu1, self.nu2, self.mu1, self.mu2, self.mu3, self.mu4, self.mu5, self.mu0)
        if not all(np.isfinite(v) for v in vals):
            raise ValueError("family coefficients must be finite")

    def as_array(self) -> np.ndarray:
        """Coefficients as (ν₁, ν₂, μ₁, μ₂, μ₃, μ₄, μ₅, μ₀)."""
        return np.array([self.nu1, self.nu2, self.mu1, self.mu2,
                         self.mu3, self.mu4, self.mu5, self.mu0])


@dataclass(frozen=True)
class DGParams:
    """Physical parameters: ħ > 0, mass m > 0, diffusion D, and D′, c₁..c₅."""

    hbar: float
    mass: float
    D: float
    Dprime: float
    c1: float
    c2: float
    c3: float
    c4: float
    c5: float

    def __post_init__(self):
        if not self.hbar > 0:
            raise ValueError("hbar must be positive")
        if not self.mass > 0:
            raise ValueError("mass must be positive")


@dataclass(frozen=True)
class InvariantTuple:
    """Gauge invariants ι₁..ι₅, plus ι₀ when a potential is present.

    ι₀ is None when V ≡ 0: μ₀ is then irrelevant and ι₀ indeterminate.
    """

    iota1: float
    iota2: float
    iota3: float
    iota4: float
    iota5: float
    iota0: float | None = None

    def as_array(self) -> np.ndarray:
        """ι₁..ι₅ as an array (ι₀ handled separately by callers)."""
        return np.array([self.iota1, self.iota2, self.iota3, self.iota4, self.iota5])


@dataclass(frozen=True)
class LinearizationResult:
    """Outcome of the leaf classification.

    verdict is one of "already_linear", "linearizable", "not_linearizable".
    For the two linear verdicts, gauge holds the mapping element (the
    identity when already linear) with the positive-Λ sign convention;
    mass_out = −1/(2ι₀) when ι₀ is present and negative, in which case
    hbar_prime = √(8·mass²·ι₁).  hbar_over_mass = −2ν₁′ is always
    reported (it is negative when ν₁ > 0, recording the sign situation).
    For "not_linearizable", obstruction names the first failing invariant.
    """

    verdict: str
    gauge: GaugeElement | None = None
    hbar_prime: float | None = None
    mass_out: float | None = None
    hbar_over_mass: float | None = None
    obstruction: str | None = None


def from_dg(dg: DGParams) -> FamilyParams:
    """Embed the physical parameterization into the eight family coefficients."""
    h_2m = dg.hbar / (2.0 * dg.mass)
    return FamilyParams(
        nu1=-h_2m,
        nu2=dg.D / 2.0,
        mu1=dg.Dprime * dg.c1,
        mu2=-h_2m / 2.0 + dg.Dprime * dg.c2,
        mu3=h_2m + dg.Dprime * dg.c3,
        mu4=dg.Dprime * dg.c4,
        mu5=h_2m / 4.0 + dg.Dprime * dg.c5,
        mu0=1.0 / dg.hbar,
    )


def linear_se(hbar: float, mass: float) -> FamilyParams:
    """Coefficients of the linear Schrödinger equation with constants ħ, m."""
    if not (hbar > 0 and mass > 0):
        raise ValueError("linear_se needs hbar > 0 and mass > 0")
    h_2m = hbar / (2.0 * mass)
    return FamilyParams(nu1=-h_2m, nu2=0.0, mu1=0.0, mu2=-h_2m / 2.0,
                        mu3=h_2m, mu4=0.0, mu5=h_2m / 4.0, mu0=1.0 / hbar)


def ehrenfest(hbar: float, mass: float, D: float, Dprime_c2: float) -> FamilyParams:
    """The subfamily compatible with Ehrenfest's relations.

    Only the products D and D′c₂ survive as free parameters:
    ν₂ = D/2, μ₁ = D, μ₄ = −D, and D′c₂ shifts μ₂ up and μ₅ down by half.
    """
    if not (hbar > 0 and mass > 0):
        raise ValueError("ehrenfest needs hbar > 0 and mass > 0")
    h_2m = hbar / (2.0 * mass)
    return FamilyParams(
        nu1=-h_2m,
        nu2=D / 2.0,
        mu1=D,
        mu2=-h_2m / 2.0 + Dprime_c2,
        mu3=h_2m,
        mu4=-D,
        mu5=h_2m / 4.0 - Dprime_c2 / 2.0,
        mu0=1.0 / hbar,
    )


def galilei(hbar, mass, D, Dprime, c1, c2, c5) -> FamilyParams:
    """The Galilei-invariant subfamily: c₃ = 0 and c₄ = −c₁."""
    return from_dg(DGParams(hbar=hbar, mass=mass, D=D, Dprime=Dprime,
                            c1=c1, c2=c2, c3=0.0, c4=-c1, c5=c5))


def invariants(p: FamilyParams, has_potential: bool = True) -> InvariantTuple:
    """The gauge invariants of a family member.

    ι₁ = ν₁μ₂ − ν₂μ₁;  ι₂ = μ₁ − 2ν₂;  ι₃ = 1 + μ₃/ν₁;
    ι₄ = μ₄ − μ₁μ₃/ν₁;  ι₅ = ν₁(μ₂+2μ₅) − ν₂(μ₁+2μ₄) + 2ν₂²μ₃/ν₁;
    ι₀ = ν₁μ₀, marked absent (None) when the potential is identically zero.
    """
    if p.nu1 == 0.0:
        raise DegenerateFamily("invariants need ν₁ ≠ 0")
    iota1 = p.nu1 * p.mu2 - p.nu2 * p.mu1
    iota2 = p.mu1 - 2.0 * p.nu2
    iota3 = 1.0 + p.mu3 / p.nu1
    iota4 = p.mu4 - p.mu1 * p.mu3 / p.nu1
    iota5 = (p.nu1 * (p.mu2 + 2.0 * p.mu5)
             - p.nu2 * (p.mu1 + 2.0 * p.mu4)
             + 2.0 * p.nu2 ** 2 * p.mu3 / p.nu1)
    iota0 = p.nu1 * p.mu0 if has_potential else None
    return InvariantTuple(iota1=iota1, iota2=iota2, iota3=iota3,
                          iota4=iota4, iota5=iota5, iota0=iota0)


def reconstruct(iota: InvariantTuple, nu1: float, mu1: float) -> FamilyParams:
    """Rebuild the unique family member with given invariants and (ν₁, μ₁).

    (ν₁, μ₁) coordinatize the gauge orbit, so this inverts ``invariants``:
    invariants(reconstruct(iota, ν₁, μ₁)) = iota, and
    reconstruct(invariants(p), p.ν₁, p.μ₁) = p.  With iota.iota0 absent
    the result is potential-free (μ₀ = 0).
    """
    if nu1 == 0.0:
        raise DegenerateFamily("reconstruction needs ν₁ ≠ 0")
    i1, i2, i3, i4, i5 = iota.iota1, iota.iota2, iota.iota3, iota.iota4, iota.iota5
    nu2 = (mu1 - i2) / 2.0
    mu2 = (2.0 * i1 - i2 * mu1 + mu1 ** 2) / (2.0 * nu1)
    mu3 = (i3 - 1.0) * nu1
    mu4 = i4 - mu1 + i3 * mu1
    mu5 = (i5 - i1 + i4 * (mu1 - i2) + 0.5 * (mu1 ** 2 - i2 ** 2) * (i3 - 1.0)) / (2.0 * nu1)
    mu0 = iota.iota0 / nu1 if iota.iota0 is not None else 0.0
    return FamilyParams(nu1=nu1, nu2=nu2, mu1=mu1, mu2=mu2,
                        mu3=mu3, mu4=mu4, mu5=mu5, mu0=mu0)


def same_leaf(p: FamilyParams, q: FamilyParams, tol: float = 1e-8,
              has_potential: bool = True) -> bool:
    """True iff p and q lie on the same gauge orbit (invariants agree).

    Componentwise comparison is relative with an absolute floor of tol;
    ι₀ takes part only when a potential is present.
    """
    a = invariants(p, has_potential)
    b = invariants(q, has_potential)
    if not np.all(np.isclose(a.as_array(), b.as_array(), rtol=tol, atol=tol)):
        return False
    if a.iota0 is not None and b.iota0 is not None:
        return bool(np.isclose(a.iota0, b.iota0, rtol=tol, atol=tol))
    return True


_LINEAR_PATTERN_OBSTRUCTIONS = ("iota2", "iota3", "iota4", "iota5")


def _matches_linear_pattern(p: FamilyParams, atol: float) -> bool:
    return (abs(p.nu2) <= atol and abs(p.mu1) <= atol and abs(p.mu4) <= atol
            and abs(p.mu2 - p.nu1 / 2.0) <= atol
            and abs(p.mu3 + p.nu1) <= atol
            and abs(p.mu5 + p.nu1 / 4.0) <= atol)


def linearizability(p: FamilyParams, tol: float = 1e-9,
                    has_potential: bool = True) -> LinearizationResult:
    """Classify a family member's orbit relative to the linear equation.

    A member is (gauge-)linearizable iff ι₂ = ι₃ = ι₄ = ι₅ = 0 within tol
    and ι₁ > tol; the mapping element is then Λ = |ν₁|/√(2ι₁),
    γ = 2Λν₂/ν₁ (positive-Λ convention).  The first invariant exceeding
    tol is reported as the obstruction; ι₁ ≤ tol reports "nonpositive
    iota1".  After computing the element we re-apply the parameter action
    and insist the result matches the linear coefficient pattern within
    10·tol, so an error in the closed form cannot pass silently.
    """
    iota = invariants(p, has_potential)
    for name in _LINEAR_PATTERN_OBSTRUCTIONS:
        val = getattr(iota, name)
        if abs(val) > tol:
            return LinearizationResult(
                verdict=NOT_LINEARIZABLE,
                obstruction=f"{name} = {val:.6g} is a nonvanishing gauge invariant")
    if iota.iota1 <= tol:
        return LinearizationResult(
            verdict=NOT_LINEARIZABLE,
            obstruction=f"nonpositive iota1 ({iota.iota1:.6g})")

    mass_out = None
    hbar_prime = None
    if iota.iota0 is not None and iota.iota0 < 0.0:
        mass_out = -1.0 / (2.0 * iota.iota0)
        hbar_prime = float(np.sqrt(8.0 * mass_out ** 2 * iota.iota1))

    scale = max(1.0, abs(p.nu1), abs(p.mu3))
    if _matches_linear_pattern(p, tol * scale):
        return LinearizationResult(
            verdict=ALREADY_LINEAR, gauge=IDENTITY,
            hbar_prime=hbar_prime, mass_out=mass_out,
            hbar_over_mass=-2.0 * p.nu1)

    lam = abs(p.nu1) / float(np.sqrt(2.0 * iota.iota1))
    gam = 2.0 * lam * p.nu2 / p.nu1
    g = GaugeElement(lam, gam)
    mapped = act_on_params(g, p)
    if not _matches_linear_pattern(mapped, 10.0 * tol * scale):
        raise RuntimeError("linearizing element failed to reach the linear pattern; "
                           "this indicates an internal inconsistency")
    return LinearizationResult(
        verdict=LINEARIZABLE, gauge=g,
        hbar_prime=hbar_prime, mass_out=mass_out,
        hbar_over_mass=-2.0 * p.nu1 / lam)


def ehrenfest_linearizing_gauge(hbar, mass, D, Dprime_c2) -> GaugeElement:
    """Closed-form linearizing element for an Ehrenfest member.

    Λ = (1 − (4m/ħ)D′c₂ − 4m²D²/ħ²)^(−1/2),  γ = −(2mD/ħ)·Λ.
    Requires the strict inequality 4m²D²/ħ² < 1 − (4m/ħ)D′c₂; raises
    NotLinearizable on the boundary or beyond, where ι₁ ≤ 0.
    """
    disc = 1.0 - (4.0 * mass / hbar) * Dprime_c2 - 4.0 * mass ** 2 * D ** 2 / hbar ** 2
    if disc <= 0.0:
        raise NotLinearizable(
            f"no linearizing element: 1 − (4m/ħ)D′c₂ − 4m²D²/ħ² = {disc:.6g} ≤ 0")
    lam = disc ** -0.5
    return GaugeElement(lam, -(2.0 * mass * D / hbar) * lam)
