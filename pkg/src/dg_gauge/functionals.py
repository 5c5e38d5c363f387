"""The five real nonlinear functionals R₁..R₅ and the Laplacian expansion.

With ρ = |ψ|² and J = Im(ψ̄∇ψ):

    R₁ = ∇·J/ρ    R₂ = Δρ/ρ    R₃ = J²/ρ²    R₄ = J·∇ρ/ρ²    R₅ = (∇ρ)²/ρ²

All five are complex-homogeneous of degree zero (unchanged under ψ → cψ)
and enter the family equation multiplied by real coefficients.  No phase
unwrapping is involved here.

Numerators are evaluated through the product-rule identities

    ∇ρ  = 2 Re(ψ̄∇ψ)
    ∇·J = Im(ψ̄Δψ)
    Δρ  = 2 Re(ψ̄Δψ) + 2|∇ψ|²

so that only ψ itself is ever differentiated.  This matters: the naive
route (differentiate ρ and J as grid products) lets spectral derivatives
carry interior grid-scale content into regions where ρ is many orders of
magnitude smaller, and the quotients amplify that into a stage-to-stage
runaway under time stepping.  In identity form every numerator is a
pointwise product with ψ̄, so it inherits the local smallness of ψ.
The Laplacian of a nodeless state expands as

    Δψ = {iR₁ + ½R₂ − R₃ − ¼R₅}ψ,

which these forms satisfy identically: iR₁ + ½R₂ recombines into
ψ̄Δψ/ρ + |∇ψ|²/ρ and R₃ + ¼R₅ = |ψ̄∇ψ|²/ρ² = |∇ψ|²/ρ.
"""

from __future__ import annotations

import numpy as np

from .errors import NodalState
from .fields import (
    SPECTRAL,
    ScalarField,
    Wavefunction,
    ZERO_FLOOR_REL,
    grad_array,
    lap_array,
)

#: Valid functional indices j for compute_R.
FunctionalIndex = int
FUNCTIONAL_INDICES = (1, 2, 3, 4, 5)


def r_arrays(values, grid, rho_floor=0.0, method=SPECTRAL):
    """All five R_j as plain arrays for ψ samples ``values``.

    With rho_floor = 0 the state must be genuinely nodeless
    (min ρ above the squared modulus floor) and we raise NodalState
    otherwise; with rho_floor > 0 the quotient denominators are
    smoothly regularized as ρ + rho_floor, for use during time
    stepping.  An additive ε keeps the regularized field kink-free —
    clipping the density instead plants a slope discontinuity at the
    clip boundary that the spectral derivatives amplify into a
    runaway.
    """
    rho = values.real ** 2 + values.imag ** 2
    if rho_floor > 0.0:
        denom = rho + rho_floor
    else:
        if float(np.min(rho)) <= ZERO_FLOOR_REL ** 2 * float(np.max(rho)):
            raise NodalState("R_j quotients need min ρ above the zero floor")
        denom = rho

    grad_psi = grad_array(values, grid, method)
    lap_psi = lap_array(values, grid, method)
    conj_lap = np.conjugate(values) * lap_psi
    conj_grad = np.conjugate(values)[None] * grad_psi

    J = np.imag(conj_grad)
    grad_rho = 2.0 * np.real(conj_grad)
    div_J = np.imag(conj_lap)
    grad_sq = np.sum(grad_psi.real ** 2 + grad_psi.imag ** 2, axis=0)
    lap_rho = 2.0 * np.real(conj_lap) + 2.0 * grad_sq

    r1 = div_J / denom
    r2 = lap_rho / denom
    d2 = denom * denom
    r3 = np.sum(J * J, axis=0) / d2
    r4 = np.sum(J * grad_rho, axis=0) / d2
    r5 = np.sum(grad_rho * grad_rho, axis=0) / d2
    return r1, r2, r3, r4, r5


def compute_R(j: FunctionalIndex, psi: Wavefunction, rho_floor=0.0, method=SPECTRAL) -> ScalarField:
    """Evaluate R_j[ψ] for j in 1..5."""
    if j not in FUNCTIONAL_INDICES:
        raise ValueError(f"functional index must be in 1..5, got {j}")
    rs = r_arrays(psi.values, psi.grid, rho_floor=rho_floor, method=method)
    return ScalarField(psi.grid, rs[j - 1])


def laplacian_expansion_residual(psi: Wavefunction, method=SPECTRAL) -> float:
    """Max pointwise |Δψ − {iR₁ + ½R₂ − R₃ − ¼R₅}ψ| / max|Δψ|.

    Zero by the expansion identity in exact arithmetic; near roundoff for
    smooth resolved states.  The 0/0 case (constant ψ) is defined as 0.
    """
    r1, r2, r3, _, r5 = r_arrays(psi.values, psi.grid, method=method)
    lap_psi = lap_array(psi.values, psi.grid, method)
    combo = (1j * r1 + 0.5 * r2 - r3 - 0.25 * r5) * psi.values
    num = float(np.max(np.abs(lap_psi - combo)))
    den = float(np.max(np.abs(lap_psi)))
    if den == 0.0:
        return 0.0
    return num / den
