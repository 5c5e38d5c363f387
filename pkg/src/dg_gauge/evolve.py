"""Time integration of the family equation and its diagnostics.

The right-hand side

    ∂ₜψ = (ν₁R₁ + ν₂R₂)ψ − i(μ₁R₁ + μ₂R₂ + μ₃R₃ + μ₄R₄ + μ₅R₅ + μ₀V)ψ

is integrated with fixed-step explicit RK4; spatial derivatives are
spectral by default ("rk4-spectral") with a centered-difference variant
("rk4-fd2") for cross-checks.  The iν₂R₂ term is parabolic, so dt is
held below a dx² stability bound.  ρ-quotient denominators are
regularized as ρ + rho_floor during stepping only; the verification
diagnostics default to the unregularized quotients.

Diagnostics: an equation residual from centered time differences of the
recorded snapshots (deliberately independent of the integrator scheme),
the continuity defect of ∂ₜρ = 2ν₁∇·J + 2ν₂Δρ, and the commuting-diagram
experiment comparing transform-then-evolve with evolve-then-transform
for linearizable members.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientSnapshots, NodalState, Unstable, UnsupportedDimension
from .family import FamilyParams, ehrenfest, ehrenfest_linearizing_gauge
from .fields import (
    FD2,
    SPECTRAL,
    Grid,
    Potential,
    Wavefunction,
    div_array,
    grad_array,
    grid_l2,
    lap_array,
    phase,
)
from .functionals import r_arrays
from .gauge import GaugeElement, act_on_params

RK4_SPECTRAL = "rk4-spectral"
RK4_FD2 = "rk4-fd2"
_SCHEME_METHODS = {RK4_SPECTRAL: SPECTRAL, RK4_FD2: FD2}


@dataclass(frozen=True)
class EvolutionConfig:
    """Integration settings.

    rho_floor = None resolves to 1e−10 · mean ρ of the initial state at
    the start of the run; pass an explicit nonnegative value to override
    (0 disables regularization and demands genuinely nodeless states).
    """

    dt: float
    t_end: float
    scheme: str = RK4_SPECTRAL
    rho_floor: float | None = None
    record_every: int = 1

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.t_end > 0:
            raise ValueError("t_end must be positive")
        if self.scheme not in _SCHEME_METHODS:
            raise ValueError(f"unknown scheme {self.scheme!r}; "
                             f"choose from {sorted(_SCHEME_METHODS)}")
        if self.rho_floor is not None and self.rho_floor < 0:
            raise ValueError("rho_floor must be nonnegative")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise ValueError("record_every must be a positive integer")


@dataclass(frozen=True)
class Trajectory:
    """Recorded snapshots of one run, with the equation they solve."""

    times: np.ndarray
    states: tuple
    params: FamilyParams
    potential: Potential

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        states = tuple(self.states)
        if len(states) != times.size or times.size < 1:
            raise ValueError("trajectory needs matching, nonempty times and states")
        grid = states[0].grid
        if any(s.grid != grid for s in states):
            raise ValueError("trajectory snapshots must share one grid")
        if times.size > 1 and not np.all(np.diff(times) > 0):
            raise ValueError("trajectory times must increase")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)

    @property
    def grid(self) -> Grid:
        return self.states[0].grid


def stability_bound(p: FamilyParams, grid: Grid) -> float:
    """Largest admissible dt for the explicit scheme on this grid."""
    dx = grid.spacing
    return dx * dx / (4.0 * max(abs(p.nu1), abs(p.nu2), abs(p.mu3)) + 1e-30)


def _rhs_array(p, v_samples, values, grid, rho_floor, method):
    r1, r2, r3, r4, r5 = r_arrays(values, grid, rho_floor=rho_floor, method=method)
    real_coef = p.nu1 * r1 + p.nu2 * r2
    imag_coef = (p.mu1 * r1 + p.mu2 * r2 + p.mu3 * r3 + p.mu4 * r4 + p.mu5 * r5
                 + p.mu0 * v_samples)
    return (real_coef - 1j * imag_coef) * values


def rhs(p: FamilyParams, V: Potential, psi: Wavefunction,
        rho_floor: float = 0.0, method=SPECTRAL) -> Wavefunction:
    """∂ₜψ as a field; rho_floor > 0 regularizes the R_j quotients."""
    v = V.evaluate(psi.grid).values
    return Wavefunction(psi.grid, _rhs_array(p, v, psi.values, psi.grid, rho_floor, method))


def energy_like(p: FamilyParams, V: Potential, psi: Wavefunction, method=SPECTRAL) -> float:
    """∑(μ₃|∇ψ|² + μ₀·V·ρ)·dx — conserved along the linear leaf, a drift
    indicator elsewhere."""
    grid = psi.grid
    grad_psi = grad_array(psi.values, grid, method)
    kinetic = p.mu3 * np.sum(np.abs(grad_psi) ** 2, axis=0)
    rho = psi.values.real ** 2 + psi.values.imag ** 2
    v = V.evaluate(grid).values
    return float(np.sum(kinetic + p.mu0 * v * rho) * grid.spacing ** grid.dim)


def _step_count(dt, t_end):
    n = int(round(t_end / dt))
    if n >= 1 and abs(n * dt - t_end) <= 1e-9 * max(dt, t_end):
        return n
    return int(math.ceil(t_end / dt - 1e-12))


def evolve(p: FamilyParams, V: Potential, psi0: Wavefunction,
           cfg: EvolutionConfig) -> Trajectory:
    """Fixed-step RK4 integration from t = 0 to t_end.

    Snapshots are recorded every record_every steps, always including the
    initial and final states.  If t_end is not a whole number of steps it
    is rounded up to one.  Raises Unstable when dt violates the stability
    bound or a sample stops being finite, and NodalState when the state
    develops a node the regularization cannot absorb (with the time
    reached attached to the exception).
    """
    grid = psi0.grid
    bound = stability_bound(p, grid)
    if not cfg.dt < bound:
        raise Unstable(f"dt = {cfg.dt:.3e} violates the stability bound {bound:.3e}")
    rho0 = psi0.values.real ** 2 + psi0.values.imag ** 2
    if float(np.min(rho0)) <= 0.0:
        raise NodalState("initial state has a node (zero density sample)", t=0.0)
    floor = cfg.rho_floor
    if floor is None:
        floor = 1e-10 * float(np.mean(rho0))
    method = _SCHEME_METHODS[cfg.scheme]
    v = V.evaluate(grid).values

    nsteps = _step_count(cfg.dt, cfg.t_end)
    dt = cfg.dt
    y = psi0.values.copy()
    times = [0.0]
    states = [psi0]
    for step in range(1, nsteps + 1):
        t = step * dt
        try:
            k1 = _rhs_array(p, v, y, grid, floor, method)
            k2 = _rhs_array(p, v, y + (0.5 * dt) * k1, grid, floor, method)
            k3 = _rhs_array(p, v, y + (0.5 * dt) * k2, grid, floor, method)
            k4 = _rhs_array(p, v, y + dt * k3, grid, floor, method)
        except NodalState as exc:
            raise NodalState(f"state developed a node by t = {t:.6g}", t=t) from exc
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise Unstable(f"non-finite samples at t = {t:.6g}", t=t)
        if step % cfg.record_every == 0 or step == nsteps:
            times.append(t)
            states.append(Wavefunction(grid, y.copy()))
    return Trajectory(np.array(times), tuple(states), p, V)


def _check_uniform(times):
    if times.size < 3:
        raise InsufficientSnapshots("diagnostic needs at least 3 snapshots")
    steps = np.diff(times)
    if np.max(np.abs(steps - steps[0])) > 1e-9 * steps[0]:
        raise ValueError("diagnostic needs uniformly spaced snapshots")
    return float(steps[0])


def residual(p: FamilyParams, V: Potential, traj: Trajectory,
             rho_floor: float = 0.0, method=SPECTRAL) -> float:
    """Max interior-snapshot ‖∂ₜψ|_centered − rhs(p, V, ψ)‖₂ / ‖ψ‖₂.

    Centered time differences keep this independent of the integrator's
    own scheme; O(Δt²) for a genuine solution of the (p, V) equation.
    """
    delta = _check_uniform(traj.times)
    grid = traj.grid
    v = V.evaluate(grid).values
    worst = 0.0
    for i in range(1, len(traj.states) - 1):
        dpsi = (traj.states[i + 1].values - traj.states[i - 1].values) / (2.0 * delta)
        mid = traj.states[i].values
        defect = dpsi - _rhs_array(p, v, mid, grid, rho_floor, method)
        worst = max(worst, grid_l2(defect, grid) / grid_l2(mid, grid))
    return worst


def continuity_defect(traj: Trajectory, method=SPECTRAL) -> float:
    """Max interior ‖∂ₜρ|_centered − 2ν₁∇·J − 2ν₂Δρ‖₂ / max ρ."""
    delta = _check_uniform(traj.times)
    grid = traj.grid
    nu1, nu2 = traj.params.nu1, traj.params.nu2
    worst = 0.0
    for i in range(1, len(traj.states) - 1):
        rho_next = np.abs(traj.states[i + 1].values) ** 2
        rho_prev = np.abs(traj.states[i - 1].values) ** 2
        drho = (rho_next - rho_prev) / (2.0 * delta)
        mid = traj.states[i]
        rho = mid.values.real ** 2 + mid.values.imag ** 2
        grad_psi = grad_array(mid.values, grid, method)
        J = np.imag(np.conjugate(mid.values) * grad_psi)
        defect = drho - 2.0 * nu1 * div_array(J, grid, method) - 2.0 * nu2 * lap_array(rho, grid, method)
        worst = max(worst, grid_l2(defect, grid) / float(np.max(rho)))
    return worst


def transform_trajectory(g: GaugeElement, traj: Trajectory) -> Trajectory:
    """Apply a gauge element to every snapshot with a time-continuous phase branch.

    The unwrapped phase of a single state is only defined modulo 2π; the
    per-state convention re-anchors at the first grid point, so a long
    run can hop branches between snapshots, which would inject spurious
    e^{i2πΛ} global-phase jumps into the transformed sequence.  Here the
    branch is carried forward in time by matching the grid-center sample
    of θ against the previous snapshot (valid while the phase there moves
    by less than π between snapshots).  The result solves the equation
    with the transformed parameters.
    """
    if traj.grid.dim != 1:
        raise UnsupportedDimension("trajectory transformation is 1D only")
    center = traj.grid.n // 2
    two_pi = 2.0 * np.pi
    out = []
    prev_center = None
    for psi in traj.states:
        theta = phase(psi).values
        if prev_center is not None:
            theta = theta - two_pi * round((theta[center] - prev_center) / two_pi)
        prev_center = theta[center]
        r = np.abs(psi.values)
        out.append(Wavefunction(
            psi.grid, r * np.exp(1j * (g.gamma * np.log(r) + g.lam * theta))))
    return Trajectory(traj.times, tuple(out),
                      act_on_params(g, traj.params), traj.potential)


@dataclass(frozen=True)
class CommuteReport:
    """Outcome of the commuting-diagram experiment.

    transformed holds path A (evolve nonlinear, then gauge-map each
    snapshot); linear holds path B (gauge-map the initial state, then
    evolve the transformed parameters).
    """

    gauge: GaugeElement
    times: np.ndarray
    l2_error: np.ndarray
    transformed: Trajectory
    linear: Trajectory

    @property
    def max_error(self) -> float:
        return float(np.max(self.l2_error))


def commute_check(dg_ehr, V: Potential, psi0: Wavefunction,
                  cfg: EvolutionConfig) -> CommuteReport:
    """Does gauge transformation commute with time evolution?

    dg_ehr = (ħ, m, D, D′c₂) picks an Ehrenfest member and its closed-form
    linearizing element g.  Path A evolves the nonlinear equation and
    transforms every snapshot; path B transforms the initial state and
    evolves under the transformed (linear-pattern) parameters.  Reports
    the relative grid-L² discrepancy per snapshot.
    """
    hbar, mass, D, Dprime_c2 = dg_ehr
    g = ehrenfest_linearizing_gauge(hbar, mass, D, Dprime_c2)
    p = ehrenfest(hbar, mass, D, Dprime_c2)
    p_lin = act_on_params(g, p)
    # The primed parameters must land on the linear pattern; drift here
    # means the closed form and the parameter action disagree.
    expected_nu1 = -hbar / (2.0 * g.lam * mass)
    if not (math.isclose(p_lin.nu1, expected_nu1, rel_tol=1e-12)
            and abs(p_lin.nu2) <= 1e-12 and abs(p_lin.mu1) <= 1e-12
            and abs(p_lin.mu4) <= 1e-12
            and math.isclose(p_lin.mu2, p_lin.nu1 / 2.0, rel_tol=1e-10)
            and math.isclose(p_lin.mu3, -p_lin.nu1, rel_tol=1e-10)
            and math.isclose(p_lin.mu5, -p_lin.nu1 / 4.0, rel_tol=1e-10)
            and math.isclose(p_lin.mu0, g.lam / hbar, rel_tol=1e-12)):
        raise RuntimeError("transformed parameters missed the linear pattern")

    traj_nl = evolve(p, V, psi0, cfg)
    traj_a = transform_trajectory(g, traj_nl)
    traj_b = evolve(p_lin, V, traj_a.states[0], cfg)
    if traj_a.times.shape != traj_b.times.shape or np.max(np.abs(traj_a.times - traj_b.times)) > 1e-12:
        raise RuntimeError("paths recorded different snapshot times")

    grid = psi0.grid
    errs = np.empty(len(traj_a.states))
    for i, (sa, sb) in enumerate(zip(traj_a.states, traj_b.states)):
        errs[i] = grid_l2(sa.values - sb.values, grid) / grid_l2(sb.values, grid)
    return CommuteReport(gauge=g, times=traj_a.times, l2_error=errs,
                         transformed=traj_a, linear=traj_b)
