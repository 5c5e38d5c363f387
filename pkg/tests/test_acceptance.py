"""Acceptance gate: the eleven behavior guarantees this package ships under.

Each test prints one [PASS]/[FAIL] line before asserting, so even a broken
build leaves a complete scoreboard (run ``pytest tests/test_acceptance.py
-v -s`` to see all lines).  Randomized criteria draw from per-criterion
pinned seeds; reruns are identical.
"""

import time

import numpy as np

from dg_gauge import (
    EvolutionConfig,
    Grid,
    Potential,
    commute_check,
    density,
    evolve,
    gaussian_packet,
    grid_l2,
    linear_se,
    total_mass,
)
from dg_gauge import verification as V


def _rng(num):
    return np.random.default_rng((2026, num))


def _report(num, name, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {num:02d} {name}: {detail}")
    assert ok, f"criterion {num} {name}: {detail}"


def test_criterion_01_density_invariance():
    t0 = time.monotonic()
    r = V.check_density_invariance(_rng(1), trials=1000)
    elapsed = time.monotonic() - t0
    _report(1, "density invariance", r.passed and elapsed < 5.0,
            f"{r.detail}; {elapsed:.2f}s (limit 5s)")


def test_criterion_02_group_law_and_action():
    t0 = time.monotonic()
    r = V.check_group_law(_rng(2), trials=1000)
    elapsed = time.monotonic() - t0
    _report(2, "group law and action compatibility", r.passed and elapsed < 10.0,
            f"{r.detail}; {elapsed:.2f}s (limit 10s)")


def test_criterion_03_invariants_and_reconstruction():
    t0 = time.monotonic()
    r = V.check_invariants(_rng(3), trials=1000)
    elapsed = time.monotonic() - t0
    _report(3, "invariant preservation and reconstruction", r.passed and elapsed < 5.0,
            f"{r.detail}; {elapsed:.2f}s (limit 5s)")


def test_criterion_04_published_leaf_values():
    r = V.check_published_leaves()
    _report(4, "published leaf values", r.passed, r.detail)


def test_criterion_05_linearization_closed_form():
    r = V.check_linearization_closed_form(_rng(5), trials=100)
    _report(5, "linearization closed form", r.passed, r.detail)


def test_criterion_06_laplacian_expansion():
    r = V.check_laplacian_expansion(_rng(6), trials=100, n=256)
    _report(6, "Laplacian expansion identity", r.passed, r.detail)


def test_criterion_07_current_transformation():
    r = V.check_current_transformation(_rng(7), trials=100)
    _report(7, "current transformation rule", r.passed, r.detail)


def test_criterion_08_symplectic_factor():
    r = V.check_symplectic_factor(_rng(8), trials=100)
    _report(8, "symplectic scaling factor", r.passed, r.detail)


def test_criterion_09_commuting_diagram():
    t0 = time.monotonic()
    grid = Grid(512, 40.0)
    psi0 = gaussian_packet(grid, sigma0=2.0)
    cfg = EvolutionConfig(dt=2e-3, t_end=0.5, record_every=25)
    dg = (1.0, 1.0, 0.05, 0.0)
    worst = 0.0
    drift = 0.0
    for pot in (Potential.free(), Potential.harmonic(1.0)):
        report = commute_check(dg, pot, psi0, cfg)
        worst = max(worst, report.max_error)
        for traj in (report.transformed, report.linear):
            masses = [total_mass(s) for s in traj.states]
            drift = max(drift, max(abs(m - masses[0]) for m in masses) / masses[0])
    elapsed = time.monotonic() - t0
    ok = worst <= 2e-3 and drift <= 1e-8 and elapsed < 60.0
    _report(9, "commuting diagram, free and harmonic", ok,
            f"max path discrepancy {worst:.3e} (tol 2e-03); "
            f"mass drift {drift:.3e} (tol 1e-08); {elapsed:.1f}s (limit 60s)")


def test_criterion_10_solver_order_and_conservation():
    r = V.check_solver_order(_rng(10))
    grid = Grid(512, 40.0)
    psi0 = gaussian_packet(grid, sigma0=1.0)
    floor = 1e-15 * float(np.mean(density(psi0).values))
    t_end = 1.0
    traj = evolve(linear_se(1.0, 1.0), Potential.free(), psi0,
                  EvolutionConfig(dt=2e-3, t_end=t_end, rho_floor=floor,
                                  record_every=100))
    exact = V.spreading_gaussian(grid, 1.0, 1.0, 1.0, t_end)
    err = grid_l2(traj.states[-1].values - exact.values, grid)
    masses = [total_mass(s) for s in traj.states]
    drift = max(abs(m - masses[0]) for m in masses) / masses[0]
    ok = r.passed and err <= 1e-6 and drift <= 1e-8
    _report(10, "solver order and conservation", ok,
            f"{r.detail}; free-Gaussian L2 error {err:.3e} (tol 1e-06); "
            f"mass drift {drift:.3e} (tol 1e-08)")


def test_criterion_11_gauge_covariance_of_dynamics():
    r = V.check_gauge_covariance(_rng(11), cases=10)
    _report(11, "gauge covariance of the full dynamics", r.passed, r.detail)
