"""Nonlinear gauge transformations and evolution for a family of NLS equations.

The package covers three layers: discretized fields and their
hydrodynamic observables (``fields``, ``functionals``), the nonlinear
gauge group with its actions and invariants (``gauge``, ``family``), and
time evolution with linearization experiments (``evolve``).  The
``dg-gauge`` command drives all of it from JSON configs.
"""

from .errors import (
    DegenerateFamily,
    DGError,
    InsufficientSnapshots,
    NodalState,
    NotLinearizable,
    ParseError,
    Unstable,
    UnsupportedDimension,
    ValidationError,
    ZeroPoint,
)
from .family import (
    DGParams,
    FamilyParams,
    InvariantTuple,
    LinearizationResult,
    ehrenfest,
    ehrenfest_linearizing_gauge,
    from_dg,
    galilei,
    invariants,
    linear_se,
    linearizability,
    reconstruct,
    same_leaf,
)
from .fields import (
    FD2,
    SPECTRAL,
    Grid,
    Potential,
    ScalarField,
    VectorField,
    Wavefunction,
    current,
    density,
    divergence,
    gaussian_packet,
    gradient,
    grid_l2,
    laplacian,
    phase,
    plane_wave,
    resolved_wavenumber,
    total_mass,
)
from .functionals import compute_R, laplacian_expansion_residual
from .gauge import (
    GaugeElement,
    IDENTITY,
    SymplecticProbe,
    act_on_params,
    apply,
    compose,
    inverse,
    symplectic_factor,
    transform_current,
)
from .evolve import (
    CommuteReport,
    EvolutionConfig,
    Trajectory,
    commute_check,
    continuity_defect,
    energy_like,
    evolve,
    residual,
    rhs,
    stability_bound,
    transform_trajectory,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
