"""Complex fields on uniform periodic grids and their hydrodynamic observables.

A wavefunction ψ lives on a uniform periodic grid covering [−L/2, L/2) per
axis.  From it we form the density ρ = |ψ|², the probability current
J = Im(ψ̄∇ψ) and, in one dimension, a continuous unwrapped phase θ with
ψ = |ψ|·e^{iθ}.  Spatial derivatives are spectral (Fourier) by default;
2nd-order centered finite differences are available as a cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NodalState, UnsupportedDimension

#: States with min|ψ| at or below this fraction of max|ψ| count as nodal.
ZERO_FLOOR_REL = 1e-12

SPECTRAL = "spectral"
FD2 = "fd2"


def _check_method(method):
    if method not in (SPECTRAL, FD2):
        raise ValueError(f"unknown derivative method {method!r}")


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid with ``n`` points per axis over length ``length``.

    The grid center x = 0 sits at index n//2, so axis coordinates are
    (i − n//2)·spacing for i = 0..n−1.  Index arithmetic wraps modulo n.
    """

    n: int
    length: float
    dim: int = 1

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"grid needs at least 2 points per axis, got {self.n}")
        if not self.length > 0:
            raise ValueError(f"grid length must be positive, got {self.length}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"grid dimension must be a positive integer, got {self.dim}")

    @property
    def spacing(self) -> float:
        return self.length / self.n

    @property
    def shape(self) -> tuple:
        return (self.n,) * self.dim

    @property
    def size(self) -> int:
        return self.n ** self.dim

    def axis(self) -> np.ndarray:
        """Coordinates along a single axis, x = 0 at index n//2."""
        return (np.arange(self.n) - self.n // 2) * self.spacing

    def meshes(self) -> list:
        """Coordinate arrays, one per axis, each of shape ``self.shape``."""
        ax = self.axis()
        return list(np.meshgrid(*([ax] * self.dim), indexing="ij"))


def _validated(values, dtype, shape, what):
    arr = np.asarray(values, dtype=dtype)
    if arr.shape != shape:
        raise ValueError(f"{what} values have shape {arr.shape}, expected {shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} contains non-finite values")
    return arr


@dataclass(frozen=True)
class Wavefunction:
    """Complex samples of ψ, one per grid point."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        arr = _validated(self.values, np.complex128, self.grid.shape, "wavefunction")
        object.__setattr__(self, "values", arr)


@dataclass(frozen=True)
class ScalarField:
    """Real samples, one per grid point (holds ρ, V, θ, ...)."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        arr = _validated(self.values, np.float64, self.grid.shape, "scalar field")
        object.__setattr__(self, "values", arr)


@dataclass(frozen=True)
class VectorField:
    """Real dim-component samples; values has shape (dim,) + grid.shape."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        shape = (self.grid.dim,) + self.grid.shape
        arr = _validated(self.values, np.float64, shape, "vector field")
        object.__setattr__(self, "values", arr)


@dataclass(frozen=True)
class Potential:
    """External potential: free (V ≡ 0), harmonic (k/2)·x², or sampled values.

    Harmonic strength k multiplies half the squared distance from the grid
    center.  Sampled potentials carry their own ScalarField and only
    evaluate on its grid.
    """

    kind: str
    strength: float = 0.0
    samples: ScalarField | None = None

    def __post_init__(self):
        if self.kind not in ("free", "harmonic", "sampled"):
            raise ValueError(f"unknown potential kind {self.kind!r}")
        if self.kind == "sampled" and self.samples is None:
            raise ValueError("sampled potential needs a ScalarField of samples")

    @staticmethod
    def free() -> "Potential":
        return Potential("free")

    @staticmethod
    def harmonic(k: float) -> "Potential":
        return Potential("harmonic", strength=float(k))

    @staticmethod
    def sampled(field: ScalarField) -> "Potential":
        return Potential("sampled", samples=field)

    def evaluate(self, grid: Grid) -> ScalarField:
        if self.kind == "free":
            return ScalarField(grid, np.zeros(grid.shape))
        if self.kind == "harmonic":
            r2 = sum(x * x for x in grid.meshes())
            return ScalarField(grid, 0.5 * self.strength * r2)
        if self.samples.grid != grid:
            raise ValueError("sampled potential was built on a different grid")
        return self.samples


# ---------------------------------------------------------------------------
# derivative operators (array level)

def _wavenumbers(grid, zero_nyquist):
    k = 2.0 * np.pi * np.fft.fftfreq(grid.n, d=grid.spacing)
    if zero_nyquist and grid.n % 2 == 0:
        k[grid.n // 2] = 0.0  # Nyquist mode carries no odd-derivative information
    return k


def _axis_shape(grid, axis):
    shape = [1] * grid.dim
    shape[axis] = grid.n
    return tuple(shape)


def grad_array(values, grid, method=SPECTRAL):
    """∇ of an array of samples; complex in → complex out, real in → real out."""
    _check_method(method)
    is_complex = np.iscomplexobj(values)
    out = np.empty((grid.dim,) + grid.shape, dtype=np.complex128 if is_complex else np.float64)
    if method == SPECTRAL:
        k = _wavenumbers(grid, zero_nyquist=True)
        spectrum = np.fft.fftn(values)
        for a in range(grid.dim):
            d = np.fft.ifftn(1j * k.reshape(_axis_shape(grid, a)) * spectrum)
            out[a] = d if is_complex else d.real
    else:
        h2 = 2.0 * grid.spacing
        for a in range(grid.dim):
            out[a] = (np.roll(values, -1, axis=a) - np.roll(values, 1, axis=a)) / h2
    return out


def div_array(vec_values, grid, method=SPECTRAL):
    """∇· of per-axis samples of shape (dim,) + grid.shape."""
    _check_method(method)
    is_complex = np.iscomplexobj(vec_values)
    acc = np.zeros(grid.shape, dtype=np.complex128)
    if method == SPECTRAL:
        k = _wavenumbers(grid, zero_nyquist=True)
        for a in range(grid.dim):
            acc += 1j * k.reshape(_axis_shape(grid, a)) * np.fft.fftn(vec_values[a])
        acc = np.fft.ifftn(acc)
    else:
        h2 = 2.0 * grid.spacing
        for a in range(grid.dim):
            acc += (np.roll(vec_values[a], -1, axis=a) - np.roll(vec_values[a], 1, axis=a)) / h2
    return acc if is_complex else acc.real


def lap_array(values, grid, method=SPECTRAL):
    """Δ of an array of samples."""
    _check_method(method)
    is_complex = np.iscomplexobj(values)
    if method == SPECTRAL:
        k = _wavenumbers(grid, zero_nyquist=False)
        k2 = np.zeros(grid.shape)
        for a in range(grid.dim):
            k2 = k2 + (k ** 2).reshape(_axis_shape(grid, a))
        out = np.fft.ifftn(-k2 * np.fft.fftn(values))
        return out if is_complex else out.real
    h2 = grid.spacing ** 2
    acc = -2.0 * grid.dim * values.astype(np.complex128 if is_complex else np.float64)
    for a in range(grid.dim):
        acc = acc + np.roll(values, -1, axis=a) + np.roll(values, 1, axis=a)
    return acc / h2


def gradient(f: ScalarField, method=SPECTRAL) -> VectorField:
    """Spectral (default) or centered-difference gradient of a scalar field."""
    return VectorField(f.grid, grad_array(f.values, f.grid, method))


def divergence(v: VectorField, method=SPECTRAL) -> ScalarField:
    """Divergence of a vector field."""
    return ScalarField(v.grid, div_array(v.values, v.grid, method))


def laplacian(f, method=SPECTRAL):
    """Laplacian of a ScalarField or Wavefunction (returns the same kind)."""
    out = lap_array(f.values, f.grid, method)
    if isinstance(f, Wavefunction):
        return Wavefunction(f.grid, out)
    return ScalarField(f.grid, out)


# ---------------------------------------------------------------------------
# hydrodynamic observables

def density(psi: Wavefunction) -> ScalarField:
    """ρ = |ψ|², pointwise."""
    v = psi.values
    return ScalarField(psi.grid, v.real ** 2 + v.imag ** 2)


def current(psi: Wavefunction, method=SPECTRAL) -> VectorField:
    """J = Im(ψ̄ ∇ψ).  The physical current is (ħ/m)·J; J is what we store."""
    grad = grad_array(psi.values, psi.grid, method)
    return VectorField(psi.grid, np.imag(np.conjugate(psi.values) * grad))


def zero_floor(psi: Wavefunction) -> float:
    """Modulus threshold below which ``psi`` counts as having a node."""
    return ZERO_FLOOR_REL * float(np.max(np.abs(psi.values)))


def require_nodeless(psi: Wavefunction, what="operation"):
    floor = zero_floor(psi)
    if float(np.min(np.abs(psi.values))) <= floor:
        raise NodalState(f"{what} needs a nodeless state: min|ψ| ≤ {floor:.3e}")


def _unwrap_1d(theta):
    # Shift each successive jump into (−π, π]; ties |Δθ| = π resolve to +π.
    # Tracking integer winding counts keeps θ ≡ arg ψ (mod 2π) exact.
    d = np.diff(theta)
    wraps = np.floor((np.pi - d) / (2.0 * np.pi))
    winding = np.concatenate(([0.0], np.cumsum(wraps)))
    return theta + 2.0 * np.pi * winding


def phase(psi: Wavefunction) -> ScalarField:
    """Continuous unwrapped argument θ of a nodeless 1D wavefunction.

    θ is anchored to the principal argument at the first grid point and
    continued so each jump stays within (−π, π]; ψ = |ψ|·e^{iθ} holds
    pointwise to roundoff.  Raises NodalState for states with nodes and
    UnsupportedDimension above 1D.
    """
    if psi.grid.dim != 1:
        raise UnsupportedDimension("phase unwrapping is only defined on 1D grids")
    require_nodeless(psi, "phase unwrapping")
    return ScalarField(psi.grid, _unwrap_1d(np.angle(psi.values)))


# ---------------------------------------------------------------------------
# norms and reference states

def grid_l2(values, grid: Grid) -> float:
    """Grid L² norm √(∑|v|²·dx^dim)."""
    return float(np.sqrt(np.sum(np.abs(values) ** 2) * grid.spacing ** grid.dim))


def total_mass(psi: Wavefunction) -> float:
    """∑ ρ · dx^dim over the grid."""
    v = psi.values
    return float(np.sum(v.real ** 2 + v.imag ** 2) * psi.grid.spacing ** psi.grid.dim)


def resolved_wavenumber(grid: Grid, mode: int) -> float:
    """Wavenumber 2π·mode/length of an exactly grid-periodic Fourier mode."""
    return 2.0 * np.pi * mode / grid.length


def gaussian_packet(grid: Grid, sigma0=1.0, x0=0.0, k0=0.0) -> Wavefunction:
    """Normalized 1D Gaussian (2πσ₀²)^(−1/4)·e^{−(x−x₀)²/4σ₀²}·e^{ik₀x}."""
    if grid.dim != 1:
        raise UnsupportedDimension("gaussian_packet is 1D only")
    x = grid.axis()
    envelope = (2.0 * np.pi * sigma0 ** 2) ** (-0.25) * np.exp(-((x - x0) ** 2) / (4.0 * sigma0 ** 2))
    return Wavefunction(grid, envelope * np.exp(1j * k0 * x))


def plane_wave(grid: Grid, k: float) -> Wavefunction:
    """Unit-amplitude 1D plane wave e^{ikx}.

    Periodicity on the grid requires k = 2π·m/length for integer m;
    other k are accepted but wrap discontinuously at the seam.
    """
    if grid.dim != 1:
        raise UnsupportedDimension("plane_wave is 1D only")
    return Wavefunction(grid, np.exp(1j * k * grid.axis()))
