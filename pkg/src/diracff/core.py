"""Shared domain types: physical parameters, grids, drive protocols, states.

Everything here is an immutable value type.  Arrays stored on the dataclasses
are marked read-only, so instances can be shared freely between threads.

Conventions used throughout the package:

* the two-component spinor is stored as a complex array of shape (n, 2);
* grids sample x_j = x_min + j*dx on periodic boxes and cell centers
  x_j = x_min + (j + 1/2)*dx on bounded boxes, with dx = (x_max - x_min)/n
  in both cases; norms are Riemann sums dx * sum(...) (for a periodic smooth
  function this coincides with the trapezoid rule);
* a 2x2 hermitian Hamiltonian is written K*sigma_kinetic + m c^2*sigma_mass,
  where the kinetic/mass Pauli assignment depends on the representation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "BoundaryKind",
    "DegenerateEigenpairError",
    "DiracFFError",
    "DriveProtocol",
    "FieldKind",
    "GridSpec",
    "InvalidArgumentError",
    "NodeSingularityError",
    "PhysicalParams",
    "PotentialMatrix",
    "Representation",
    "RepresentationMismatchError",
    "ResolutionError",
    "ScalarWavefunction",
    "SpinorField",
    "UnderdeterminedSystemError",
    "UnsupportedOperationError",
    "grid_integrate",
    "make_constant_protocol",
    "make_sinusoidal_protocol",
    "protocol_from_table",
    "wavenumber_lattice",
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "IDENTITY_2",
    "ROTATION_XZ",
]


class DiracFFError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgumentError(DiracFFError, ValueError):
    pass


class UnsupportedOperationError(DiracFFError):
    pass


class DegenerateEigenpairError(DiracFFError):
    """Positive and negative branches are (numerically) degenerate."""


class NodeSingularityError(DiracFFError):
    """Amplitude has a node; the phase quadrature would divide by ~zero."""


class UnderdeterminedSystemError(DiracFFError):
    """The pointwise potential solve is singular and cannot be inverted."""


class RepresentationMismatchError(DiracFFError):
    """Objects from different Pauli representations were mixed."""


class ResolutionError(DiracFFError):
    """State carries spectral weight too close to the grid Nyquist edge."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    a.setflags(write=False)
    return a


SIGMA_X = _readonly(np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex))
SIGMA_Y = _readonly(np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex))
SIGMA_Z = _readonly(np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex))
IDENTITY_2 = _readonly(np.eye(2, dtype=complex))

# Involutive unitary exchanging the two kinetic/mass Pauli assignments.
ROTATION_XZ = _readonly((SIGMA_X + SIGMA_Z) / math.sqrt(2.0))


@dataclass(frozen=True)
class PhysicalParams:
    """Rest mass, light speed, hbar and the eigenstate quantum number kappa.

    mass may be zero (massless Dirac-material limit); light_speed and hbar
    must be positive.  Defaults are natural units with kappa = 0.
    """

    mass: float = 1.0
    light_speed: float = 1.0
    hbar: float = 1.0
    kappa: float = 0.0

    def __post_init__(self) -> None:
        if self.mass < 0:
            raise InvalidArgumentError(f"mass must be >= 0, got {self.mass}")
        if self.light_speed <= 0:
            raise InvalidArgumentError(f"light_speed must be > 0, got {self.light_speed}")
        if self.hbar <= 0:
            raise InvalidArgumentError(f"hbar must be > 0, got {self.hbar}")

    @property
    def rest_energy(self) -> float:
        """m c^2."""
        return self.mass * self.light_speed**2


class BoundaryKind(enum.Enum):
    PERIODIC = "periodic"
    BOUNDED = "bounded"


@dataclass(frozen=True)
class GridSpec:
    """Uniform 1D spatial grid.

    Periodic grids sample x_min + j*dx (x_max excluded, it aliases x_min);
    bounded grids sample cell centers x_min + (j+1/2)*dx so that the two
    reflecting walls sit exactly at x_min and x_max, half a cell outside the
    first/last sample.
    """

    x_min: float
    x_max: float
    n_points: int
    boundary: BoundaryKind = BoundaryKind.PERIODIC

    def __post_init__(self) -> None:
        if self.n_points < 2:
            raise InvalidArgumentError(f"n_points must be >= 2, got {self.n_points}")
        if not self.x_max > self.x_min:
            raise InvalidArgumentError(
                f"x_max must exceed x_min, got [{self.x_min}, {self.x_max}]"
            )

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def dx(self) -> float:
        return self.length / self.n_points

    @property
    def is_periodic(self) -> bool:
        return self.boundary is BoundaryKind.PERIODIC

    @property
    def points(self) -> np.ndarray:
        offset = 0.0 if self.is_periodic else 0.5
        return _readonly(self.x_min + (np.arange(self.n_points) + offset) * self.dx)

    def require_power_of_two(self) -> None:
        n = self.n_points
        if n & (n - 1):
            raise InvalidArgumentError(
                f"spectral backend requires a power-of-two grid, got n_points={n}"
            )

    def wavenumber_spacing(self) -> float:
        return 2.0 * math.pi / self.length

    def nearest_lattice_wavenumber(self, kappa: float) -> float:
        dk = self.wavenumber_spacing()
        return round(kappa / dk) * dk

    def validate_kappa(self, kappa: float) -> None:
        """Check that kappa lies on the periodic wavenumber lattice.

        Tolerance is 1e-12 relative to max(1, |kappa|).
        """
        if not self.is_periodic:
            raise UnsupportedOperationError("wavenumber lattice requires a periodic grid")
        nearest = self.nearest_lattice_wavenumber(kappa)
        if abs(kappa - nearest) > 1e-12 * max(1.0, abs(kappa)):
            raise InvalidArgumentError(
                f"kappa={kappa!r} is off the periodic wavenumber lattice; "
                f"nearest admissible value is {nearest!r}"
            )


def wavenumber_lattice(grid: GridSpec) -> np.ndarray:
    """Discrete Fourier wavenumbers 2*pi*n/L in FFT ordering.

    Ordering is n = 0, 1, ..., N/2-1, -N/2, ..., -1.  Only defined for
    periodic grids.
    """
    if not grid.is_periodic:
        raise UnsupportedOperationError("wavenumber lattice requires a periodic grid")
    return _readonly(2.0 * math.pi * np.fft.fftfreq(grid.n_points, d=grid.dx))


def grid_integrate(grid: GridSpec, samples: np.ndarray) -> complex | float:
    """Riemann-sum quadrature dx * sum(samples) over the grid axis (first)."""
    return grid.dx * np.sum(samples, axis=0)


class FieldKind(enum.Enum):
    """Spatial profile of the driven vector field A(x, alpha)."""

    HOMOGENEOUS = "homogeneous"  # A(x, alpha) = alpha
    LINEAR = "linear"            # A(x, alpha) = alpha * x

    def evaluate(self, x: np.ndarray | float, alpha: float) -> np.ndarray | float:
        if self is FieldKind.HOMOGENEOUS:
            return alpha * np.ones_like(np.asarray(x, dtype=float))
        return alpha * np.asarray(x, dtype=float)


class Representation(enum.Enum):
    """Pauli assignment of the kinetic and mass terms.

    KINETIC_X: kinetic term couples through sigma_x, mass through sigma_z.
    KINETIC_Z: kinetic through sigma_z, mass through sigma_x.  The closed-form
    eigenspinors bundled with this package are exact in KINETIC_Z.
    The two are related by the involutive rotation H -> U H U with
    U = (sigma_x + sigma_z)/sqrt(2).
    """

    KINETIC_X = "kinetic_x"
    KINETIC_Z = "kinetic_z"

    @property
    def sigma_kinetic(self) -> np.ndarray:
        return SIGMA_X if self is Representation.KINETIC_X else SIGMA_Z

    @property
    def sigma_mass(self) -> np.ndarray:
        return SIGMA_Z if self is Representation.KINETIC_X else SIGMA_X

    @property
    def other(self) -> "Representation":
        return (
            Representation.KINETIC_Z
            if self is Representation.KINETIC_X
            else Representation.KINETIC_X
        )


def rotate_matrix(m: np.ndarray) -> np.ndarray:
    """Conjugate a 2x2 matrix (or stack of them) by the X<->Z rotation."""
    return ROTATION_XZ @ m @ ROTATION_XZ


def rotate_spinor_values(values: np.ndarray) -> np.ndarray:
    """Apply the X<->Z rotation to an (n, 2) array of spinor values."""
    return values @ ROTATION_XZ.T


@dataclass(frozen=True)
class DriveProtocol:
    """Control schedule alpha(t) on [0, duration] with its time derivative.

    alpha and alpha_dot must accept scalars or numpy arrays.  The analytic
    derivative is carried explicitly; the test suite checks the pair for
    finite-difference consistency.  flat_start / flat_end certify that
    alpha_dot vanishes at t = 0 / t = duration (|alpha_dot| <= 1e-10); a
    shortcut is only guaranteed when both hold.
    """

    duration: float
    alpha: Callable[[np.ndarray | float], np.ndarray | float]
    alpha_dot: Callable[[np.ndarray | float], np.ndarray | float]
    flat_start: bool = field(default=False)
    flat_end: bool = field(default=False)

    _FLAT_TOL = 1e-10

    def __post_init__(self) -> None:
        if not self.duration > 0:
            raise InvalidArgumentError(f"duration must be > 0, got {self.duration}")
        if self.flat_start and abs(float(self.alpha_dot(0.0))) > self._FLAT_TOL:
            raise InvalidArgumentError("flat_start claimed but |alpha_dot(0)| > 1e-10")
        if self.flat_end and abs(float(self.alpha_dot(self.duration))) > self._FLAT_TOL:
            raise InvalidArgumentError("flat_end claimed but |alpha_dot(tau)| > 1e-10")

    @property
    def is_shortcut_compatible(self) -> bool:
        return self.flat_start and self.flat_end


def make_sinusoidal_protocol(tau: float) -> DriveProtocol:
    """Smooth ramp alpha(t) = sin^2(pi t / 2 tau) + 1 used by the presets.

    Its derivative (pi/2 tau) sin(pi t / tau) vanishes at both endpoints, so
    the ramp is shortcut-compatible.
    """
    if not tau > 0:
        raise InvalidArgumentError(f"tau must be > 0, got {tau}")

    def alpha(t):
        return np.sin(np.pi * t / (2.0 * tau)) ** 2 + 1.0

    def alpha_dot(t):
        return (np.pi / (2.0 * tau)) * np.sin(np.pi * t / tau)

    return DriveProtocol(tau, alpha, alpha_dot, flat_start=True, flat_end=True)


def make_constant_protocol(value: float, tau: float) -> DriveProtocol:
    """Static control alpha(t) = value."""
    if not tau > 0:
        raise InvalidArgumentError(f"tau must be > 0, got {tau}")

    def alpha(t):
        return value + 0.0 * np.asarray(t, dtype=float)

    def alpha_dot(t):
        return 0.0 * np.asarray(t, dtype=float)

    return DriveProtocol(tau, alpha, alpha_dot, flat_start=True, flat_end=True)


def protocol_from_table(
    t: np.ndarray, alpha: np.ndarray, alpha_dot: np.ndarray
) -> DriveProtocol:
    """Build a protocol from sampled (t, alpha, alpha_dot) columns.

    The samples define a cubic Hermite interpolant, so the returned
    alpha_dot is exactly the derivative of the returned alpha (the
    finite-difference consistency invariant holds by construction) and the
    supplied derivative values are honored at the nodes.  Whether the two
    columns are consistent with EACH OTHER at the nodes is the caller's
    contract; `diracff.cli.validate_config` guards it for run configs.
    """
    from scipy.interpolate import CubicHermiteSpline

    t = np.asarray(t, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    alpha_dot = np.asarray(alpha_dot, dtype=float)
    if t.ndim != 1 or t.size < 2:
        raise InvalidArgumentError("protocol table needs at least two samples")
    if np.any(np.diff(t) <= 0):
        raise InvalidArgumentError("protocol table times must be strictly increasing")
    if t[0] != 0.0:
        raise InvalidArgumentError("protocol table must start at t = 0")
    if alpha.shape != t.shape or alpha_dot.shape != t.shape:
        raise InvalidArgumentError("protocol table columns must have equal length")
    duration = float(t[-1])

    spline = CubicHermiteSpline(t, alpha, alpha_dot)
    derivative = spline.derivative()

    return DriveProtocol(
        duration,
        spline,
        derivative,
        flat_start=bool(abs(alpha_dot[0]) <= DriveProtocol._FLAT_TOL),
        flat_end=bool(abs(alpha_dot[-1]) <= DriveProtocol._FLAT_TOL),
    )


@dataclass(frozen=True)
class SpinorField:
    """Two-component complex wavefunction sampled on a grid, shape (n, 2)."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.grid.n_points, 2):
            raise InvalidArgumentError(
                f"spinor values must have shape ({self.grid.n_points}, 2), got {v.shape}"
            )
        object.__setattr__(self, "values", _readonly(v))

    def norm(self) -> float:
        return float(np.sqrt(grid_integrate(self.grid, np.sum(np.abs(self.values) ** 2, axis=1))))

    def normalized(self) -> "SpinorField":
        n = self.norm()
        if n == 0.0:
            raise InvalidArgumentError("cannot normalize the zero field")
        return SpinorField(self.grid, self.values / n)

    def inner(self, other: "SpinorField") -> complex:
        """<self|other> with the grid quadrature."""
        if other.grid != self.grid:
            raise InvalidArgumentError("inner product requires a shared grid")
        return complex(grid_integrate(self.grid, np.sum(np.conj(self.values) * other.values, axis=1)))


@dataclass(frozen=True)
class ScalarWavefunction:
    """One-component complex wavefunction sampled on a grid, shape (n,)."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.grid.n_points,):
            raise InvalidArgumentError(
                f"wavefunction values must have shape ({self.grid.n_points},), got {v.shape}"
            )
        object.__setattr__(self, "values", _readonly(v))

    def norm(self) -> float:
        return float(np.sqrt(grid_integrate(self.grid, np.abs(self.values) ** 2)))

    def normalized(self) -> "ScalarWavefunction":
        n = self.norm()
        if n == 0.0:
            raise InvalidArgumentError("cannot normalize the zero field")
        return ScalarWavefunction(self.grid, self.values / n)

    def inner(self, other: "ScalarWavefunction") -> complex:
        if other.grid != self.grid:
            raise InvalidArgumentError("inner product requires a shared grid")
        return complex(grid_integrate(self.grid, np.conj(self.values) * other.values))


@dataclass(frozen=True)
class PotentialMatrix:
    """Real coefficient fields of the hermitian 2x2 potential matrix.

    The matrix assembles, in the tagged representation, as

        v_t * I + v_e * sigma_kinetic + v_p * sigma_y + v_s * sigma_mass,

    i.e. v_t and v_e are the time/space components of the 2-vector potential,
    v_s is the scalar potential and v_p the pseudoscalar one.  In KINETIC_X
    this is literally (I, sigma_x, sigma_y, sigma_z).  Converting between
    representations keeps v_t, v_e, v_s and flips the sign of v_p (sigma_y
    is odd under the X<->Z rotation).  This package works in the gauge
    v_e == 0.

    Coefficients are arrays broadcastable against each other; synthesis
    routines produce shape (n_times, n_points).
    """

    v_t: np.ndarray
    v_e: np.ndarray
    v_p: np.ndarray
    v_s: np.ndarray
    representation: Representation = Representation.KINETIC_Z

    def __post_init__(self) -> None:
        for name in ("v_t", "v_e", "v_p", "v_s"):
            raw = np.asarray(getattr(self, name))
            if np.iscomplexobj(raw):
                if np.max(np.abs(raw.imag), initial=0.0) > 0.0:
                    raise InvalidArgumentError(f"{name} must be real (hermiticity)")
                raw = raw.real
            object.__setattr__(self, name, _readonly(raw.astype(float)))

    def in_representation(self, rep: Representation) -> "PotentialMatrix":
        if rep is self.representation:
            return self
        return PotentialMatrix(self.v_t, self.v_e, -self.v_p, self.v_s, rep)

    def as_matrices(self) -> np.ndarray:
        """Assemble the stack of 2x2 hermitian matrices (broadcast shape + (2, 2))."""
        rep = self.representation
        shape = np.broadcast_shapes(
            self.v_t.shape, self.v_e.shape, self.v_p.shape, self.v_s.shape
        )
        out = np.zeros(shape + (2, 2), dtype=complex)
        out += self.v_t[..., None, None] * IDENTITY_2
        out += self.v_e[..., None, None] * rep.sigma_kinetic
        out += self.v_p[..., None, None] * SIGMA_Y
        out += self.v_s[..., None, None] * rep.sigma_mass
        return out

    def max_abs(self) -> float:
        return float(
            max(
                np.max(np.abs(self.v_t), initial=0.0),
                np.max(np.abs(self.v_e), initial=0.0),
                np.max(np.abs(self.v_p), initial=0.0),
                np.max(np.abs(self.v_s), initial=0.0),
            )
        )
