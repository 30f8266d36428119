"""Instantaneous eigenstates of the driven Schrodinger and Dirac problems.

Both bundled field kinds admit eigenstates of the form

    scalar phase  e^{i gamma(x, alpha)}  x  constant spinor u(ratio),

where the phase absorbs all position dependence and the residual 2x2 problem
is  K * sigma_kinetic + m c^2 * sigma_mass  with a position-independent
kinetic coefficient K.  For the homogeneous field K = c*hbar*kappa + alpha
and gamma = (hbar*kappa + alpha/c) x / hbar: the drive enters through the
state's momentum, i.e. the family is written in the frame in which the
uniform vector potential has been removed (its gauge image with A present
carries the plane wave e^{i kappa x} instead; see the propagator module for
how the two frames are used).  For the linear field K = c*hbar*kappa and
gamma = kappa x - alpha x^2 / (2 hbar c); there the literal vector-potential
operator has these states as exact eigenstates.

The closed-form spinors are exact eigenvectors in the KINETIC_Z
representation; the numeric path diagonalizes the reduced matrix in either
representation.  Eigenpairs record their representation and downstream
algebra refuses to mix them.

Gauge conventions: states are anchored so the first spinor component has
zero phase at x_min.  Families additionally expose the smooth (un-anchored)
phase gamma and its alpha-derivative, which is what the fast-forward
synthesis differentiates; this keeps the synthesized potentials free of the
spatially constant offset the anchor would introduce.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .core import (
    DegenerateEigenpairError,
    FieldKind,
    GridSpec,
    InvalidArgumentError,
    PhysicalParams,
    Representation,
    ScalarWavefunction,
    SpinorField,
    rotate_spinor_values,
)

__all__ = [
    "Branch",
    "DiracEigenpair",
    "SchrodingerEigenpair",
    "DiracEigenFamily",
    "SchrodingerEigenFamily",
    "appendix_component_ratio",
    "appendix_linear_eigensystem",
    "branch_spinor",
    "dirac_eigenspinor_closed_form",
    "dirac_eigenspinor_numeric",
    "dirac_family",
    "reduced_hamiltonian",
    "schrodinger_eigenstate",
    "schrodinger_family",
]

Branch = Literal[1, -1]

_DEGENERACY_REL_TOL = 1e-12


@dataclass(frozen=True)
class SchrodingerEigenpair:
    """Polar-form eigenstate state(x) = beta(x) exp(i gamma(x)) with energy."""

    state: ScalarWavefunction
    energy: float
    beta: np.ndarray
    gamma: np.ndarray


@dataclass(frozen=True)
class DiracEigenpair:
    spinor: SpinorField
    energy: float
    branch: int
    kinetic_ratio: float
    representation: Representation


def _stable_small_component(ratio: float) -> float:
    """sqrt(ratio^2 + 1) - ratio without cancellation for large ratio."""
    if ratio >= 0:
        return 1.0 / (math.hypot(ratio, 1.0) + ratio)
    return math.hypot(ratio, 1.0) - ratio


def _branch_components(ratio: float, branch: int) -> tuple[float, float]:
    """Real eigenvector components of r*sigma_z + sigma_x in KINETIC_Z.

    Positive branch is (1, s)/sqrt(1+s^2) with s = sqrt(r^2+1) - r; the
    negative branch is its orthogonal partner (s, -1)/sqrt(1+s^2).
    """
    s = _stable_small_component(ratio)
    n = math.sqrt(1.0 + s * s)
    if branch == 1:
        return 1.0 / n, s / n
    return s / n, -1.0 / n


def _dcomponents_dratio(ratio: float, branch: int) -> tuple[float, float]:
    """d/d ratio of the components returned by _branch_components."""
    u1, u2 = _branch_components(ratio, 1)
    scale = 1.0 / (2.0 * (1.0 + ratio * ratio))
    if branch == 1:
        return u2 * scale, -u1 * scale
    # negative branch (u2, -u1): derivative follows by the same rotation
    return -u1 * scale, -u2 * scale


def branch_spinor(
    kinetic_coefficient: float,
    rest_energy: float,
    branch: int,
    representation: Representation = Representation.KINETIC_Z,
) -> np.ndarray:
    """Constant eigenvector of K sigma_kinetic + m c^2 sigma_mass.

    Handles the massless limit explicitly; raises when the gap closes.
    """
    if branch not in (1, -1):
        raise InvalidArgumentError(f"branch must be +1 or -1, got {branch}")
    if rest_energy == 0.0:
        if kinetic_coefficient == 0.0:
            raise DegenerateEigenpairError("gap closes at zero mass and zero kinetic term")
        if kinetic_coefficient > 0:
            vec = np.array([1.0, 0.0]) if branch == 1 else np.array([0.0, -1.0])
        else:
            vec = np.array([0.0, 1.0]) if branch == 1 else np.array([1.0, 0.0])
    else:
        u1, u2 = _branch_components(kinetic_coefficient / rest_energy, branch)
        vec = np.array([u1, u2])
    if representation is Representation.KINETIC_X:
        from .core import ROTATION_XZ

        vec = (ROTATION_XZ @ vec.astype(complex)).real
    return vec


class SchrodingerEigenFamily:
    """Closed-form Schrodinger eigenstate family phi(x, alpha) for one kind."""

    def __init__(self, kind: FieldKind, params: PhysicalParams, grid: GridSpec):
        self.kind = kind
        self.params = params
        self.grid = grid

    def gamma(self, alpha: float) -> np.ndarray:
        """Smooth (un-anchored) phase of the eigenstate."""
        p = self.params
        x = self.grid.points
        if self.kind is FieldKind.HOMOGENEOUS:
            return (p.hbar * p.kappa + alpha / p.light_speed) * x / p.hbar
        return p.kappa * x - alpha * x**2 / (2.0 * p.hbar * p.light_speed)

    def dgamma_dalpha(self, alpha: float) -> np.ndarray:
        p = self.params
        x = self.grid.points
        if self.kind is FieldKind.HOMOGENEOUS:
            return x / (p.hbar * p.light_speed)
        return -(x**2) / (2.0 * p.hbar * p.light_speed)

    def dgamma_dx(self, alpha: float) -> np.ndarray:
        p = self.params
        x = self.grid.points
        if self.kind is FieldKind.HOMOGENEOUS:
            return np.full_like(x, p.kappa + alpha / (p.hbar * p.light_speed))
        return p.kappa - alpha * x / (p.hbar * p.light_speed)

    def kinetic_momentum(self, alpha: float) -> float:
        """Position-independent kinetic momentum of the family member.

        This is what the operator (p + A_op/c) evaluates to on the state in
        the frame the family is written in: hbar kappa + alpha/c for the
        homogeneous field (field-removed frame) and hbar kappa for the
        linear field (literal vector-potential frame).
        """
        p = self.params
        if self.kind is FieldKind.HOMOGENEOUS:
            return p.hbar * p.kappa + alpha / p.light_speed
        return p.hbar * p.kappa

    def energy(self, alpha: float) -> float:
        p = self.params
        if p.mass == 0:
            raise InvalidArgumentError("Schrodinger family requires mass > 0")
        return self.kinetic_momentum(alpha) ** 2 / (2.0 * p.mass)

    def beta(self, alpha: float) -> np.ndarray:
        # flat amplitude, normalized over the box
        return np.full(self.grid.n_points, 1.0 / math.sqrt(self.grid.length))

    def eigenpair(self, alpha: float) -> SchrodingerEigenpair:
        gamma = self.gamma(alpha)
        gamma = gamma - gamma[0]  # anchor: zero phase at the first sample
        beta = self.beta(alpha)
        state = ScalarWavefunction(self.grid, beta * np.exp(1j * gamma))
        return SchrodingerEigenpair(state, self.energy(alpha), beta, gamma)


class DiracEigenFamily:
    """Closed-form Dirac eigenspinor family for one field kind.

    Exposes the pieces the fast-forward synthesis needs analytically:
    the smooth phase gamma(x, alpha) and its alpha-derivative, the real
    spinor pair u(alpha) and its alpha-derivative, the reduced kinetic
    coefficient and the branch energies.  Spinors are KINETIC_Z objects;
    ask for another representation explicitly where supported.
    """

    def __init__(self, kind: FieldKind, params: PhysicalParams, grid: GridSpec):
        if params.mass == 0:
            raise DegenerateEigenpairError(
                "massless closed forms are not defined; use the numeric path"
            )
        self.kind = kind
        self.params = params
        self.grid = grid
        self.representation = Representation.KINETIC_Z

    # -- reduced 2x2 problem -------------------------------------------------
    def kinetic_coefficient(self, alpha: float) -> float:
        p = self.params
        if self.kind is FieldKind.HOMOGENEOUS:
            return p.light_speed * p.hbar * p.kappa + alpha
        return p.light_speed * p.hbar * p.kappa

    def kinetic_ratio(self, alpha: float) -> float:
        return self.kinetic_coefficient(alpha) / self.params.rest_energy

    def dratio_dalpha(self, alpha: float) -> float:
        if self.kind is FieldKind.HOMOGENEOUS:
            return 1.0 / self.params.rest_energy
        return 0.0

    def energy(self, alpha: float, branch: int = 1) -> float:
        k = self.kinetic_coefficient(alpha)
        return branch * math.hypot(k, self.params.rest_energy)

    def spinor_components(self, alpha: float, branch: int = 1) -> tuple[float, float]:
        return _branch_components(self.kinetic_ratio(alpha), branch)

    def dcomponents_dalpha(self, alpha: float, branch: int = 1) -> tuple[float, float]:
        d1, d2 = _dcomponents_dratio(self.kinetic_ratio(alpha), branch)
        dr = self.dratio_dalpha(alpha)
        return d1 * dr, d2 * dr

    # -- scalar phase ----------------------------------------------------------
    def plane_wavenumber(self, alpha: float) -> float:
        """Wavenumber of the plane-wave phase (homogeneous kind only)."""
        if self.kind is not FieldKind.HOMOGENEOUS:
            raise InvalidArgumentError(
                "the linear-field family is not a single plane wave"
            )
        p = self.params
        return p.kappa + alpha / (p.hbar * p.light_speed)

    def gamma(self, alpha: float) -> np.ndarray:
        p = self.params
        x = self.grid.points
        if self.kind is FieldKind.HOMOGENEOUS:
            return (p.hbar * p.kappa + alpha / p.light_speed) * x / p.hbar
        return p.kappa * x - alpha * x**2 / (2.0 * p.hbar * p.light_speed)

    def dgamma_dalpha(self, alpha: float) -> np.ndarray:
        p = self.params
        x = self.grid.points
        if self.kind is FieldKind.HOMOGENEOUS:
            return x / (p.hbar * p.light_speed)
        return -(x**2) / (2.0 * p.hbar * p.light_speed)

    def vector_potential(self, alpha: float) -> np.ndarray:
        return np.asarray(self.kind.evaluate(self.grid.points, alpha), dtype=float)

    # -- assembled states -------------------------------------------------------
    def eigenpair(self, alpha: float, branch: int = 1) -> DiracEigenpair:
        u1, u2 = self.spinor_components(alpha, branch)
        gamma = self.gamma(alpha)
        gamma = gamma - gamma[0]  # anchor: first component has zero phase at x_min
        phase = np.exp(1j * gamma)
        values = np.stack([u1 * phase, u2 * phase], axis=1)
        field = SpinorField(self.grid, values).normalized()
        return DiracEigenpair(
            spinor=field,
            energy=self.energy(alpha, branch),
            branch=branch,
            kinetic_ratio=self.kinetic_ratio(alpha),
            representation=self.representation,
        )


def schrodinger_family(
    kind: FieldKind, params: PhysicalParams, grid: GridSpec
) -> SchrodingerEigenFamily:
    return SchrodingerEigenFamily(kind, params, grid)


def dirac_family(
    kind: FieldKind, params: PhysicalParams, grid: GridSpec
) -> DiracEigenFamily:
    return DiracEigenFamily(kind, params, grid)


def _check_grid_for_kind(kind: FieldKind, params: PhysicalParams, grid: GridSpec) -> None:
    if kind is FieldKind.HOMOGENEOUS and grid.is_periodic:
        grid.validate_kappa(params.kappa)


def schrodinger_eigenstate(
    kind: FieldKind, params: PhysicalParams, alpha: float, grid: GridSpec
) -> SchrodingerEigenpair:
    """Closed-form instantaneous Schrodinger eigenstate at control value alpha.

    Homogeneous: plane wave with flat amplitude, phase gradient
    kappa + alpha/(hbar c), energy (hbar kappa + alpha/c)^2 / 2m.
    Linear: flat amplitude, phase kappa x - alpha x^2/(2 hbar c), energy
    (hbar kappa)^2 / 2m.
    """
    _check_grid_for_kind(kind, params, grid)
    return schrodinger_family(kind, params, grid).eigenpair(alpha)


def reduced_hamiltonian(
    kind: FieldKind,
    params: PhysicalParams,
    alpha: float,
    representation: Representation,
) -> np.ndarray:
    """2x2 matrix K sigma_kinetic + m c^2 sigma_mass left after factoring
    the scalar phase of the eigenstate family."""
    if kind is FieldKind.HOMOGENEOUS:
        k = params.light_speed * params.hbar * params.kappa + alpha
    else:
        k = params.light_speed * params.hbar * params.kappa
    return k * representation.sigma_kinetic + params.rest_energy * representation.sigma_mass


def dirac_eigenspinor_closed_form(
    kind: FieldKind,
    params: PhysicalParams,
    alpha: float,
    grid: GridSpec,
    branch: int = 1,
) -> DiracEigenpair:
    """Closed-form instantaneous eigenspinor, KINETIC_Z representation.

    Components are (1, sqrt(r^2+1) - r) (positive branch) with kinetic ratio
    r = (c hbar kappa + alpha)/(m c^2) for the homogeneous field and
    r = hbar kappa/(m c) for the linear field, under the common scalar
    phase of the family.  For mass = 0 the ratio diverges and the numeric
    path supplies the limiting spinors.
    """
    if branch not in (1, -1):
        raise InvalidArgumentError(f"branch must be +1 or -1, got {branch}")
    _check_grid_for_kind(kind, params, grid)
    if params.mass == 0:
        return dirac_eigenspinor_numeric(
            kind, params, alpha, grid, branch, Representation.KINETIC_Z
        )
    return dirac_family(kind, params, grid).eigenpair(alpha, branch)


def dirac_eigenspinor_numeric(
    kind: FieldKind,
    params: PhysicalParams,
    alpha: float,
    grid: GridSpec,
    branch: int = 1,
    representation: Representation = Representation.KINETIC_Z,
) -> DiracEigenpair:
    """Brute-force counterpart of the closed form.

    Factors the known scalar phase of the family, diagonalizes the remaining
    pointwise 2x2 hermitian matrix with numpy, picks the requested branch and
    applies the smooth-gauge anchor (first component real and nonnegative at
    x_min).
    """
    if branch not in (1, -1):
        raise InvalidArgumentError(f"branch must be +1 or -1, got {branch}")
    _check_grid_for_kind(kind, params, grid)
    p = params

    if kind is FieldKind.HOMOGENEOUS:
        k_red = p.light_speed * p.hbar * p.kappa + alpha
        gamma = (p.hbar * p.kappa + alpha / p.light_speed) * grid.points / p.hbar
    else:
        k_red = p.light_speed * p.hbar * p.kappa
        gamma = p.kappa * grid.points - alpha * grid.points**2 / (
            2.0 * p.hbar * p.light_speed
        )
    gamma = gamma - gamma[0]

    h = np.broadcast_to(
        k_red * representation.sigma_kinetic + p.rest_energy * representation.sigma_mass,
        (grid.n_points, 2, 2),
    )
    evals, evecs = np.linalg.eigh(h)  # ascending eigenvalues per point
    gap = float(np.min(evals[:, 1] - evals[:, 0]))
    gap_scale = max(p.rest_energy, abs(k_red), 1e-300)
    if gap < _DEGENERACY_REL_TOL * gap_scale:
        raise DegenerateEigenpairError(
            f"positive/negative branches are degenerate (gap={gap!r})"
        )
    idx = 1 if branch == 1 else 0
    vec = evecs[:, :, idx]  # (n, 2)
    energy = float(np.mean(evals[:, idx]))

    # per-point phase fix: rotate so the larger component is real-positive,
    # which makes the vector field smooth in x before the global anchor
    ref = np.where(np.abs(vec[:, :1]) >= np.abs(vec[:, 1:]), vec[:, :1], vec[:, 1:])
    vec = vec * np.exp(-1j * np.angle(ref))

    values = vec * np.exp(1j * gamma)[:, None]
    anchor = values[0, 0]
    if np.abs(anchor) > 1e-14:
        values = values * np.exp(-1j * np.angle(anchor))
    field = SpinorField(grid, values).normalized()

    if p.mass > 0:
        ratio = k_red / p.rest_energy
    else:
        ratio = math.inf if k_red >= 0 else -math.inf
    return DiracEigenpair(
        spinor=field,
        energy=energy,
        branch=branch,
        kinetic_ratio=ratio,
        representation=representation,
    )


def appendix_component_ratio(params: PhysicalParams) -> float:
    """Second-to-first component ratio of the linear-field eigenspinor in the
    representation whose mass term is diagonal (KINETIC_X):
    hbar kappa c / (sqrt((hbar kappa c)^2 + (m c^2)^2) + m c^2)."""
    k = params.hbar * params.kappa * params.light_speed
    return k / (math.hypot(k, params.rest_energy) + params.rest_energy)


def appendix_linear_eigensystem(
    params: PhysicalParams, alpha: float, grid: GridSpec
) -> tuple[DiracEigenpair, DiracEigenpair]:
    """Linear-field eigensystem built by component elimination.

    Works in the representation with diagonal mass term (KINETIC_X), where
    the component equations decouple into a quadratic eigenvalue relation
    epsilon^2 = (hbar kappa c)^2 + (m c^2)^2 and the component ratio
    `appendix_component_ratio`; the result is rotated into the working
    KINETIC_Z representation.  Equals `dirac_eigenspinor_closed_form` for the
    linear kind up to normalization and a global phase.
    """
    p = params
    x = grid.points
    phase = np.exp(
        1j * (p.kappa * x - alpha * x**2 / (2.0 * p.hbar * p.light_speed))
    )
    k = p.hbar * p.kappa * p.light_speed
    energy = math.hypot(k, p.rest_energy)
    ratio = appendix_component_ratio(p)

    pairs = []
    for branch in (1, -1):
        if branch == 1:
            vec_x = np.array([1.0, ratio])
        else:
            # orthogonal partner of (1, ratio)
            vec_x = np.array([-ratio, 1.0])
        values_x = phase[:, None] * vec_x[None, :]
        values_z = rotate_spinor_values(values_x)
        anchor = values_z[0, 0]
        if np.abs(anchor) > 1e-14:
            values_z = values_z * np.exp(-1j * np.angle(anchor))
        field = SpinorField(grid, values_z).normalized()
        ratio_z = p.hbar * p.kappa / (p.mass * p.light_speed) if p.mass > 0 else math.inf
        pairs.append(
            DiracEigenpair(
                spinor=field,
                energy=branch * energy,
                branch=branch,
                kinetic_ratio=ratio_z,
                representation=Representation.KINETIC_Z,
            )
        )
    return pairs[0], pairs[1]
