"""Observables: fidelity to the instantaneous target, component-ratio
profiles with a scalar flatness metric, and pair-production probability.

Flatness of a complex ratio r(x) over a window is std(r)/|mean(r)|; the
package convention calls a profile space-independent when this is <= 1e-3.
It is invariant under a global phase of the state, and so is the fidelity.

Pair production is mode-resolved: it is the population of the
negative-energy branch at control value alpha, available for the
homogeneous field where a single plane-wave quantum number labels the mode.
For any normalized state inside that two-dimensional mode space,
fidelity + pair_production = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    FieldKind,
    InvalidArgumentError,
    PhysicalParams,
    Representation,
    RepresentationMismatchError,
    SpinorField,
    UnsupportedOperationError,
)
from .eigen import DiracEigenpair, SchrodingerEigenpair, dirac_eigenspinor_closed_form

__all__ = ["RatioProfile", "fidelity", "pair_production", "ratio_profile"]

_AMPLITUDE_GUARD = 1e-12


@dataclass(frozen=True)
class RatioProfile:
    """Pointwise component ratios state_i(x)/target_i(x) over a window."""

    x: np.ndarray
    ratio_1: np.ndarray
    ratio_2: np.ndarray
    flatness_1: float
    flatness_2: float


def _window_mask(x: np.ndarray, window: tuple[float, float] | None) -> np.ndarray:
    if window is None:
        return np.ones_like(x, dtype=bool)
    lo, hi = window
    if not hi > lo:
        raise InvalidArgumentError(f"empty window [{lo}, {hi}]")
    mask = (x >= lo) & (x <= hi)
    if not np.any(mask):
        raise InvalidArgumentError(f"window [{lo}, {hi}] misses the grid")
    return mask


def _check_representations(state, target) -> None:
    state_rep = getattr(state, "representation", None)
    target_rep = getattr(target, "representation", None)
    if state_rep is not None and target_rep is not None and state_rep is not target_rep:
        raise RepresentationMismatchError(
            f"state is {state_rep} but target is {target_rep}"
        )


def fidelity(
    state,
    target,
    window: tuple[float, float] | None = None,
) -> float:
    """Squared overlap |<target|state>|^2 with the grid quadrature.

    state is a SpinorField/ScalarWavefunction or an eigenpair; target is an
    eigenpair (its representation, when tagged on both sides, must match).
    With a window the overlap and both norms are restricted to it, so the
    result stays in [0, 1] and ignores boundary layers outside the window.
    """
    _check_representations(state, target)
    state_field = getattr(state, "spinor", None) or getattr(state, "state", None) or state
    target_field = getattr(target, "spinor", None) or getattr(target, "state", None) or target
    if state_field.grid != target_field.grid:
        raise InvalidArgumentError("state and target must share a grid")
    sv = np.atleast_2d(state_field.values.T).T
    tv = np.atleast_2d(target_field.values.T).T
    mask = _window_mask(state_field.grid.points, window)
    overlap = np.sum(np.conj(tv[mask]) * sv[mask])
    ns = np.sum(np.abs(sv[mask]) ** 2)
    nt = np.sum(np.abs(tv[mask]) ** 2)
    if ns == 0 or nt == 0:
        raise InvalidArgumentError("zero norm inside the window")
    return float(np.abs(overlap) ** 2 / (ns * nt))


def _flatness(values: np.ndarray) -> float:
    mean = np.mean(values)
    spread = float(np.sqrt(np.mean(np.abs(values - mean) ** 2)))
    denom = abs(mean)
    if denom == 0.0:
        return float("inf") if spread > 0 else 0.0
    return spread / denom


def ratio_profile(
    state: SpinorField,
    target: DiracEigenpair,
    window: tuple[float, float] | None = None,
) -> RatioProfile:
    """Complex ratios state_i/target_i per component with their flatness.

    Only defined where the target amplitude exceeds the 1e-12 guard; a
    target component below the guard anywhere inside the window is an error
    rather than a silently clipped division.
    """
    _check_representations(state, target)
    target_field = target.spinor
    if state.grid != target_field.grid:
        raise InvalidArgumentError("state and target must share a grid")
    x = state.grid.points
    mask = _window_mask(x, window)
    tv = target_field.values[mask]
    guard = _AMPLITUDE_GUARD * float(np.max(np.abs(tv), initial=0.0))
    if np.any(np.abs(tv) <= max(guard, _AMPLITUDE_GUARD)):
        raise InvalidArgumentError(
            "target amplitude falls below the 1e-12 guard inside the window"
        )
    sv = state.values[mask]
    r1 = sv[:, 0] / tv[:, 0]
    r2 = sv[:, 1] / tv[:, 1]
    return RatioProfile(
        x=x[mask],
        ratio_1=r1,
        ratio_2=r2,
        flatness_1=_flatness(r1),
        flatness_2=_flatness(r2),
    )


def pair_production(
    state: SpinorField,
    params: PhysicalParams,
    alpha: float,
    kappa: float | None = None,
    kind: FieldKind = FieldKind.HOMOGENEOUS,
    representation: Representation = Representation.KINETIC_Z,
) -> float:
    """Negative-branch population |<Phi_-(alpha)|state>|^2 at control alpha.

    Mode-resolved, homogeneous field only: for the linear field no single
    plane-wave quantum number labels the mode, so the quantity is
    deliberately unsupported there rather than approximated.
    """
    if kind is not FieldKind.HOMOGENEOUS:
        raise UnsupportedOperationError(
            "pair production is mode-resolved and defined for the homogeneous field only"
        )
    if kappa is not None and kappa != params.kappa:
        params = PhysicalParams(params.mass, params.light_speed, params.hbar, kappa)
    minus = dirac_eigenspinor_closed_form(kind, params, alpha, state.grid, branch=-1)
    if representation is not minus.representation:
        raise RepresentationMismatchError(
            "pair production targets are built in KINETIC_Z; rotate the state instead"
        )
    return float(np.abs(minus.spinor.inner(state)) ** 2)
