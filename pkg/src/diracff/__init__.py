"""diracff: fast-forward control synthesis and unitary propagation for the
driven (1+1)-dimensional Dirac and Schrodinger equations."""

from .core import (
    BoundaryKind,
    DegenerateEigenpairError,
    DiracFFError,
    DriveProtocol,
    FieldKind,
    GridSpec,
    InvalidArgumentError,
    NodeSingularityError,
    PhysicalParams,
    PotentialMatrix,
    Representation,
    RepresentationMismatchError,
    ResolutionError,
    ScalarWavefunction,
    SpinorField,
    UnderdeterminedSystemError,
    UnsupportedOperationError,
    make_constant_protocol,
    make_sinusoidal_protocol,
    wavenumber_lattice,
)
from .diagnostics import RatioProfile, fidelity, pair_production, ratio_profile
from .eigen import (
    DiracEigenpair,
    SchrodingerEigenpair,
    appendix_linear_eigensystem,
    dirac_eigenspinor_closed_form,
    dirac_eigenspinor_numeric,
    dirac_family,
    schrodinger_eigenstate,
    schrodinger_family,
)
from .fastforward import (
    FastForwardSolution,
    PhaseField,
    closed_form_potential_matrix,
    closed_form_schrodinger_potential,
    dirac_ff_potentials,
    schrodinger_ff_potential,
    solve_phase_ode,
    synthesize_fast_forward,
)
from .propagator import (
    Backend,
    ConvergenceReport,
    EquationFamily,
    EvolutionSpec,
    Trajectory,
    convergence_order,
    mode_amplitudes,
    mode_ode_oracle,
    propagate,
)

__version__ = "0.1.0"
