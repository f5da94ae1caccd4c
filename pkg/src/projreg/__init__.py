"""Projective regularization of central-force dynamics.

A lifted point transformation turns Kepler- and Manev-type dynamics into a
linear system once the evolution parameter is traded for a Sundman-like or
true-anomaly-like one.  The package provides the transformation and its
verification suite, closed-form unperturbed solutions, and numerical
propagation of the regularized (optionally perturbed) dynamics.
"""

from .errors import (
    ConfigError,
    DomainError,
    DomainExitError,
    IntegrationError,
    NonOscillatoryError,
    RectilinearError,
)
from .euclid import (
    DEFAULT_DIM,
    MEMBERSHIP_TOL,
    AngularMomentum,
    ConfigPoint,
    Dim,
    PhasePoint,
    angular_momentum,
    q_residual,
    sigma_residual,
)
from .projective import (
    InducedMetric,
    JacobianPair,
    cotangent_lift,
    cotangent_unlift,
    induced_metric,
    jacobians,
    passive_coords,
    project_point,
    unproject_point,
)
from .hamiltonian import (
    BracketRates,
    ForceModel,
    ManevParams,
    PhaseTangent,
    TransformedForce,
    bracket_diagnostics,
    eval_H,
    eval_K,
    rhs_t,
    transform_force,
    transform_potential,
)
from .regularized import (
    ParamClock,
    QuasiState,
    QuasiTangent,
    conformal_factor,
    from_quasi,
    rhs_s,
    rhs_tau,
    second_order_residual,
    to_quasi,
)
from .closed_form import (
    LinearSystem,
    cartesian_kepler_state,
    closed_form_state,
    fiber_solution,
    rotation_exponential,
    spatial_solution,
    time_of,
)
from .propagate import (
    Diagnostics,
    IntegratorConfig,
    ProjectedSample,
    ProjectedTrajectory,
    Trajectory,
    TrajectorySample,
    direct_cartesian_rhs,
    integrate,
    lift_initial_conditions,
    project_trajectory,
)

__version__ = "0.1.0"
