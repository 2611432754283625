"""Constrained Willmore tori near the Clifford torus: stability threshold and minimal energy.

Numerics for homogeneous tori in the 3-sphere: Willmore energy, the conformal
class of an immersed torus, second variations on Fourier modes, the threshold
alpha^b, and truncated constrained minimization.
"""

from .conformal import MetricGrid, pi_coordinates, project_conformal_class
from .errors import (
    BracketError,
    CWillmoreError,
    DegenerateImmersionError,
    InfeasibleError,
    InvalidLatticeError,
    NumericalFailure,
    UnsupportedImmersionError,
)
from .functionals import PenalizedForm, evaluate_perturbations
from .immersion import (
    GridImmersion,
    NormalField,
    equivariant_12_torus,
    exp_normal,
    fundamental_forms,
    homogeneous_torus,
    mode_normal_field,
    willmore_energy,
)
from .lattice import Lattice, TeichmullerPoint, modulus_from_lattice, reduce_modulus
from .minimizer import (
    EnergyTable,
    MinimizationProblem,
    MinimizerResult,
    concavity_check,
    directional_profile,
    minimize,
    multiplier_estimate,
    omega_table,
)
from .modes import FourierMode, combine_phases
from .stability import (
    ThresholdResult,
    alpha_threshold,
    d2Pi1_clifford,
    d2Pi2_homogeneous,
    d2W_clifford,
    equivariant_kernel_profile,
    eta_correction,
    g_polynomial,
    g_roots,
    mode_transfer,
    quadratic_form_numeric,
)

__version__ = "0.1.0"
