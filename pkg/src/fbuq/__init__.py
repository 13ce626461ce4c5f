"""Function-based uncertainty quantification with scenario certificates.

Random-function scenarios are drawn from a basis-expansion prior and made
consistent with noisy data by a minimum-norm projection.  Their pointwise
extrema give uncertainty tubes certified either a priori or from the
observed number of support scenarios, and the same scenarios bound scalar
functionals through order statistics.  A safe Bayesian-optimization loop
uses the tubes to pick parameters.
"""

__version__ = "0.1.0"

from .certificates import (
    Certificate,
    ConfidenceSchedule,
    binomial_tail,
    classic_sample_size,
    kappa_at,
    scalar_sample_size,
    wj_sample_size_for,
    wj_solve_tau,
)
from .domain import BasisFamily, DomainGrid, build_grid, eval_basis, vandermonde
from .functionals import Functional, ScalarBound, eval_functional, scalar_bound
from .safebo import SafeBOConfig, SafeBOState, run_safe_bo
from .sampler import (
    CoeffDistribution,
    Dataset,
    FunctionModel,
    NoiseDistribution,
    ScenarioBatch,
    Stream,
    draw_scenarios,
    project_coeffs,
)
from .tubes import Tube, build_tube, classic_tubes, solve_scenario_program, wait_and_judge_tubes

__all__ = [
    "__version__",
    "Certificate",
    "ConfidenceSchedule",
    "binomial_tail",
    "classic_sample_size",
    "kappa_at",
    "scalar_sample_size",
    "wj_sample_size_for",
    "wj_solve_tau",
    "BasisFamily",
    "DomainGrid",
    "build_grid",
    "eval_basis",
    "vandermonde",
    "Functional",
    "ScalarBound",
    "eval_functional",
    "scalar_bound",
    "SafeBOConfig",
    "SafeBOState",
    "run_safe_bo",
    "CoeffDistribution",
    "Dataset",
    "FunctionModel",
    "NoiseDistribution",
    "ScenarioBatch",
    "Stream",
    "draw_scenarios",
    "project_coeffs",
    "Tube",
    "build_tube",
    "classic_tubes",
    "solve_scenario_program",
    "wait_and_judge_tubes",
]
