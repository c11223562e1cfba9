"""Exact formal-series toolkit for singular second-order linear ODEs with
real structure, their Segre families, nonminimal real hypersurfaces, and the
divergent formal equivalences and automorphisms between them.

All identities are verified order-by-order in truncated formal power series
over the Gaussian rationals; floating point only enters the monodromy
integration and the growth diagnostics.
"""

from .coefficients import EXACT, FLOAT, QI, coeff_str, parse_coeff
from .series import (
    BackendMismatch,
    PoleOverflow,
    SeriesError,
    TruncationStarvation,
    TruncSeries1,
    TruncSeries2,
    compose,
    compose2,
    compositional_inverse,
    divide,
    solve_implicit,
)
from .ode import (
    AdmissibleOde,
    GaugeMap,
    RealData,
    RealStructure,
    beta_family,
    check_real_structure,
    conjugate_ode,
    ode_from_real_data,
    pullback_under_gauge,
)
from .segre import (
    Hypersurface,
    NormalForm,
    RealityError,
    RealityTest,
    SegreFamily,
    build_rho,
    conjugated_family,
    dual_family,
    extract_pq,
    inverse_ode_residual,
    profile_residual,
    real_normal_form,
    real_structure_test,
    realty_identity_check,
    solve_psi,
)
from .equiv import (
    FormalSolutionPair,
    ProbeReport,
    build_chi_tau,
    coupled_map_g,
    coupled_residual,
    equivalence_map,
    formal_solutions,
    self_map_probe,
    solution_residuals,
    verify_map_on_hypersurface,
)
from .monodromy import (
    MonodromyReport,
    NumericMonodromy,
    monodromy_report,
    numeric_monodromy,
    residue_analysis,
)
from .autovec import (
    StraighteningCheck,
    VectorFieldRep,
    build_vector_field,
    explicit_model,
    straightening_check,
    tangency_check,
)
from .growth import (
    GrowthReport,
    TerminationReport,
    expected_termination,
    gevrey_estimate,
    termination_detect,
)

__version__ = "0.1.0"
