"""conformal-kernel: exact symbolic verification of conformal algebras with
lambda-operations -- axiom suites, coefficient algebras, the cohomology
bicomplex, and truncated deformation theory, all over exact rationals."""

from .symcore import (
    DPoly,
    GenIndex,
    LambdaPoly,
    ModElement,
    Q,
    SpectralVar,
    d_apply,
    gen,
    gen_binom,
)
from .algebra import (
    CheckReport,
    ConformalAlgebra,
    GenFamily,
    LinearRule,
    PreconditionFailed,
    StructureRule,
    UnboundedAnsatz,
    WindowEscape,
    check_associativity,
    check_commutativity,
    check_jacobi,
    check_leibniz,
    check_poisson,
    check_skew_symmetry,
    check_suite,
    commutator_bracket,
    eval_op,
    nth_product_table,
    suite_fails,
    suite_passes,
)
from .constructors import (
    ConformalModule,
    OrdinaryAlgebra,
    adjoint_module,
    check_derivation,
    check_gd,
    check_module,
    check_pgd,
    current_algebra,
    direct_sum,
    from_derivation,
    quadratic_from_pgd,
    semidirect_product,
)
from .coeff import (
    CoeffAlgebra,
    CoeffElement,
    ModeWindow,
    annihilation_relations_check,
    binomial_identity_check,
    check_coeff_poisson,
    closed_form_comparison,
    coeff_bracket,
    coeff_derivation_check,
    coeff_normalize,
    coeff_product,
)
from .cohomology import (
    AnsatzBounds,
    Cochain,
    bilinear_cochain,
    check_action_module_laws,
    check_complex_identities,
    coboundary_solve,
    cochain_basis,
    d_ce,
    d_ce_degree0,
    d_h,
    d_total,
    hochschild_module_action,
    is_cocycle,
    linear_cochain,
    random_cochain,
    zero_cochain,
)
from .deform import (
    DeformationSeries,
    check_n_deformation,
    equivalence_check,
    extend_deformation,
    infinitesimal_is_cocycle,
    linear_deformation_check,
    nijenhuis_check,
    nijenhuis_deform,
    obstruction,
    semiclassical_limit,
    trivial_deformation_check,
)
from .manifest import Manifest, ManifestError, parse, parse_file
