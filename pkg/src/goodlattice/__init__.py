"""Rank-1 lattice collocation toolkit.

Construction and merit search of good lattices, the standard comparison
samplers, periodization transforms, an integration-error benchmark, and a
small physics-informed Poisson trainer that compares collocation
strategies end to end.
"""

from .lattice import (
    ContinuedFraction,
    GeneratingVector,
    LatticePointSet,
    character_sum,
    continued_fraction,
    dual_lattice_contains,
    fibonacci_generating_vector,
    fibonacci_number,
    generate_points,
    min_product_dual,
    zaremba_bracket,
)
from .merit import (
    MeritValue,
    Smoothness,
    bernoulli_polynomial,
    exhaustive_search_2d,
    f_alpha,
    figure_of_merit,
    korobov_search,
    p_alpha_bruteforce,
    p_alpha_exact,
    read_generator_table,
)
from .samplers import SampleBatch, SamplerKind, lhs_points, sample, sobol_points
from .periodization import (
    AxisTransform,
    TransformChain,
    circle_embed,
    dirichlet_mask,
    ic_blend,
    polynomial_transform,
    time_fold,
)
from .bench import (
    BenchRecord,
    Integrand,
    SlopeFit,
    SummaryRow,
    builtin_integrands,
    convergence_statistic,
    default_schedule,
    fit_slope,
    get_integrand,
    lattice_for,
    resolve_kind,
    run_bench,
    summarize,
)
from .pinn import (
    Checkpoint,
    MlpState,
    PoissonProblem,
    SecondOrderJet,
    TrainConfig,
    TrainReport,
    evaluate_jet,
    init_mlp,
    loss_gradient,
    masked_output,
    physics_informed_loss,
    poisson_residual_surrogate,
    relative_error,
    residual,
    train,
)

__version__ = "0.1.0"
