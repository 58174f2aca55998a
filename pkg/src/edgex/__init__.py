"""Edge-exchangeable network models for interaction data."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DomainError,
    EdgexError,
    InvalidInputError,
    ParseError,
    RegimeError,
    SamplerError,
    UnsupportedError,
)
from .network import (  # noqa: E402
    EdgeLabeledNetwork,
    GrowthTrace,
    NetworkStats,
    canonicalize,
    project,
    relabel_edges,
    restrict,
    sparsity_statistic,
    stats,
    to_multiplicity,
    to_simple_graph,
)
from .samplers import (  # noqa: E402
    AritySpec,
    FiniteF,
    HollywoodParams,
    Signature,
    VertexComponentsSpec,
    finite_f_simulate,
    hollywood_extend,
    hollywood_simulate,
    joint_log_density,
    signature_estimate,
    spawn_seeds,
    stick_breaking_simulate,
)
from .likelihood import (  # noqa: E402
    FitResult,
    YuleFit,
    fit_mle,
    fit_nu,
    fit_yule,
    hollywood_log_pmf,
    log_ascending_factorial,
    score_alpha,
    score_theta,
)
from .analytics import (  # noqa: E402
    SparsityTestResult,
    alpha_diversity_estimate,
    cross_validate_prediction,
    degree_tail_probability,
    expected_vertices_asymptote,
    growth_trace,
    predict_new_vertex_probability,
    sparsity_curve,
    sparsity_test,
    theoretical_degree_pmf,
)
