""" Startail package """

from .common import (
    Error, ParameterError, BudgetExceededError, LemmaViolation,
    DiagnosticWarning, RangeWarning, Format, Verdict, Scalar,
)
from .const import *
from .config import Constants, RunConfig, make_constants
from .graphs import (
    Graph, Star, StarPacking, sample_gnp, sample_edge_mask, replicate_seed,
    count_stars, star_copies, greedy_star_packing, packing_upper_bound,
    remove_center_incident_edges,
)
from .oracles import (
    Distribution, IndicatorFamily, exact_star_distribution, exact_star_tail,
    exact_bounded_star_count, exact_max_star_packing, exact_zc_tail,
    exact_variance_bruteforce, exact_packing_distribution,
)
from .bounds import (
    BoundReport, GateStatus, RegimeCase, star_mean, star_variance,
    chernoff_phi, phi_inequalities, deviation_scale_M, exponent_const_eps,
    exponent_eps, exponent_psi, zc_tail_bound, bounded_star_tail_bound,
    packing_gate, packing_tail_bound, packing_union_bound,
    pipeline_const_eps, pipeline_general, regime_simplify,
)
from .peeling import (
    PeelingParams, PeelingTrace, EventCertificate, Variant, Method, peel,
    certify_event_T, certify_event_Tplus, verify_sandwich,
)
from .constructions import (
    ClusterCase, ClusterConstruction, build_cluster_graph,
    cluster_lower_bound, disjoint_lower_bound, disjoint_tail_factor,
    appendix_lower_bounds, const_eps_lower_bound,
)
from .iidsum import (
    IidSumModel, per_term_law, iid_exact_distribution,
    iid_peel_and_sandwich, iid_bound_transfer, iid_log_tail_ratios,
)
from .montecarlo import (
    Estimator, McEstimate, GridSpec, mc_tail, sweep, check_monotone,
)
