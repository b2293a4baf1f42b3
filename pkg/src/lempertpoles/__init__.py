"""Lempert and Green functions with multi-point poles on plane domains."""

from .complex_kernel import (
    BlaschkeDisc,
    MoebiusTransform,
    PickProblem,
    blaschke_eval,
    moebius,
    moebius_apply,
    pick_feasible,
    pseudo_hyperbolic,
    solve_node_quadratic,
)
from .disc_domain import EvalResult, PoleSet, green_disc, lempert_disc, lempert_disc_N
from .covering_domains import (
    CoverMap,
    PlaneDomain,
    build_cover,
    find_pole_with_value,
    green_plane,
    lempert_N_plane,
    lempert_poleset_plane,
    parse_domain,
    preimage_moduli,
)
from .interpolation import Lemma4Problem, Lemma4Solution, curves_gh, lemma4_solve, theorem5_certificate
from .node_optimizer import NodeConfig, OptimizerSettings, bidisc_lempert, mixed_product_upper
from .product_engine import (
    BoundsReport,
    ProductInstance,
    corollary8_sample,
    prop9_extend,
    prop10_construct,
    prop11_construct,
    theorem5_bounds,
    theorem7_decide,
)

__all__ = [
    "BoundsReport",
    "NodeConfig",
    "OptimizerSettings",
    "ProductInstance",
    "bidisc_lempert",
    "corollary8_sample",
    "mixed_product_upper",
    "prop9_extend",
    "prop10_construct",
    "prop11_construct",
    "theorem5_bounds",
    "theorem7_decide",
    "BlaschkeDisc",
    "CoverMap",
    "EvalResult",
    "Lemma4Problem",
    "Lemma4Solution",
    "MoebiusTransform",
    "PickProblem",
    "PlaneDomain",
    "PoleSet",
    "blaschke_eval",
    "build_cover",
    "curves_gh",
    "find_pole_with_value",
    "green_disc",
    "green_plane",
    "lempert_N_plane",
    "lempert_disc",
    "lempert_disc_N",
    "lempert_poleset_plane",
    "lemma4_solve",
    "moebius",
    "moebius_apply",
    "parse_domain",
    "pick_feasible",
    "preimage_moduli",
    "pseudo_hyperbolic",
    "solve_node_quadratic",
    "theorem5_certificate",
]

__version__ = "0.1.0"
