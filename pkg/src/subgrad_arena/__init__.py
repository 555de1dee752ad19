"""Testbed for first-order non-smooth convex optimization.

Projected subgradient descent, three adversarial hard-instance families
served as value/subgradient oracles (max-coordinate, nested linear max, and
the wall function), an OR-query reduction with a group-testing learner, and
a seeded Monte Carlo harness that checks every measurable tail bound and
structural property the constructions rely on.
"""

from .core import RngStream, project_ball, sample_orthonormal_tuple, sample_unit_vector
from .instances import (
    MaxCoordInstance,
    NemYudInstance,
    OracleAnswer,
    load_instance,
    maxcoord_optimum,
    maxcoord_params,
    maxcoord_subgrad,
    maxcoord_value,
    nemyud_params,
    nemyud_subgrad,
    nemyud_truncated_value,
    nemyud_value,
    recover_z,
    save_instance,
)
from .optimize import GdConfig, GdTrace, projected_subgradient_descent, rescale_problem
from .wall import (
    WallInstance,
    WallParams,
    fwall_subgrad,
    fwall_truncated,
    fwall_value,
    in_cone,
    inner_max_sphere_box,
    p_truncated,
    p_value,
    wall_params,
    wall_value,
    wall_value_truncated,
)
from .groupquery import learn_z_via_or, or_query
from .verify import (
    DisclosureAudit,
    LemmaEstimate,
    adversarial_replay_audit,
    disclosure_audit,
    estimate_argmax_escape,
    estimate_concentration,
    estimate_guess_success,
    oracle_for,
    property_suite,
)

__version__ = "0.1.0"
