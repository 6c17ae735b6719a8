"""gidsolve: group identification solvers, oracles, and CLI workbench."""

from . import errors
from .generators import (
    Rx3cInstance,
    augment_to_exact_partition,
    augment_to_general,
    gen_planted_cgcdi,
    gen_random_profile,
    gen_random_r_profile,
    gen_rx3c,
    gen_rx3c_no,
    has_exact_cover,
    rx3c_to_cgb,
    rx3c_to_cgcai_r,
)
from .instances import (
    AttackInstance,
    Solution,
    Verdict,
    check_witness,
    diagnostics,
    format_instance,
    make_instance,
    parse_instance,
    validate,
)
from .oracle import (
    SearchBudget,
    pqi_nqi_brute,
    solve_bribery_brute,
    solve_control_brute,
    solve_microbribery_brute,
)
from .partial import (
    FlowNetwork,
    PartialQuery,
    answer_query,
    max_flow,
    nqi,
    pqi,
    r_nqi,
    r_pqi_consent_flow,
    r_pqi_general,
)
from .profiles import (
    EvalTrace,
    Profile,
    SocialRule,
    eval,
    format_profile,
    make_profile,
    negate,
    parse_profile,
    qualification_graph,
)
from .solvers import ImmunityVerdict, check_immunity, solve_auto

__all__ = [
    "errors",
    "Rx3cInstance",
    "augment_to_exact_partition",
    "augment_to_general",
    "gen_planted_cgcdi",
    "gen_random_profile",
    "gen_random_r_profile",
    "gen_rx3c",
    "gen_rx3c_no",
    "has_exact_cover",
    "rx3c_to_cgb",
    "rx3c_to_cgcai_r",
    "AttackInstance",
    "Solution",
    "Verdict",
    "check_witness",
    "diagnostics",
    "format_instance",
    "make_instance",
    "parse_instance",
    "validate",
    "SearchBudget",
    "pqi_nqi_brute",
    "solve_bribery_brute",
    "solve_control_brute",
    "solve_microbribery_brute",
    "FlowNetwork",
    "PartialQuery",
    "answer_query",
    "max_flow",
    "nqi",
    "pqi",
    "r_nqi",
    "r_pqi_consent_flow",
    "r_pqi_general",
    "EvalTrace",
    "Profile",
    "SocialRule",
    "eval",
    "format_profile",
    "make_profile",
    "negate",
    "parse_profile",
    "qualification_graph",
    "ImmunityVerdict",
    "check_immunity",
    "solve_auto",
]
