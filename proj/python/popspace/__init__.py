"""Matrix p->p norms, predual factorization norms, and l_p polar
decomposition at finite matrix scale."""

from popspace._popspace import (
    Exponent,
    InputError,
    col_matrix_norm,
    counterexample_report,
    entrywise_norm,
    extension_gap,
    factnorm1,
    factnorm1_lower,
    factnorm1_upper,
    factnorm2_upper,
    group_rows,
    is_lp_isometry,
    is_polar_decomposable,
    nuclear_oracle_p2,
    opnorm,
    opnorm_oracle_small,
    polar_decompose,
    projection_constant,
    run_campaign,
    support,
    vec_p_norm,
)

__all__ = [
    "Exponent",
    "InputError",
    "col_matrix_norm",
    "counterexample_report",
    "entrywise_norm",
    "extension_gap",
    "factnorm1",
    "factnorm1_lower",
    "factnorm1_upper",
    "factnorm2_upper",
    "group_rows",
    "is_lp_isometry",
    "is_polar_decomposable",
    "nuclear_oracle_p2",
    "opnorm",
    "opnorm_oracle_small",
    "polar_decompose",
    "projection_constant",
    "run_campaign",
    "support",
    "vec_p_norm",
]
