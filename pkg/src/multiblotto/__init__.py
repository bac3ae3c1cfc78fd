"""Exact equilibrium samplers for multiplayer Colonel Blotto games."""

from .boolean import (
    BooleanCoupling,
    BooleanEquilibrium,
    BooleanSampler,
    budget_fn,
    large_k_limit_probs,
    marginal_utility,
    mu,
    mu_inverse,
    sample_boolean_coupling,
    solve_equilibrium,
    two_player_pure,
)
from .dispatch import (
    FixedStrategy,
    GameConfig,
    dispatch_sampler,
    draw,
    load_game,
    parse_game,
    run_payoff_tournament,
)
from .errors import BlottoError, NoKnownEquilibrium
from .game import (
    GameSpec,
    Variant,
    boolean_lotto_expected_payoff,
    check_bids,
    payoff,
    validate_game,
)
from .partition import (
    PartitionSampler,
    round_robin_partition,
    sample_partition_equilibrium,
    validate_partition,
)
from .sampling import (
    RngStream,
    beta_power,
    dirichlet_symmetric,
    gamma_small_shape,
    uniform01,
    unit_sphere3,
)
from .sphere import (
    Isometry,
    RotationResult,
    SphereSampler,
    construct_m,
    rotate_pair,
    sample_sphere_equilibrium,
)
from .verify import (
    VerificationReport,
    boolean_exploitability,
    check_budget_as,
    check_isometry,
    check_marginals,
    ks_statistic,
    lotto_deviation_test,
)

__version__ = "0.1.0"
