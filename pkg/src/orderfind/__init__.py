"""Simulation laboratory for classical black-box order-finding."""

from .adversary import AdversaryState, evasive_threshold
from .chain import Chain, consistent_orders, eliminated_bound
from .errors import (
    BudgetExhausted,
    CapacityError,
    ConfigError,
    EmptyWindowError,
    InconsistencyError,
    OrderFindingError,
    ResourceError,
)
from .numbertheory import (
    PrimeWindow,
    check_lemma4,
    check_lemma7,
    divisors_in_window,
    order_divides,
    primes_in,
    set_R,
    set_R_prime,
)
from .oracle import (
    BlackBoxOracle,
    CycleIndexedPermutation,
    ModularPermutation,
    OracleParams,
    QueryTranscript,
    TwoCyclePermutation,
    build_modular,
    build_two_cycle,
    order_of,
)
from .sampler import LazySampler, eager_build, failure_bound, is_collision
from .solvers import (
    SolverResult,
    birthday_solver,
    choose_split,
    scan_solver,
    splitting_solver,
    verify_order,
)

__version__ = "0.1.0"
