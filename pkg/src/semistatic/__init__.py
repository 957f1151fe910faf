"""Exact-rational engine for semi-static hedging on finite filtered markets."""

from .bounds import (
    double_factorial,
    dm2_bound,
    moment_bound,
    multinomial_lhs,
    verify_multinomial_inequality,
)
from .duality import (
    ArbitrageReport,
    DualityReport,
    RobustPriceResult,
    SuperhedgeResult,
    detect_arbitrage,
    robust_price,
    superhedge,
    verify_duality,
)
from .enlargement import (
    AzemaResult,
    CompensatorResult,
    EnlargedModel,
    InformedCompareReport,
    JeulinYorResult,
    SingleJump,
    azema,
    compensator,
    enlarge,
    filtrations_coincide,
    first_move_time,
    informed_compare,
    jeulin_yor,
    predictable_reduction,
)
from .hedging import (
    CompletenessReport,
    HedgingSpan,
    JumpBlock,
    NotReplicable,
    SemiStaticStrategy,
    UnhedgeableDecomposition,
    decompose_unhedgeable,
    hedging_span,
    is_semistatically_complete,
    replicate,
    strategy_payoff,
    terminal_gain,
    verify_jacod_yor,
    zero_dynamic,
)
from .model import (
    FilteredModel,
    Filtration,
    Measure,
    Partition,
    PriceProcess,
    PriorSupport,
    StaticClaim,
    TimeGrid,
    conditional_expectation,
    indicator,
    natural_filtration,
    validate_model,
)
from .polytope import (
    ConstraintSystem,
    VertexSet,
    build_constraints,
    enumerate_extreme_points,
    is_extreme,
    member,
)
from .scenario import Scenario, ScenarioError, load_scenario, parse_scenario
from .tree import (
    AtomicTree,
    NoTree,
    TreeNode,
    birth_time,
    check_theorem_conditions,
    extract_tree,
    is_full,
    sigma_tree_expectation,
    validate_atomic_tree,
)
