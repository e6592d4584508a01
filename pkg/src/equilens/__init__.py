"""Uniform distribution measures for hybrid point sequences.

Digit arithmetic and b-adic integers, Walsh / b-adic / trigonometric
function systems, weighted spectral tests and diaphonies, lattice rule
figures of merit, and exact discrete discrepancies.
"""

from .digits import (
    AdditionSpec,
    DigitVector,
    Partition,
    carry_add,
    enumerate_partitions,
    max_element_order,
    order_profile,
    partition_add,
    verify_group_axioms,
    xor_add,
)
from .discrepancy import (
    BadicInterval,
    IndicatorSystem,
    ResolutionVector,
    choose_resolution,
    discrepancy_spectral_test,
    discrete_discrepancy,
    discrete_star_discrepancy,
    epsilon_bounds,
    exact_extreme_discrepancy_small,
    exact_star_discrepancy_1d,
    interval_from_index,
    local_discrepancy,
    rho_g,
    rho_g_weight,
    v_b,
)
from .errors import CapabilityError, ResourceLimitError
from .lattice import (
    LatticeRuleSpec,
    babenko_zaremba,
    glp_nodes,
    is_dual,
    p_alpha,
    sigma_lattice,
    sloan_kachoyan_check,
)
from .measures import DiaphonyResult, SpectralResult, diaphony, etk_bound, spectral_test, weyl_sum
from .padic import (
    BadicInteger,
    HybridSystemConfig,
    badic_function,
    character,
    exact_pseudoinverse,
    hybrid_eval,
    monna_map,
    monna_pseudoinverse,
    radical_inverse,
    regular_digits,
    trig,
    walsh,
)
from .points import PointSet
from .sequences import GoodLatticePoint, Halton, Hybrid, Kronecker, PointFile, load_points, parse_sequence, point_at
from .weights import WeightSpec, builtin_weights, digit_weight, euclidean_weight, hybrid_weight, r_weight

__version__ = "0.1.0"
