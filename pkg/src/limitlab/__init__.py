"""limitlab: exact moments, multiple-sum asymptotics and Monte Carlo
cross-checks for sums of Markov-dependent Bernoulli indicators."""

from .kernels import (
    BranchingKernel,
    DistanceKernel,
    OffspringSchedule,
    PowerKernel,
    RhoKernel,
    ScaleKernel,
    ScaleSpec,
    kernel_branching,
    kernel_distance,
    kernel_power,
    kernel_scale,
)
from .moments import (
    MomentTable,
    composition_coefficient,
    count_moment,
    count_moment_curve,
    geo_limit_moments,
    scaled_moment_curve,
)
from .multisum import (
    AsymptoticPrediction,
    MultiSumResult,
    WeightSequence,
    phi,
    phi_curve,
    predict,
    psi_curve,
    psi_general,
    u_sum,
    u_sum_curve,
)
from .simulate import ReplicateBatch, sim_bpve, sim_gw, sim_levelwalk
from .special import (
    IteratedLogSpec,
    TailSum,
    gamma_fn,
    gamma_moment,
    iterated_log,
    lambda_sigma,
    lambda_weight,
    script_O,
    zeta_tail,
)
from .stats import LimitLaw, ks_distance, moment_zscores, tv_distance_integer

__version__ = "0.1.0"
