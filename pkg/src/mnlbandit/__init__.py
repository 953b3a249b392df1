"""Simulation lab for dynamic assortment selection under multinomial-logit demand."""

from ._version import __version__
from .baselines import EXP3EGConfig, EXP3EGState, ee_select, exp3eg_probs, exp3eg_select, exp3eg_update
from .epochs import EpochRecord, EpochSampleStats, epoch_sample_stats, run_epoch
from .family import CapacityError, FeasibleFamily, argmax_revenue, assortment_score, family_size
from .harness import (
    ExperimentConfig,
    ExperimentResult,
    InstanceSource,
    PolicySpec,
    TrialResult,
    instance_for_trial,
    run_experiment,
    run_trial,
    simulate_policy_epochs,
    summarize,
    trial_stream,
    write_outputs,
)
from .model import (
    NO_PURCHASE,
    MNLInstance,
    as_assortment,
    choice_prob,
    expected_revenue,
    load_instance,
    random_instance,
    sample_choice,
    save_instance,
)
from .policy import (
    AteEstimates,
    FinalEstimates,
    PolicyConfig,
    PolicyState,
    Selection,
    ate_estimates,
    exploration_prob,
    exploration_threshold,
    finalize,
    observe_epoch,
    optimistic_assortment,
    partition_complement,
    plug_in_revenue,
    revenue_estimate,
    select_assortment,
    ucb2_index,
    ucb_index,
)
from .rates import (
    RateFit,
    analyze_summary,
    coverage_check,
    error_slope_target,
    estimation_radius,
    fit_rate,
    pareto_product,
    regret_slope_bound,
)

__all__ = [name for name in dir() if not name.startswith("_")]
