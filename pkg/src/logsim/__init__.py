"""Toolkit for discovering, simulating, and evaluating data-driven
simulation models of business processes from timestamped event logs."""

__version__ = "0.1.0"

from .bps_model import (
    BpsModel,
    ResourcePool,
    assemble_bps_model,
    discover_resource_pools,
    extract_activity_durations,
    extract_interarrival,
)
from .distributions import DistributionSpec, fit_distribution, sample
from .eventlog import (
    ColumnMapping,
    ConcurrencyRelation,
    Event,
    EventLog,
    LogStatistics,
    Trace,
    build_log,
    compute_statistics,
    discover_concurrency,
    log_from_rows,
    parse_csv,
    temporal_split,
    write_csv,
)
from .metrics import (
    MetricReport,
    Pairing,
    TimeScale,
    activity_duration_emd,
    bptd,
    cf_distance,
    cfls,
    cycle_time_mae,
    els,
    emd_1d,
    evaluate_logs,
    pair_traces,
)
from .process_model import (
    BranchingProbabilities,
    DirectlyFollowsGraph,
    Node,
    ProcessModel,
    ReplayResult,
    compute_branching_probabilities,
    discover_model,
    enforce_conformance,
    replay_trace,
    sequential_model,
)
from .rng import Rng
from .simulator import SimConfig, SimulationRun, simulate, simulate_detailed

from .experiment import (  # noqa: E402  (depends on optimizer)
    ExperimentConfig,
    render_report,
    run_experiment,
    write_report_files,
)
from .optimizer import (  # noqa: E402
    OptimizationResult,
    SearchSpace,
    TrialResult,
    build_candidate,
    optimize_dds,
)
