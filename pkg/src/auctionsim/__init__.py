"""System-level simulator and solvers for auction-based RB/power allocation
in a D2D-enabled two-tier cellular network."""

from . import _kernels
from .auction import (AuctionBroadcast, AuctionParams, AuctionResult, AgentState,
                      benefit, benefit_table, bid_increment, cost_of,
                      equilibrium_check, local_step, merge_cost_and_bidder,
                      run_auction)
from .channel import (LinkBudget, PropagationParams, SeedStreams, Topology,
                      generate_topology, path_loss_d2d, path_loss_macro,
                      path_loss_small, realize_gains, realize_link_budget)
from .channel_io import dump_channel, load_channel
from .config import ConfigError, SimulationConfig, config_from_dict, parse_config
from .experiments import (ComparisonStudy, ConvergenceSample, ConvergenceStudy,
                          ExperimentPlan, ScenarioPoint, empirical_cdf,
                          efficiency, run_comparison_study,
                          run_convergence_study)
from .model import (Allocation, FeasibilityReport, GainTensor, InterferenceSpec,
                    PowerLevelTable, ScenarioDims, aggregated_interference,
                    check_feasibility, noise_power, rate, reference_user, sinr,
                    sum_rate)
from .oracle import (InfeasibleInstance, InstanceTooLarge, OracleResult,
                     exhaustive_optimum, hill_climb, iteration_bound,
                     k_epsilon_gap)
from .units import dbm_to_watts, db_to_linear, linear_to_db, watts_to_dbm

__version__ = "0.1.0"

KERNEL = _kernels.ACTIVE
