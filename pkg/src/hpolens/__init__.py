"""Analysis engine for hyperparameter-optimization runs.

Loads optimizer output into a canonical run model and computes the analyses
behind an interactive dashboard: incumbent trajectories, Pareto fronts,
forest-based importance and partial dependence, ablation paths, budget
correlations, and 2-D configuration footprints. A FastAPI service exposes
everything over HTTP with an asynchronous, cached job queue.
"""
from .budgets import BudgetCorrelation, budget_correlation, spearman
from .convert import (RunSource, TrialRecord, detect_format, ingest_records,
                      load_tabular, refresh, write_tabular)
from .encoding import (INACTIVE, ConfigEncoder, EncodedMatrix, config_distance,
                       decode_config, decode_value, distance_matrix,
                       encode_config, encode_run, encode_value,
                       random_support_configs)
from .errors import (EmptySelectionError, HpolensError, IncompatibleRunsError,
                     InsufficientDataError, InvalidParamsError, RunValidationError,
                     SchemaError, UnknownNameError)
from .footprint import (FootprintPoint, FootprintResult, SmacofEmbedding,
                        border_configs, compute_footprint, mds_embed)
from .forest import (DEFAULT_FOREST_PARAMS, ForestRegressor, Tree, make_forest,
                     tree_marginal)
from .hyperparams import (AblationPath, AblationStep, ImportanceReport,
                          ParallelCoordsData, PdpCurve, ablation_path, fanova,
                          lpi, parallel_coordinates, pdp)
from .objectives import (ParetoPoint, ParetoResult, Trajectory, cost_over_time,
                         pareto_front)
from .runs import (ALL, HIGHEST, Direction, Objective, Run, RunGroup, Trial,
                   TrialStatus, best_values, group_runs, incumbent,
                   select_trials, status_counts, validate_run)
from .spaces import Condition, ConfigurationSpace, HpKind, Hyperparameter

__version__ = "0.1.0"

__all__ = [
    "ALL", "DEFAULT_FOREST_PARAMS", "HIGHEST", "INACTIVE", "__version__",
    "AblationPath", "AblationStep", "BudgetCorrelation", "Condition",
    "ConfigEncoder", "ConfigurationSpace", "Direction", "EmptySelectionError",
    "EncodedMatrix", "FootprintPoint", "FootprintResult", "ForestRegressor",
    "HpKind", "HpolensError", "Hyperparameter", "ImportanceReport",
    "IncompatibleRunsError", "InsufficientDataError", "InvalidParamsError",
    "Objective", "ParallelCoordsData", "ParetoPoint", "ParetoResult",
    "PdpCurve", "Run", "RunGroup", "RunSource", "RunValidationError",
    "SchemaError", "SmacofEmbedding", "Trajectory", "Trial", "TrialRecord",
    "TrialStatus", "Tree", "UnknownNameError",
    "ablation_path", "best_values", "border_configs", "budget_correlation",
    "compute_footprint", "config_distance", "cost_over_time", "decode_config",
    "decode_value", "detect_format", "distance_matrix", "encode_config",
    "encode_run", "encode_value", "fanova", "group_runs", "incumbent",
    "ingest_records", "load_tabular", "lpi", "make_forest", "mds_embed",
    "parallel_coordinates", "pareto_front", "pdp", "random_support_configs",
    "refresh", "select_trials", "spearman", "status_counts", "tree_marginal",
    "validate_run", "write_tabular",
]
