"""Scenario-driven experimentation for time-series prediction.

Combines a main data source with context attributes and collaborative
(neighbouring) sources under configurable test scenarios, evaluates them
across four regression learners, and reports ranked results.
"""

from ._kernels import BACKEND as kernel_backend
from .dataset import (
    DataRepository,
    SourceDataset,
    common_date_index,
    load_dataset,
    load_repository,
    write_dataset,
)
from .gridsearch import WINDOW_GRID, GridResult, ParamGrid, grid_search, preset_grid
from .learners import LearnerConfig, TrainedModel, dump_model, predict, train, train_xy
from .metrics import (
    CorrelationMatrix,
    MetricReport,
    MetricStat,
    absolute_error,
    evaluate,
    pearson_matrix,
    relative_error,
    rmse,
    spearman_rho,
)
from .reporting import (
    ResultStore,
    emit_series,
    error_dispersion_correlation,
    load_store,
    save_store,
    spearman_table,
    summarize,
)
from .runner import (
    EvaluationRecord,
    FailedCell,
    RunConfig,
    cell_seed,
    rerun_cell,
    run_suite,
)
from .scenario import (
    AttributeRef,
    ScenarioSpec,
    ScenarioSuite,
    derive_label,
    generate_presets,
    parse_suite,
    validate_suite,
    write_suite,
)
from .windowing import AssembledTable, WindowedTable, assemble, chronological_split, window

__version__ = "0.1.0"
