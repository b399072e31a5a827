"""narxdd: nonlinear ARX identification across a model-capacity sweep.

The package estimates linear-in-the-parameters NARX models (random Fourier
features, random RBF networks, a linear baseline) and interpolating
regression forests over capacities ranging from far below to far above the
interpolation threshold, measuring one-step-ahead and free-run simulation
errors; this is the machinery behind double-descent generalization curves
for dynamical systems.
"""

from .estimators import (
    ParameterVector,
    SolveReport,
    condition_number,
    gradient_descent,
    min_norm_ls,
    ridge,
    subset_ensemble,
)
from .evaluation import (
    EvalResult,
    FeatureModel,
    ForestModel,
    Predictor,
    free_run_mse,
    one_step_mse,
    param_norm,
)
from .features import (
    DesignMatrix,
    FeatureMap,
    LagSpec,
    RegressorSet,
    apply_map,
    build_regressors,
    new_linear,
    new_rbf,
    new_rff,
)
from .forest import Forest, RegressionTree, fit_forest, fit_tree, predict
from .seeding import derive_seed, rng_from
from .sweep import (
    SweepConfig,
    SweepRecord,
    SweepSummary,
    SummaryRow,
    build_grid,
    data_checksum,
    read_records_csv,
    read_summary_csv,
    run_single,
    run_sweep,
    summarize,
    write_csv,
)
from .sysdata import (
    ChenConfig,
    chen_step,
    Signal,
    TimeSeries,
    gen_filtered_input,
    load_ce8,
    lowpass_taps,
    make_datasets,
    realize_chen,
    simulate_chen,
    write_table,
)

__version__ = "0.1.0"
