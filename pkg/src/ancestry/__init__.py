"""Causal ancestor detection in structural vector autoregressive models."""

from .ancestor import (
    AncestorTest,
    EdgePValueTensor,
    TargetAnalysis,
    all_pairs_tests,
    ancestor_test,
    lagged_design,
    nonlinearity,
    target_analysis,
    xi_residuals,
    z_residuals,
)
from .data import ingest_csv, shift_column, write_csv
from .errors import (
    AncestryError,
    InsufficientData,
    InvalidModel,
    InvalidPValue,
    MissingData,
    NumericOverflow,
    ParseError,
    RankDeficient,
    UnstableModel,
)
from .graphs import (
    AncestralGraph,
    graph_from_corrected,
    instantaneous_graph,
    resolve_cycles,
    summary_graph,
    transitive_closure,
)
from .linreg import OlsFit, ols_fit, residualize
from .multiplicity import PValueSet, combine_lags, holm
from .simbench import (
    BenchConfig,
    classify_ancestors,
    random_setup,
    run_benchmark,
    run_graph_benchmark,
)
from .svar import (
    Innovation,
    SvarSpec,
    TimeSeries,
    companion_matrix,
    is_stable,
    reduced_form,
    simulate,
)

__version__ = "0.1.0"
