"""Dominance move (DoM) between sets of objective vectors.

The dominance move of P onto Q is the least total Manhattan movement of the
points of P after which every point of Q is weakly dominated. It is computed
exactly by subset dynamic programming, by an inward-neighbour clustering for
two objectives, or through a mixed-integer model handed to an external solver.
"""

from .core import (
    CsvFormatError,
    PointSet,
    PrefilterOutcome,
    Translation,
    dominates,
    minmax_normalize,
    nondominated_filter,
    nondominated_indices,
    prefilter_pair,
    read_csv,
    translate_nonnegative,
    weakly_leq,
    write_csv,
)
from .errors import BackendError, DomError, InvalidInputError, VerificationError
from .exact2d import dom_2d, inward_neighbor, move_distance
from .harness import (
    ReportDocument,
    RunSeries,
    build_report,
    correlate,
    joint_reference,
    running_matrix,
)
from .indicators import (
    CorrelationResult,
    IndicatorRow,
    additive_epsilon,
    hypervolume,
    igd_plus,
    pearson,
)
from .mip_model import DomMipModel, build_model, emit_lp, model_size
from .solver import (
    DomSolution,
    SolveOptions,
    SolveStatus,
    cover_cost,
    dom,
    highs_command,
    reconstruct_solution,
    solve_dp_exact,
    solve_external,
)

__version__ = "0.1.0"
