"""Rectangular partitioning of 2D load matrices.

Rectilinear, jagged, hierarchical and two-phase partitioners over a prefix
sum array, plus the 1D chain engines they are built from.
"""
from ._jit import NUMBA_ENABLED
from .algorithms import ALGORITHMS, Options, UsageError, run_algorithm
from .grid import (InfeasibleError, LoadMatrix, MatrixStats, Partition, PartitionError,
                   PartitionStats, PrefixSum2D, Rect, ResourceLimitError, Violation,
                   build_prefix_sum, evaluate_partition, lower_bounds, rect_load,
                   validate_partition)
from .hierarchical import BisectionTree, HierVariant, hier_opt, hier_rb, hier_relaxed
from .hybrid import (HybridConfig, allocate_processors, expected_li, expected_max_load,
                     hybrid_run, p_candidates, p_sweep)
from .instances import (GenSpec, ParseError, gen_gravity, gen_uniform, generate, read_matrix,
                        read_partition, write_matrix, write_partition)
from .jagged import (JaggedPartition, Orientation, jag_m_alloc, jag_m_heur, jag_m_heur_probe,
                     jag_m_opt, jag_m_probe, jag_pq_heur, jag_pq_opt_dp, jag_pq_opt_nicol)
from .oned import (Cuts1D, FunctionWorkload, MultiCuts, PrefixWorkload, Workload1D, direct_cut,
                   dp_optimal_1d, nicol_plus, nicol_plus_multi, probe, probe_multi,
                   recursive_bisection_1d, workload_from_columns, workload_from_rows)
from .rectilinear import RectilinearPartition, rect_nicol, rect_uniform

__version__ = "0.1.0"
