"""Paging on access graphs: simulators, exact worst orderings, walk structure."""

from .graph import (
    AccessGraph, GraphError, ParseError, chained_cycles, complete_graph, cycle_graph,
    is_walk, parse_edge_list, parse_graph_spec, parse_sequence, path_graph,
)
from .paging import (
    FIFO, FWF, LFD, LFD_MATCH_LRU, LRU, ContractError, PolicyId, SimulationTrace,
    TraceEvent, conservative_violation, faults, k_phase_decompose, offline_optimum, simulate,
)
from .families import FamilyId, gen_I1_copy, gen_In, gen_Is, gen_Jr, gen_ScriptIn
from .worstorder import (
    InfeasibleMultisetError, RatioPoint, RequestMultiset, SearchConfig, SizeGuardError,
    WorstOrderResult, enumerate_reorderings, rwor_curve, worst_order_exact,
)
from .walkstruct import (
    BlockDecomposition, NormalizationRequired, OverlapWitness, RewriteError, TurnSequence,
    classify_turns, decompose_turns, enforce_long_first_walk, fifo_blocks, find_overlap,
    lru_hits_closed_form, normalize, remove_overlaps, remove_trivial_turns, reorder_blocks,
)

__version__ = "0.1.0"
