"""Finite-scale laboratory for almost chains of sets and their extension operators."""

from .adjust import (
    AdjustmentReport,
    InsertionReceipt,
    SunflowerDecomposition,
    SunflowerNotFoundError,
    adjust_family,
    compatibility_witness,
    conditions_compatible,
    delta_system_extract,
    insert_point,
    interpolate_gap,
    merge_conditions,
)
from .core import (
    AlternationWitness,
    ChainFamily,
    ChainWitness,
    Condition,
    DefectReport,
    GroundSet,
    IndexValue,
    InputError,
    SetBits,
    alternation_witness,
    chain_defect_set,
    chain_witness,
    defect,
    family_from_text,
    family_to_text,
    flip_count,
    is_barely_alternating,
    is_chain,
    membership_trace,
    validate_almost_chain,
)
from .generators import (
    BitIndex,
    DyadicGround,
    from_sign_matrix,
    initial_segment_chain,
    marciszewski_family,
    perturbed_chain,
)
from .lineop import (
    ExtendedFunction,
    FunctionOnLine,
    HarnessReport,
    InconsistencyError,
    LineModel,
    TripleTable,
    apply_operator,
    compute_triples,
    continuity_harness,
    limit_eval_point,
    no_fourth_flip_check,
    operator_norm,
)

__all__ = [
    "AdjustmentReport",
    "AlternationWitness",
    "BitIndex",
    "ChainFamily",
    "ChainWitness",
    "Condition",
    "DefectReport",
    "DyadicGround",
    "ExtendedFunction",
    "FunctionOnLine",
    "GroundSet",
    "HarnessReport",
    "InconsistencyError",
    "IndexValue",
    "InputError",
    "InsertionReceipt",
    "LineModel",
    "SetBits",
    "SunflowerDecomposition",
    "SunflowerNotFoundError",
    "TripleTable",
    "adjust_family",
    "alternation_witness",
    "apply_operator",
    "chain_defect_set",
    "chain_witness",
    "compatibility_witness",
    "compute_triples",
    "conditions_compatible",
    "continuity_harness",
    "defect",
    "delta_system_extract",
    "family_from_text",
    "family_to_text",
    "flip_count",
    "from_sign_matrix",
    "initial_segment_chain",
    "insert_point",
    "interpolate_gap",
    "is_barely_alternating",
    "is_chain",
    "limit_eval_point",
    "marciszewski_family",
    "membership_trace",
    "merge_conditions",
    "no_fourth_flip_check",
    "operator_norm",
    "perturbed_chain",
    "validate_almost_chain",
]

__version__ = "0.1.0"
