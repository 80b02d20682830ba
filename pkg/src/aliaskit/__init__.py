"""Alias tables for weighted random sampling.

Construction is available sequentially (``vose_construct``) and as a
parallel split/pack pipeline (``psa_construct``, ``psa_plus_construct``);
sampling as single draws, batches, and cache-friendly sectioned batches.
Hot kernels run compiled when numba is installed; a pure-numpy fallback is
selected automatically or via the ALIASKIT_BACKEND environment variable.
"""

from .backend import active_backend, set_backend, using_numba
from .model import (
    AliasTable,
    EmptyInput,
    InvalidWeight,
    RngStream,
    SizeMismatch,
    ValidationReport,
    WeightSet,
    make_weight_set,
    rng_uniform,
    validate_table,
)
from .partition import (
    LightHeavyPartition,
    PrepackResult,
    greedy_prepack,
    partition_items,
)
from .seqbuild import vose_construct
from .split import (
    InvalidSectionCount,
    SplitPlan,
    UnsortedInput,
    binary_search_boundary,
    compute_split_plan,
    partial_pary_search,
)
from .pack import (
    PlanInconsistent,
    chunked_pack_section,
    pack_section,
    psa_construct,
    psa_plus_construct,
)
from .sample import (
    InvalidSectionSize,
    SectionAssignment,
    assign_sections,
    assign_subtree,
    sample_batch,
    sample_one,
    sectioned_sample,
)
from .stats import (
    DegenerateBins,
    IndexOutOfRange,
    chi_square_test,
    frequency_counts,
)
from .io import load_table, load_weights, save_table, save_weights
from .weightgen import gen_power_law, gen_uniform

__version__ = "0.1.0"

__all__ = [
    "AliasTable",
    "DegenerateBins",
    "EmptyInput",
    "IndexOutOfRange",
    "InvalidSectionCount",
    "InvalidSectionSize",
    "InvalidWeight",
    "LightHeavyPartition",
    "PlanInconsistent",
    "PrepackResult",
    "RngStream",
    "SectionAssignment",
    "SizeMismatch",
    "SplitPlan",
    "UnsortedInput",
    "ValidationReport",
    "WeightSet",
    "active_backend",
    "assign_sections",
    "assign_subtree",
    "binary_search_boundary",
    "chi_square_test",
    "chunked_pack_section",
    "compute_split_plan",
    "frequency_counts",
    "gen_power_law",
    "gen_uniform",
    "greedy_prepack",
    "load_table",
    "load_weights",
    "make_weight_set",
    "pack_section",
    "partial_pary_search",
    "partition_items",
    "psa_construct",
    "psa_plus_construct",
    "rng_uniform",
    "sample_batch",
    "sample_one",
    "save_table",
    "save_weights",
    "sectioned_sample",
    "set_backend",
    "using_numba",
    "validate_table",
    "vose_construct",
]
