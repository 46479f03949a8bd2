"""Tag-tree data selection: tree building, anchoring and greedy subset sampling."""

from ._core import (
    AnchoredRecord,
    Error,
    Instance,
    InputError,
    TagTree,
    __version__,
    ancestry_matrix,
    anchor,
    build_tree,
    composite_score,
    derive_target,
    load_instances,
    normalize_scores,
    propagation_matrix,
    sample,
    stats,
    subset_information,
)

__all__ = [
    "AnchoredRecord",
    "Error",
    "Instance",
    "InputError",
    "TagTree",
    "__version__",
    "ancestry_matrix",
    "anchor",
    "build_tree",
    "composite_score",
    "derive_target",
    "load_instances",
    "normalize_scores",
    "propagation_matrix",
    "sample",
    "stats",
    "subset_information",
]
