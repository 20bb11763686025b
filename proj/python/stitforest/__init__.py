"""Random tessellation forests: samplers, estimators, bound evaluators."""

try:
    # Installed layout: the extension lives inside the package.
    from ._stitforest import (
        Forest,
        StitForestError,
        __version__,
        c1_bound,
        expected_leaf_count,
        fit,
        sample_mondrian,
        suboptimality_bound,
        zero_cell,
    )
except ImportError:
    # Build-tree layout: the extension sits on PYTHONPATH next to the package.
    from _stitforest import (
        Forest,
        StitForestError,
        __version__,
        c1_bound,
        expected_leaf_count,
        fit,
        sample_mondrian,
        suboptimality_bound,
        zero_cell,
    )

__all__ = [
    "Forest",
    "StitForestError",
    "__version__",
    "c1_bound",
    "expected_leaf_count",
    "fit",
    "sample_mondrian",
    "suboptimality_bound",
    "zero_cell",
]
