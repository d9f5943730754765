"""tablefold: explore and present large heterogeneous tables headlessly.

The engine keeps a column-oriented dataset immutable and evolves a
TableState (filters, grouping tree, hierarchical sort, aggregation cut,
selection) through versioned mutations; scenes describe the visible
window as resolved primitives and render deterministically to SVG.
"""

from .data import ColumnDef, Dataset, infer_schema, load_dataset
from .engine import (FilterSpec, GroupCriterion, GroupSort, RenderRow,
                     SortCriterion, TableState, compute_grouping, eval_filter,
                     init_state)
from .errors import TableFoldError
from .layout import Layout, LayoutParams, compute_layout, visible_range
from .mapping import MappingSpec, apply_mapping, derive_domain
from .scene import Scene, Theme, build_scene, compact_variant, default_encoding
from .session import Session
from .stats import (BoxStats, CategoryCounts, Histogram, box_stats,
                    category_counts, histogram, matrix_aggregate, stat_measure,
                    text_aggregate)
from .svg import render_svg

__version__ = "0.1.0"

__all__ = [
    "BoxStats", "CategoryCounts", "ColumnDef", "Dataset", "FilterSpec",
    "GroupCriterion", "GroupSort", "Histogram", "Layout", "LayoutParams",
    "MappingSpec", "RenderRow", "Scene", "Session", "SortCriterion",
    "TableFoldError", "TableState", "Theme", "apply_mapping", "box_stats",
    "build_scene", "category_counts", "compact_variant", "compute_grouping",
    "compute_layout", "default_encoding", "derive_domain", "eval_filter",
    "histogram", "infer_schema", "init_state", "load_dataset",
    "matrix_aggregate", "render_svg", "stat_measure", "text_aggregate",
    "visible_range",
]
