"""Patch-splicing texture synthesis and example-based style transfer."""

from .errors import (
    CorruptDataError,
    DimensionMismatchError,
    EmptyImageError,
    EmptyListError,
    EmptySurfaceError,
    InvalidConfigError,
    ManifestError,
    OutOfBoundsError,
    QuiltError,
    SourceTooSmallError,
    SpecMismatchError,
    UnsupportedFormatError,
)
from .raster import LuminanceMap, RasterImage, crop, load_image, save_image, to_luminance
from .seam import (
    OverlapKind,
    OverlapSpec,
    apply_seam,
    build_seam_mask,
    min_cost_horizontal_seam,
    min_cost_vertical_seam,
    render_error_surface,
)
from .quilting import (
    CandidateSet,
    GridPlan,
    TransferConfig,
    find_candidates,
    overlap_error,
    plan_grid,
    select_block,
    synthesize,
)
from .transfer import TransferJob, correspondence_error, transfer
from .metrics import (
    GRADIENT_THRESHOLD,
    MetricsRow,
    color_histogram,
    color_histogram_distance,
    structure_score,
    write_metrics_csv,
)
from .experiment import (
    DEFAULT_PATCH_SIZES,
    ComparisonManifest,
    ManifestRow,
    RowFailure,
    SweepSpec,
    emit_montage,
    load_manifest,
    run_comparison,
    run_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "CandidateSet",
    "ComparisonManifest",
    "CorruptDataError",
    "DEFAULT_PATCH_SIZES",
    "DimensionMismatchError",
    "EmptyImageError",
    "EmptyListError",
    "EmptySurfaceError",
    "GRADIENT_THRESHOLD",
    "GridPlan",
    "InvalidConfigError",
    "LuminanceMap",
    "ManifestError",
    "ManifestRow",
    "MetricsRow",
    "OutOfBoundsError",
    "OverlapKind",
    "OverlapSpec",
    "QuiltError",
    "RasterImage",
    "RowFailure",
    "SourceTooSmallError",
    "SpecMismatchError",
    "SweepSpec",
    "TransferConfig",
    "TransferJob",
    "UnsupportedFormatError",
    "apply_seam",
    "build_seam_mask",
    "color_histogram",
    "color_histogram_distance",
    "correspondence_error",
    "crop",
    "emit_montage",
    "find_candidates",
    "load_image",
    "load_manifest",
    "min_cost_horizontal_seam",
    "min_cost_vertical_seam",
    "overlap_error",
    "plan_grid",
    "render_error_surface",
    "run_comparison",
    "run_sweep",
    "save_image",
    "select_block",
    "structure_score",
    "synthesize",
    "to_luminance",
    "transfer",
    "write_metrics_csv",
]
