"""docdegrade: controlled degradation, cluster statistics, and OCR
suspect prediction for bi-level page images."""

__version__ = "0.1.0"

from .cluster import (
    AnalysisDelta,
    ClusterAnalysis,
    Histogram,
    PageFeatures,
    analyze,
    compare,
    features,
    histogram,
)
from .noise import (
    BlobParams,
    CopyNoiseParams,
    DegradationRecipe,
    PixelNoiseParams,
    apply_blobs,
    apply_copy_noise,
    apply_pixel_noise,
    apply_recipe,
    default_recipe,
    recipe_from_json,
    recipe_to_json,
)
from .predict import (
    PageRecord,
    RegressionModel,
    WorkEstimate,
    fit,
    predict_suspects,
    work_cost,
)
from .raster import (
    BLACK,
    WHITE,
    BiLevelImage,
    new_blank,
    read_pbm,
    read_tiff_bilevel,
    write_pbm,
)
from .rng import Rng
from .synthpage import PageSpec, generate

__all__ = [
    "AnalysisDelta",
    "BLACK",
    "BiLevelImage",
    "BlobParams",
    "ClusterAnalysis",
    "CopyNoiseParams",
    "DegradationRecipe",
    "Histogram",
    "PageFeatures",
    "PageRecord",
    "PageSpec",
    "PixelNoiseParams",
    "RegressionModel",
    "Rng",
    "WHITE",
    "WorkEstimate",
    "analyze",
    "apply_blobs",
    "apply_copy_noise",
    "apply_pixel_noise",
    "apply_recipe",
    "compare",
    "default_recipe",
    "features",
    "fit",
    "generate",
    "histogram",
    "new_blank",
    "predict_suspects",
    "read_pbm",
    "read_tiff_bilevel",
    "recipe_from_json",
    "recipe_to_json",
    "work_cost",
    "write_pbm",
]
