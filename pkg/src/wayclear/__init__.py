"""Street-level image decluttering toolkit.

Composes semantic inpainting masks from segmentation and saliency
rasters, removes distracting objects (spectral-convolution generator or
harmonic-diffusion fallback), quantifies the resulting attention shift
and image quality, buckets street geometry, and runs timed wayfinding
studies over an HTTP API.
"""

from .canyon import CanyonClass, classify_canyon, estimate_aspect_ratio
from .diffusion import diffusion_inpaint
from .errors import (
    DimensionMismatchError,
    NotNormalizableError,
    RasterDecodeError,
    StudyError,
    UndefinedMetricError,
    WayclearError,
    WeightsError,
)
from .ffc import FfcBlockWeights, ffc_forward, spectral_transform
from .fourier import irfft2, rfft2
from .generator import (
    GeneratorWeights,
    generator_forward,
    load_weights,
    random_generator_weights,
    save_weights,
)
from .masks import (
    LevelPartition,
    SemanticLevelSpec,
    binarize_saliency,
    classify_levels,
    compose_inpaint_mask,
    default_level_spec,
    dilate_mask,
    load_level_spec,
)
from .metrics import (
    AttentionDelta,
    QualityReport,
    attention_delta,
    compute_quality,
    compute_vd,
    compute_vo,
    insert_objects,
)
from .rasters import (
    InpaintMask,
    LabelMap,
    RgbImage,
    ScalarMap,
    decode_raster,
    encode_raster,
)

__version__ = "0.1.0"
