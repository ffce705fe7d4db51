"""End-to-end decluttering pipeline over raster files.

Stages: binarize saliency -> classify label map into semantic levels ->
compose the inpainting mask (optionally dilated) -> inpaint (generator
weights or the diffusion fallback) -> composite. Emits one JSON metrics
record per image; when pre/post attention maps are supplied the record
also carries the attention deltas (interest region = building pixels,
distracting region = the composed mask, i.e. exactly what was edited).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

from .diffusion import diffusion_inpaint
from .errors import UndefinedMetricError, WeightsError
from .generator import GeneratorWeights, generator_forward, load_weights
from .masks import (
    SemanticLevelSpec,
    binarize_saliency,
    classify_levels,
    compose_inpaint_mask,
    default_level_spec,
    dilate_mask,
    load_level_spec,
)
from .metrics import compute_quality, compute_vd, compute_vo
from .rasters import (
    InpaintMask,
    LabelMap,
    RgbImage,
    ScalarMap,
    require_same_shape,
)

__all__ = [
    "PipelineConfig",
    "PipelineResult",
    "run_pipeline",
    "inpaint_with_mask",
    "load_generator_weights",
]

DATA_ROOT_ENV = "WAYCLEAR_DATA_ROOT"


@dataclass
class PipelineConfig:
    gamma: float = 0.8
    dilation_radius: int = 0
    level_spec_path: Path | None = None  # None -> packaged Cityscapes spec
    weights_path: Path | None = None  # None -> diffusion fallback (if allowed)
    allow_fallback: bool = True
    diffusion_tol: float = 1e-6
    diffusion_max_iters: int = 20000
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in (0, 1], got {self.gamma}")
        if self.dilation_radius < 0:
            raise ValueError("dilation radius must be >= 0")

    def level_spec(self) -> SemanticLevelSpec:
        if self.level_spec_path is None:
            return default_level_spec()
        return load_level_spec(resolve_data_path(self.level_spec_path))


def resolve_data_path(path: str | Path) -> Path:
    """Resolve a path against WAYCLEAR_DATA_ROOT when set and relative."""
    path = Path(path)
    root = os.environ.get(DATA_ROOT_ENV)
    if root and not path.is_absolute():
        return Path(root) / path
    return path


def load_generator_weights(weights_path: str | Path) -> GeneratorWeights:
    """Load a manifest+blob container given its manifest path or directory."""
    path = resolve_data_path(weights_path)
    if path.is_dir():
        manifest_path = path / "manifest.json"
    else:
        manifest_path = path
    blob_path = manifest_path.with_suffix(".bin")
    if not manifest_path.is_file() or not blob_path.is_file():
        raise WeightsError(
            f"weight container incomplete: expected {manifest_path} and {blob_path}"
        )
    return load_weights(manifest_path.read_bytes(), blob_path.read_bytes())


@dataclass(frozen=True)
class PipelineResult:
    mask: InpaintMask
    output: RgbImage
    record: dict


def inpaint_with_mask(
    config: PipelineConfig, image: RgbImage, mask: InpaintMask, image_id: str = "image"
) -> PipelineResult:
    """Inpaint a ready-made mask with the configured engine and report quality."""
    require_same_shape(image, mask)
    if not mask.bits.any():
        output = RgbImage(pixels=image.pixels.copy())
        engine = "none"
    elif config.weights_path is not None:
        output = generator_forward(image, mask, load_generator_weights(config.weights_path))
        engine = "generator"
    elif config.allow_fallback:
        output = diffusion_inpaint(
            image, mask, tol=config.diffusion_tol, max_iters=config.diffusion_max_iters
        )
        engine = "diffusion"
    else:
        raise WeightsError("no weight container configured and fallback disabled")

    quality = compute_quality(image, output)
    record: dict = {
        "image_id": image_id,
        "l1": quality.l1,
        "psnr_db": quality.psnr_db,
        "ssim": quality.ssim,
        "v_o": None,
        "v_d": None,
        "mask_pixels": mask.count(),
        "engine": engine,
        "no_op": not mask.bits.any(),
    }
    return PipelineResult(mask=mask, output=output, record=record)


def run_pipeline(
    config: PipelineConfig,
    image: RgbImage,
    labels: LabelMap,
    saliency: ScalarMap,
    attention_before: ScalarMap | None = None,
    attention_after: ScalarMap | None = None,
    image_id: str = "image",
) -> PipelineResult:
    """Run the full mask-compose-inpaint-measure flow on one image."""
    require_same_shape(image, labels, saliency)
    if (attention_before is None) != (attention_after is None):
        raise ValueError("attention maps must be supplied as a before/after pair")
    if attention_before is not None:
        require_same_shape(image, attention_before, attention_after)

    spec = config.level_spec()
    salient = binarize_saliency(saliency, config.gamma)
    partition = classify_levels(labels, spec)
    mask = compose_inpaint_mask(salient, partition)
    if config.dilation_radius > 0:
        mask = dilate_mask(mask, config.dilation_radius)

    result = inpaint_with_mask(config, image, mask, image_id=image_id)
    output, record = result.output, result.record
    if attention_before is not None:
        try:
            record["v_o"] = compute_vo(attention_before, attention_after, partition.building)
        except UndefinedMetricError as exc:
            record["v_o_error"] = str(exc)
        try:
            record["v_d"] = compute_vd(attention_before, attention_after, mask.bits)
        except UndefinedMetricError as exc:
            record["v_d_error"] = str(exc)
    return PipelineResult(mask=mask, output=output, record=record)


def write_atomic(path: str | Path, data: bytes) -> None:
    """Write-then-rename so readers never observe a partial file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def dump_record(record: dict) -> str:
    """Canonical single-line JSON for metrics records (stable across runs)."""
    return json.dumps(record, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
