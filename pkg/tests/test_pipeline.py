import json

import numpy as np
import pytest

from wayclear.errors import DimensionMismatchError, WeightsError
from wayclear.generator import toy_weights_path
from wayclear.pipeline import PipelineConfig, inpaint_with_mask, run_pipeline
from wayclear.rasters import InpaintMask, LabelMap, RgbImage, ScalarMap

SKY, CAR = 23, 26


def inputs(rng, h=16, w=24, label=SKY):
    image = RgbImage(pixels=rng.random((3, h, w)).astype(np.float32))
    labels = LabelMap(classes=np.full((h, w), label, dtype=np.uint8))
    saliency = ScalarMap(values=rng.random((h, w)).astype(np.float32))
    return image, labels, saliency


def test_all_neutral_labels_is_a_noop(rng):
    image, labels, saliency = inputs(rng)
    result = run_pipeline(PipelineConfig(), image, labels, saliency)
    assert not result.mask.bits.any()
    assert np.array_equal(result.output.pixels, image.pixels)
    assert result.record["no_op"] is True
    assert result.record["engine"] == "none"
    assert result.record["l1"] == 0.0


def test_salient_car_is_masked_and_inpainted(rng):
    image, labels, saliency = inputs(rng)
    labels.classes[4:8, 4:10] = CAR
    values = np.zeros(labels.classes.shape, dtype=np.float32)
    values[5, 5] = 1.0
    result = run_pipeline(
        PipelineConfig(diffusion_tol=1e-6), image, labels, ScalarMap(values=values)
    )
    assert np.array_equal(result.mask.bits, labels.classes == CAR)
    assert result.record["engine"] == "diffusion"
    outside = ~result.mask.bits
    assert np.array_equal(result.output.pixels[:, outside], image.pixels[:, outside])


def test_generator_engine_selected_when_weights_configured(rng):
    image, labels, saliency = inputs(rng)
    labels.classes[4:8, 4:10] = CAR
    config = PipelineConfig(weights_path=toy_weights_path())
    values = np.zeros(labels.classes.shape, dtype=np.float32)
    values[5, 5] = 1.0
    result = run_pipeline(config, image, labels, ScalarMap(values=values))
    assert result.record["engine"] == "generator"


def test_fallback_disabled_raises(rng):
    image, labels, saliency = inputs(rng)
    labels.classes[4:8, 4:10] = CAR
    values = np.zeros(labels.classes.shape, dtype=np.float32)
    values[5, 5] = 1.0
    with pytest.raises(WeightsError):
        run_pipeline(
            PipelineConfig(allow_fallback=False), image, labels, ScalarMap(values=values)
        )


def test_dimension_mismatch_detected(rng):
    image, labels, _ = inputs(rng)
    saliency = ScalarMap(values=rng.random((8, 8)).astype(np.float32))
    with pytest.raises(DimensionMismatchError):
        run_pipeline(PipelineConfig(), image, labels, saliency)


def test_attention_maps_must_come_in_pairs(rng):
    image, labels, saliency = inputs(rng)
    with pytest.raises(ValueError, match="pair"):
        run_pipeline(PipelineConfig(), image, labels, saliency, attention_before=saliency)


def test_config_validates_gamma_and_radius():
    with pytest.raises(ValueError):
        PipelineConfig(gamma=0.0)
    with pytest.raises(ValueError):
        PipelineConfig(dilation_radius=-2)


def test_dilation_grows_the_mask(rng):
    image, labels, _ = inputs(rng)
    labels.classes[6:8, 6:8] = CAR
    values = np.zeros(labels.classes.shape, dtype=np.float32)
    values[6, 6] = 1.0
    plain = run_pipeline(PipelineConfig(), image, labels, ScalarMap(values=values))
    fat = run_pipeline(
        PipelineConfig(dilation_radius=1), image, labels, ScalarMap(values=values)
    )
    assert fat.mask.count() > plain.mask.count()
    assert np.all(fat.mask.bits >= plain.mask.bits)


def test_inpaint_with_mask_record_is_json_serializable(rng):
    image, _, _ = inputs(rng)
    bits = np.zeros((16, 24), dtype=bool)
    bits[3:6, 3:6] = True
    result = inpaint_with_mask(PipelineConfig(), image, InpaintMask(bits=bits))
    parsed = json.loads(json.dumps(result.record))
    assert parsed["mask_pixels"] == 9
