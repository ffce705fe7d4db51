import json

import numpy as np
import pytest

from wayclear.errors import WeightsError
from wayclear.generator import (
    generator_forward,
    load_weights,
    random_generator_weights,
    save_weights,
)
from wayclear.rasters import InpaintMask, RgbImage


@pytest.fixture(scope="module")
def toy_weights():
    return random_generator_weights(base_width=8, global_ratio=0.5, seed=42)


def random_image(rng, h, w) -> RgbImage:
    return RgbImage(pixels=rng.random((3, h, w)).astype(np.float32))


class TestForward:
    def test_empty_mask_returns_input_exactly(self, toy_weights, rng):
        img = random_image(rng, 32, 32)
        mask = InpaintMask(bits=np.zeros((32, 32), dtype=bool))
        out = generator_forward(img, mask, toy_weights)
        assert np.array_equal(out.pixels, img.pixels)

    def test_output_shape_and_unmasked_bits(self, toy_weights, rng):
        img = random_image(rng, 64, 64)
        bits = rng.random((64, 64)) < 0.2
        out = generator_forward(img, InpaintMask(bits=bits), toy_weights)
        assert out.pixels.shape == (3, 64, 64)
        assert np.array_equal(out.pixels[:, ~bits], img.pixels[:, ~bits])

    def test_single_masked_pixel_only_that_pixel_changes(self, toy_weights, rng):
        img = random_image(rng, 64, 64)
        bits = np.zeros((64, 64), dtype=bool)
        bits[20, 33] = True
        out = generator_forward(img, InpaintMask(bits=bits), toy_weights)
        diff = np.abs(out.pixels - img.pixels).max(axis=0)
        assert diff[~bits].max() == 0.0

    def test_output_clamped_to_unit_range(self, toy_weights, rng):
        img = random_image(rng, 32, 32)
        bits = rng.random((32, 32)) < 0.5
        out = generator_forward(img, InpaintMask(bits=bits), toy_weights)
        assert out.pixels.min() >= 0.0 and out.pixels.max() <= 1.0

    def test_non_multiple_of_8_sizes_pad_and_crop(self, toy_weights, rng):
        img = random_image(rng, 30, 43)
        bits = rng.random((30, 43)) < 0.2
        out = generator_forward(img, InpaintMask(bits=bits), toy_weights)
        assert out.pixels.shape == (3, 30, 43)
        assert np.array_equal(out.pixels[:, ~bits], img.pixels[:, ~bits])


class TestContainer:
    def test_roundtrip_preserves_inference(self, toy_weights, rng):
        manifest, blob = save_weights(toy_weights)
        loaded = load_weights(manifest, blob)
        img = random_image(rng, 24, 24)
        bits = rng.random((24, 24)) < 0.3
        a = generator_forward(img, InpaintMask(bits=bits), toy_weights)
        b = generator_forward(img, InpaintMask(bits=bits), loaded)
        assert np.array_equal(a.pixels, b.pixels)

    def test_block_count_validated(self, toy_weights):
        manifest, blob = save_weights(toy_weights)
        doc = json.loads(manifest)
        doc["tensors"] = [t for t in doc["tensors"] if not t["name"].startswith("block.7.")]
        with pytest.raises(WeightsError, match="block 7"):
            load_weights(json.dumps(doc).encode(), blob)

    def test_missing_tensor_named_in_error(self, toy_weights):
        manifest, blob = save_weights(toy_weights)
        doc = json.loads(manifest)
        doc["tensors"] = [t for t in doc["tensors"] if t["name"] != "head.bias"]
        with pytest.raises(WeightsError, match="head.bias"):
            load_weights(json.dumps(doc).encode(), blob)

    def test_truncated_blob_rejected(self, toy_weights):
        manifest, blob = save_weights(toy_weights)
        with pytest.raises(WeightsError, match="blob"):
            load_weights(manifest, blob[:-4])

    def test_manifest_garbage_rejected(self):
        with pytest.raises(WeightsError):
            load_weights(b"{not json", b"")

    def test_random_init_is_seed_deterministic(self):
        a = random_generator_weights(base_width=8, seed=7)
        b = random_generator_weights(base_width=8, seed=7)
        assert np.array_equal(a.stem[0].kernel, b.stem[0].kernel)
        assert np.array_equal(a.blocks[17].spectral_kernel, b.blocks[17].spectral_kernel)
