#!/usr/bin/env python3
"""Regenerate the synthetic street-scene fixture set under tests/fixtures/.

The scene is 64x48 with Cityscapes labelIds: sky above, road below, a
building block on the left, two cars, a pedestrian and a pole. The
saliency map highlights only the right car; the attention pair shifts
mass from the cars onto the building so the attention deltas are
positive. Deterministic by construction.
"""

from pathlib import Path

import numpy as np

from wayclear.rasters import InpaintMask, LabelMap, RgbImage, ScalarMap, encode_raster

SKY, ROAD, BUILDING, CAR, PERSON, POLE = 23, 7, 11, 26, 24, 17

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

H, W = 48, 64

CAR_A = (slice(28, 36), slice(40, 56))  # the salient car
CAR_B = (slice(30, 35), slice(8, 18))  # same class, not salient itself
PERSON_BOX = (slice(26, 34), slice(30, 33))
POLE_BOX = (slice(16, 34), slice(60, 61))
BUILDING_BOX = (slice(8, 34), slice(0, 7))
ROAD_BOX = (slice(34, 48), slice(0, 64))


def build_labels() -> np.ndarray:
    classes = np.full((H, W), SKY, dtype=np.uint8)
    classes[ROAD_BOX] = ROAD
    classes[BUILDING_BOX] = BUILDING
    classes[CAR_A] = CAR
    classes[CAR_B] = CAR
    classes[PERSON_BOX] = PERSON
    classes[POLE_BOX] = POLE
    return classes


def build_image(classes: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    palette = {
        SKY: (0.55, 0.75, 0.95),
        ROAD: (0.35, 0.35, 0.38),
        BUILDING: (0.62, 0.48, 0.36),
        CAR: (0.75, 0.12, 0.12),
        PERSON: (0.15, 0.55, 0.2),
        POLE: (0.4, 0.4, 0.42),
    }
    pixels = np.zeros((3, H, W), dtype=np.float32)
    for cid, color in palette.items():
        where = classes == cid
        for c in range(3):
            pixels[c][where] = color[c]
    shade = np.linspace(0.92, 1.0, H, dtype=np.float32)[None, :, None]
    pixels = pixels * shade + rng.uniform(-0.02, 0.02, pixels.shape).astype(np.float32)
    return np.clip(pixels, 0.0, 1.0).astype(np.float32)


def build_saliency(classes: np.ndarray) -> np.ndarray:
    raw = np.zeros((H, W), dtype=np.uint8)
    raw[classes == SKY] = 20
    raw[classes == ROAD] = 35
    raw[classes == BUILDING] = 90
    raw[CAR_A] = 200  # peak: only this car survives the 0.8*max threshold
    raw[CAR_B] = 120
    raw[PERSON_BOX] = 110
    raw[POLE_BOX] = 80
    return raw


def build_attention(classes: np.ndarray, after: bool) -> np.ndarray:
    raw = np.full((H, W), 25, dtype=np.uint8)
    if after:
        raw[classes == BUILDING] = 180
        raw[classes == CAR] = 30
        raw[PERSON_BOX] = 28
    else:
        raw[classes == BUILDING] = 90
        raw[classes == CAR] = 170
        raw[PERSON_BOX] = 150
    return raw


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(20260810)
    classes = build_labels()
    files = {
        "street.png": encode_raster(RgbImage(pixels=build_image(classes, rng))),
        "street_labels.png": encode_raster(LabelMap(classes=classes)),
        "street_saliency.png": encode_raster(
            ScalarMap(values=build_saliency(classes).astype(np.float32) / np.float32(255))
        ),
        "street_attn_before.png": encode_raster(
            ScalarMap(values=build_attention(classes, after=False).astype(np.float32) / 255)
        ),
        "street_attn_after.png": encode_raster(
            ScalarMap(values=build_attention(classes, after=True).astype(np.float32) / 255)
        ),
        "labels_wrong_size.png": encode_raster(
            LabelMap(classes=np.full((H // 2, W // 2), SKY, dtype=np.uint8))
        ),
    }
    # a small cutout pair for the object-insertion protocol
    cut = np.zeros((3, 6, 6), dtype=np.float32)
    cut[0] = 0.9
    cbits = np.zeros((6, 6), dtype=bool)
    cbits[1:5, 1:5] = True
    files["cutout.png"] = encode_raster(RgbImage(pixels=cut))
    files["cutout_mask.png"] = encode_raster(InpaintMask(bits=cbits))

    for name, data in files.items():
        (OUT / name).write_bytes(data)
        print(f"wrote {OUT / name} ({len(data)} bytes)")


if __name__ == "__main__":
    main()
