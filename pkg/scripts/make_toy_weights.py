#!/usr/bin/env python3
"""Regenerate the toy generator container shipped with the package.

The container is small (base width 16) and randomly initialized with a
fixed seed: useful for golden runs and contract tests, not for visual
quality. Real containers use the same manifest+blob format.
"""

from pathlib import Path

from wayclear.generator import random_generator_weights, save_weights

OUT = Path(__file__).resolve().parent.parent / "src" / "wayclear" / "data"


def main() -> None:
    weights = random_generator_weights(
        base_width=16, global_ratio=0.5, activation="relu", seed=20260810
    )
    manifest, blob = save_weights(weights)
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / "toy_generator.json").write_bytes(manifest)
    (OUT / "toy_generator.bin").write_bytes(blob)
    print(f"wrote {OUT / 'toy_generator.json'} ({len(manifest)} bytes)")
    print(f"wrote {OUT / 'toy_generator.bin'} ({len(blob)} bytes)")


if __name__ == "__main__":
    main()
