"""Inpainting generator: conv stem, residual spectral-conv trunk, conv head.

Inference only. The network takes the image with the hole zeroed out,
stacked with the binary mask, as a 4-channel input; three stride-2 blocks
downsample, 18 residual blocks with local+spectral branches transform,
three nearest-neighbor-upsample+conv blocks restore resolution, and a
final projection emits 3 channels clamped to [0, 1]. The synthesized
pixels are composited back only inside the mask, so pixels outside the
hole are returned bit-identical.

Weights travel in a two-part container: a JSON manifest (architecture
settings plus tensor names/shapes/offsets) and a flat blob of
little-endian float32 values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from . import kernels
from .errors import WeightsError
from .ffc import FfcBlockWeights, ffc_forward, random_block_weights
from .rasters import InpaintMask, RgbImage, require_same_shape

__all__ = [
    "ConvWeights",
    "GeneratorWeights",
    "generator_forward",
    "load_weights",
    "save_weights",
    "random_generator_weights",
    "toy_weights_path",
]

BLOCK_COUNT = 18
INPUT_CHANNELS = 4
MANIFEST_VERSION = 1


@dataclass(frozen=True)
class ConvWeights:
    """One plain convolution: kernel (C_out, C_in, k, k) and bias (C_out,)."""

    kernel: np.ndarray
    bias: np.ndarray

    def __post_init__(self) -> None:
        if self.kernel.ndim != 4:
            raise ValueError("conv kernel must be 4-D")
        if self.kernel.shape[2] != self.kernel.shape[3] or self.kernel.shape[2] % 2 == 0:
            raise ValueError("conv kernel must be square with odd size")
        if self.bias.shape != (self.kernel.shape[0],):
            raise ValueError("conv bias does not match kernel outputs")

    @property
    def in_channels(self) -> int:
        return int(self.kernel.shape[1])

    @property
    def out_channels(self) -> int:
        return int(self.kernel.shape[0])

    @property
    def pad(self) -> int:
        return int(self.kernel.shape[2]) // 2


@dataclass(frozen=True)
class GeneratorWeights:
    stem: tuple[ConvWeights, ConvWeights, ConvWeights]
    blocks: tuple[FfcBlockWeights, ...]
    up: tuple[ConvWeights, ConvWeights, ConvWeights]
    head: ConvWeights
    base_width: int
    global_ratio: float
    activation: str

    def __post_init__(self) -> None:
        if len(self.blocks) != BLOCK_COUNT:
            raise WeightsError(f"generator needs {BLOCK_COUNT} blocks, got {len(self.blocks)}")
        if self.stem[0].in_channels != INPUT_CHANNELS:
            raise WeightsError(
                f"stem must accept {INPUT_CHANNELS} channels, got {self.stem[0].in_channels}"
            )
        if self.stem[2].out_channels != self.base_width:
            raise WeightsError("stem output width does not match base_width")
        chain = [*self.stem, *self.up, self.head]
        for prev, cur in zip(chain, chain[1:]):
            if cur.in_channels != prev.out_channels:
                raise WeightsError(
                    f"channel chain broken: {prev.out_channels} -> {cur.in_channels}"
                )
        if self.head.out_channels != 3:
            raise WeightsError(f"head must emit 3 channels, got {self.head.out_channels}")
        for i, blk in enumerate(self.blocks):
            if blk.channels != self.base_width:
                raise WeightsError(f"block {i} works on {blk.channels} channels, "
                                   f"expected {self.base_width}")


def _act(x: np.ndarray, activation: str) -> np.ndarray:
    return np.maximum(x, 0.0) if activation == "relu" else x


def _pad_to_multiple(arr: np.ndarray, multiple: int) -> np.ndarray:
    h, w = arr.shape[-2], arr.shape[-1]
    ph = (-h) % multiple
    pw = (-w) % multiple
    if ph == 0 and pw == 0:
        return arr
    pad = [(0, 0)] * (arr.ndim - 2) + [(0, ph), (0, pw)]
    return np.pad(arr, pad, mode="reflect")


def generator_forward(img: RgbImage, mask: InpaintMask, weights: GeneratorWeights) -> RgbImage:
    """Inpaint the masked region of `img`; unmasked pixels pass through.

    Dimensions not divisible by 8 are reflect-padded for the network and
    cropped afterwards.
    """
    h, w = require_same_shape(img, mask)
    masked = np.where(mask.bits[None, :, :], np.float32(0.0), img.pixels)
    x = np.concatenate([masked, mask.bits[None, :, :].astype(np.float32)], axis=0)
    x = _pad_to_multiple(x, 8).astype(np.float32)

    for conv in weights.stem:
        x = _act(kernels.conv2d(x, conv.kernel, conv.bias, stride=2, padding=conv.pad),
                 weights.activation).astype(np.float32)
    for blk in weights.blocks:
        x = x + ffc_forward(x, blk)
    for conv in weights.up:
        x = np.repeat(np.repeat(x, 2, axis=1), 2, axis=2)
        x = _act(kernels.conv2d(x, conv.kernel, conv.bias, padding=conv.pad),
                 weights.activation).astype(np.float32)
    x = kernels.conv2d(x, weights.head.kernel, weights.head.bias, padding=weights.head.pad)
    synthesized = np.clip(x[:, :h, :w], 0.0, 1.0).astype(np.float32)

    out = np.where(mask.bits[None, :, :], synthesized, img.pixels)
    return RgbImage(pixels=np.ascontiguousarray(out, dtype=np.float32))


# --- weight container -------------------------------------------------------

def _tensor_entries(weights: GeneratorWeights) -> list[tuple[str, np.ndarray]]:
    entries: list[tuple[str, np.ndarray]] = []
    for i, conv in enumerate(weights.stem):
        entries.append((f"stem.{i}.kernel", conv.kernel))
        entries.append((f"stem.{i}.bias", conv.bias))
    for i, blk in enumerate(weights.blocks):
        named = (
            ("local", blk.local_kernel, blk.local_bias),
            ("local_to_global", blk.local_to_global_kernel, blk.local_to_global_bias),
            ("global_to_local", blk.global_to_local_kernel, blk.global_to_local_bias),
            ("spectral", blk.spectral_kernel, blk.spectral_bias),
        )
        for part, kern, bias in named:
            if kern is not None:
                entries.append((f"block.{i}.{part}.kernel", kern))
                entries.append((f"block.{i}.{part}.bias", bias))
    for i, conv in enumerate(weights.up):
        entries.append((f"up.{i}.kernel", conv.kernel))
        entries.append((f"up.{i}.bias", conv.bias))
    entries.append(("head.kernel", weights.head.kernel))
    entries.append(("head.bias", weights.head.bias))
    return entries


def save_weights(weights: GeneratorWeights) -> tuple[bytes, bytes]:
    """Serialize to (manifest JSON bytes, little-endian float32 blob)."""
    tensors = []
    chunks = []
    offset = 0
    for name, arr in _tensor_entries(weights):
        flat = np.ascontiguousarray(arr, dtype="<f4")
        tensors.append({"name": name, "shape": list(arr.shape), "offset": offset})
        chunks.append(flat.tobytes())
        offset += flat.nbytes
    manifest = {
        "format_version": MANIFEST_VERSION,
        "base_width": weights.base_width,
        "global_ratio": weights.global_ratio,
        "activation": weights.activation,
        "tensors": tensors,
    }
    return json.dumps(manifest, indent=1, sort_keys=True).encode(), b"".join(chunks)


def _read_tensor(blob: bytes, entry: dict) -> np.ndarray:
    shape = tuple(int(s) for s in entry["shape"])
    count = int(np.prod(shape)) if shape else 1
    offset = int(entry["offset"])
    end = offset + 4 * count
    if offset < 0 or end > len(blob):
        raise WeightsError(
            f"tensor {entry['name']!r} needs bytes [{offset}, {end}) "
            f"but blob has {len(blob)}"
        )
    return np.frombuffer(blob, dtype="<f4", count=count, offset=offset).reshape(shape).copy()


def load_weights(manifest: bytes, blob: bytes) -> GeneratorWeights:
    """Materialize and validate a generator from its container parts."""
    try:
        doc = json.loads(manifest)
    except json.JSONDecodeError as exc:
        raise WeightsError(f"manifest is not valid JSON: {exc}") from exc
    if doc.get("format_version") != MANIFEST_VERSION:
        raise WeightsError(f"unsupported manifest version {doc.get('format_version')!r}")
    for key in ("base_width", "global_ratio", "activation", "tensors"):
        if key not in doc:
            raise WeightsError(f"manifest missing {key!r}")

    by_name: dict[str, np.ndarray] = {}
    for entry in doc["tensors"]:
        by_name[entry["name"]] = _read_tensor(blob, entry)

    def take(name: str) -> np.ndarray:
        if name not in by_name:
            raise WeightsError(f"manifest missing tensor {name!r}")
        return by_name[name]

    def conv(prefix: str) -> ConvWeights:
        return ConvWeights(kernel=take(f"{prefix}.kernel"), bias=take(f"{prefix}.bias"))

    global_ratio = float(doc["global_ratio"])
    activation = str(doc["activation"])
    stem = tuple(conv(f"stem.{i}") for i in range(3))
    up = tuple(conv(f"up.{i}") for i in range(3))
    head = conv("head")

    blocks = []
    for i in range(BLOCK_COUNT):
        prefix = f"block.{i}"
        present = {n for n in by_name if n.startswith(prefix + ".")}
        if not present:
            raise WeightsError(f"manifest missing block {i} (no {prefix}.* tensors)")

        def opt(name: str) -> np.ndarray | None:
            return by_name.get(f"{prefix}.{name}")

        try:
            blocks.append(
                FfcBlockWeights(
                    local_kernel=opt("local.kernel"),
                    local_bias=opt("local.bias"),
                    local_to_global_kernel=opt("local_to_global.kernel"),
                    local_to_global_bias=opt("local_to_global.bias"),
                    global_to_local_kernel=opt("global_to_local.kernel"),
                    global_to_local_bias=opt("global_to_local.bias"),
                    spectral_kernel=opt("spectral.kernel"),
                    spectral_bias=opt("spectral.bias"),
                    global_ratio=global_ratio,
                    activation=activation,
                )
            )
        except ValueError as exc:
            raise WeightsError(f"block {i} is inconsistent: {exc}") from exc

    try:
        return GeneratorWeights(
            stem=stem,
            blocks=tuple(blocks),
            up=up,
            head=head,
            base_width=int(doc["base_width"]),
            global_ratio=global_ratio,
            activation=activation,
        )
    except ValueError as exc:
        raise WeightsError(str(exc)) from exc


def toy_weights_path() -> Path:
    """Manifest path of the small container shipped with the package."""
    return Path(str(resources.files("wayclear.data").joinpath("toy_generator.json")))


def random_generator_weights(
    base_width: int = 16,
    global_ratio: float = 0.5,
    activation: str = "relu",
    seed: int = 0,
    kernel_size: int = 3,
) -> GeneratorWeights:
    """Random generator, uniform [-1/sqrt(fan_in), +1/sqrt(fan_in)] per tensor."""
    if base_width % 4 != 0:
        raise ValueError("base_width must be divisible by 4")
    rng = np.random.default_rng(seed)
    k = kernel_size

    def conv(c_out: int, c_in: int) -> ConvWeights:
        fan = c_in * k * k
        bound = 1.0 / np.sqrt(fan)
        return ConvWeights(
            kernel=rng.uniform(-bound, bound, (c_out, c_in, k, k)).astype(np.float32),
            bias=rng.uniform(-bound, bound, (c_out,)).astype(np.float32),
        )

    w1, w2 = base_width // 4, base_width // 2
    stem = (conv(w1, INPUT_CHANNELS), conv(w2, w1), conv(base_width, w2))
    blocks = tuple(
        random_block_weights(base_width, global_ratio, k, activation, rng)
        for _ in range(BLOCK_COUNT)
    )
    up = (conv(w2, base_width), conv(w1, w2), conv(w1, w1))
    head = conv(3, w1)
    return GeneratorWeights(
        stem=stem,
        blocks=blocks,
        up=up,
        head=head,
        base_width=base_width,
        global_ratio=global_ratio,
        activation=activation,
    )
