"""Fast Fourier convolution block: local conv branch + spectral global branch.

The input tensor splits channel-wise into a local part X_l and a global
part X_g. Two output parts are formed as

    Y_l = act( f_l(X_l)      + f_{g->l}(X_g) )
    Y_g = act( f_g(X_g)      + f_{l->g}(X_l) )

where f_l, f_{g->l}, f_{l->g} are spatial convolutions (reflect padding,
spatial size preserved) and f_g is the spectral transform: real FFT,
a 1x1 convolution over stacked real/imaginary channels plus activation,
inverse real FFT. The spectral path gives every output pixel an
image-wide receptive field. With identity activation and zero biases the
whole block is linear.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .fourier import irfft2, rfft2

__all__ = ["FfcBlockWeights", "spectral_transform", "ffc_forward", "random_block_weights"]

_ACTIVATIONS = ("relu", "identity")


def _apply_activation(x: np.ndarray, activation: str) -> np.ndarray:
    if activation == "relu":
        return np.maximum(x, 0.0)
    return x


@dataclass(frozen=True)
class FfcBlockWeights:
    """Kernels and biases for one channel-preserving block.

    Vacuous paths (when the local or global side has zero channels) hold
    None. The spectral kernel is a (2*C_g, 2*C_g) matrix applied pointwise
    over frequency bins.
    """

    local_kernel: np.ndarray | None  # (C_l, C_l, k, k)
    local_bias: np.ndarray | None
    local_to_global_kernel: np.ndarray | None  # (C_g, C_l, k, k)
    local_to_global_bias: np.ndarray | None
    global_to_local_kernel: np.ndarray | None  # (C_l, C_g, k, k)
    global_to_local_bias: np.ndarray | None
    spectral_kernel: np.ndarray | None  # (2*C_g, 2*C_g)
    spectral_bias: np.ndarray | None
    global_ratio: float
    activation: str = "relu"

    def __post_init__(self) -> None:
        if not 0.0 <= self.global_ratio <= 1.0:
            raise ValueError(f"global_ratio must lie in [0, 1], got {self.global_ratio}")
        if self.activation not in _ACTIVATIONS:
            raise ValueError(f"activation must be one of {_ACTIVATIONS}")
        c_l, c_g = self.local_channels, self.global_channels
        if c_l > 0:
            k = self.local_kernel
            if k is None or k.shape != (c_l, c_l, k.shape[2], k.shape[3]):
                raise ValueError("local kernel missing or inconsistent")
            if k.shape[2] % 2 == 0 or k.shape[2] != k.shape[3]:
                raise ValueError("spatial kernels must be square with odd size")
        if c_g > 0:
            if self.spectral_kernel is None or self.spectral_kernel.shape != (2 * c_g, 2 * c_g):
                raise ValueError("spectral kernel missing or inconsistent")
        if c_l > 0 and c_g > 0:
            lg, gl = self.local_to_global_kernel, self.global_to_local_kernel
            if lg is None or lg.shape[:2] != (c_g, c_l):
                raise ValueError("local->global kernel missing or inconsistent")
            if gl is None or gl.shape[:2] != (c_l, c_g):
                raise ValueError("global->local kernel missing or inconsistent")
        total = c_l + c_g
        if total == 0:
            raise ValueError("block has no channels")
        if round(self.global_ratio * total) != c_g or abs(self.global_ratio * total - c_g) > 1e-9:
            raise ValueError(
                f"global_ratio {self.global_ratio} does not split {total} channels "
                f"into integral parts ({c_g} global found)"
            )

    @property
    def local_channels(self) -> int:
        if self.local_kernel is not None:
            return int(self.local_kernel.shape[0])
        if self.global_to_local_kernel is not None:
            return int(self.global_to_local_kernel.shape[0])
        return 0

    @property
    def global_channels(self) -> int:
        if self.spectral_kernel is not None:
            return int(self.spectral_kernel.shape[0]) // 2
        return 0

    @property
    def channels(self) -> int:
        return self.local_channels + self.global_channels


def spectral_transform(xg: np.ndarray, weights: FfcBlockWeights) -> np.ndarray:
    """Global update in the frequency domain; output is real, same shape.

    rfft2 -> stack (real, imag) as channels -> 1x1 convolution +
    activation -> unstack -> irfft2.
    """
    c_g = weights.global_channels
    if xg.shape[0] != c_g:
        raise ValueError(f"expected {c_g} channels, got {xg.shape[0]}")
    h, w = xg.shape[1], xg.shape[2]
    spec = rfft2(xg)
    stacked = np.concatenate([spec.real, spec.imag], axis=0)  # (2*C_g, H, W//2+1)
    mixed = np.tensordot(weights.spectral_kernel.astype(np.float64), stacked, axes=([1], [0]))
    mixed += weights.spectral_bias.astype(np.float64)[:, None, None]
    mixed = _apply_activation(mixed, weights.activation)
    out_spec = mixed[:c_g] + 1j * mixed[c_g:]
    return irfft2(out_spec, (h, w))


def ffc_forward(x: np.ndarray, weights: FfcBlockWeights) -> np.ndarray:
    """Run one block over a (C, H, W) float32 tensor; shape is preserved."""
    if x.ndim != 3:
        raise ValueError(f"expected (C, H, W) input, got shape {x.shape}")
    c = x.shape[0]
    ratio_g = weights.global_ratio * c
    if abs(ratio_g - round(ratio_g)) > 1e-9:
        raise ValueError(f"global_ratio {weights.global_ratio} does not split {c} channels")
    if c != weights.channels:
        raise ValueError(f"weights expect {weights.channels} channels, got {c}")
    c_l = weights.local_channels
    x = np.ascontiguousarray(x, dtype=np.float32)
    x_l, x_g = x[:c_l], x[c_l:]

    parts: list[np.ndarray] = []
    if c_l > 0:
        k = weights.local_kernel.shape[2]
        y_l = kernels.conv2d(x_l, weights.local_kernel, weights.local_bias, padding=k // 2)
        if weights.global_channels > 0:
            kg = weights.global_to_local_kernel.shape[2]
            y_l = y_l + kernels.conv2d(
                x_g, weights.global_to_local_kernel, weights.global_to_local_bias, padding=kg // 2
            )
        parts.append(_apply_activation(y_l, weights.activation))
    if weights.global_channels > 0:
        y_g = spectral_transform(x_g, weights)
        if c_l > 0:
            kl = weights.local_to_global_kernel.shape[2]
            y_g = y_g + kernels.conv2d(
                x_l, weights.local_to_global_kernel, weights.local_to_global_bias, padding=kl // 2
            )
        parts.append(_apply_activation(y_g, weights.activation))
    out = np.concatenate(parts, axis=0) if len(parts) > 1 else parts[0]
    return np.ascontiguousarray(out, dtype=np.float32)


def _uniform_fan_in(rng: np.random.Generator, shape: tuple[int, ...], fan_in: int) -> np.ndarray:
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape).astype(np.float32)


def random_block_weights(
    channels: int,
    global_ratio: float = 0.5,
    kernel_size: int = 3,
    activation: str = "relu",
    rng: np.random.Generator | None = None,
    zero_bias: bool = False,
) -> FfcBlockWeights:
    """Random block weights, uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)]."""
    rng = rng if rng is not None else np.random.default_rng(0)
    c_g = round(global_ratio * channels)
    if abs(global_ratio * channels - c_g) > 1e-9:
        raise ValueError(f"global_ratio {global_ratio} does not split {channels} channels")
    c_l = channels - c_g
    k = kernel_size

    def conv(c_out: int, c_in: int) -> tuple[np.ndarray, np.ndarray]:
        fan = c_in * k * k
        kern = _uniform_fan_in(rng, (c_out, c_in, k, k), fan)
        bias = np.zeros(c_out, np.float32) if zero_bias else _uniform_fan_in(rng, (c_out,), fan)
        return kern, bias

    local_k = local_b = lg_k = lg_b = gl_k = gl_b = spec_k = spec_b = None
    if c_l > 0:
        local_k, local_b = conv(c_l, c_l)
    if c_g > 0:
        fan = 2 * c_g
        spec_k = _uniform_fan_in(rng, (2 * c_g, 2 * c_g), fan)
        spec_b = np.zeros(2 * c_g, np.float32) if zero_bias else _uniform_fan_in(rng, (2 * c_g,), fan)
    if c_l > 0 and c_g > 0:
        lg_k, lg_b = conv(c_g, c_l)
        gl_k, gl_b = conv(c_l, c_g)
    return FfcBlockWeights(
        local_kernel=local_k,
        local_bias=local_b,
        local_to_global_kernel=lg_k,
        local_to_global_bias=lg_b,
        global_to_local_kernel=gl_k,
        global_to_local_bias=gl_b,
        spectral_kernel=spec_k,
        spectral_bias=spec_b,
        global_ratio=global_ratio,
        activation=activation,
    )
