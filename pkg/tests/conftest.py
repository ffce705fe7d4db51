import io
import sys
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable


def gray_png(array: np.ndarray) -> bytes:
    """8-bit grayscale PNG bytes from an (H, W) uint8 array."""
    buf = io.BytesIO()
    Image.fromarray(array.astype(np.uint8), mode="L").save(buf, format="PNG")
    return buf.getvalue()


def rgb_png(array: np.ndarray) -> bytes:
    """8-bit RGB PNG bytes from an (H, W, 3) uint8 array."""
    buf = io.BytesIO()
    Image.fromarray(array.astype(np.uint8), mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260810)
