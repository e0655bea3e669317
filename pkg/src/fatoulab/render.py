"""Fixed palette and in-memory PNG / PPM encoders for label grids."""

from __future__ import annotations

import colorsys
import io
import json

import numpy as np
from PIL import Image, PngImagePlugin

from .fatou import ESCAPED, POLE, UNDECIDED

WHITE = (255, 255, 255)
BLACK = (0, 0, 0)
GREY = (160, 160, 160)
CONFIG_KEY = "fatoulab-config"
_GOLDEN = 0.6180339887498949


def basin_color(k: int) -> tuple[int, int, int]:
    hue = (0.02 + k * _GOLDEN) % 1.0
    r, g, b = colorsys.hsv_to_rgb(hue, 0.7, 0.85)
    return int(round(255 * r)), int(round(255 * g)), int(round(255 * b))


def colorize(labels: np.ndarray) -> np.ndarray:
    """(rows, cols) integer labels -> (rows, cols, 3) uint8 RGB."""
    rgb = np.empty(labels.shape + (3,), dtype=np.uint8)
    rgb[labels == ESCAPED] = WHITE
    rgb[labels == POLE] = BLACK
    rgb[labels == UNDECIDED] = GREY
    for k in np.unique(labels[labels >= 0]):
        rgb[labels == k] = basin_color(int(k))
    return rgb


def encode_png(rgb: np.ndarray, config: dict | None = None) -> bytes:
    info = PngImagePlugin.PngInfo()
    if config is not None:
        info.add_text(CONFIG_KEY, json.dumps(config, sort_keys=True))
    buf = io.BytesIO()
    Image.fromarray(rgb, "RGB").save(buf, format="PNG", pnginfo=info)
    return buf.getvalue()


def read_png_config(data: bytes) -> dict | None:
    img = Image.open(io.BytesIO(data))
    text = img.text.get(CONFIG_KEY) if hasattr(img, "text") else None
    return json.loads(text) if text else None


def encode_ppm(rgb: np.ndarray, config: dict | None = None) -> bytes:
    """Binary P6; the config rides in a header comment line."""
    rows, cols, _ = rgb.shape
    head = b"P6\n"
    if config is not None:
        head += b"# " + json.dumps(config, sort_keys=True).encode() + b"\n"
    head += f"{cols} {rows}\n255\n".encode()
    return head + np.ascontiguousarray(rgb, dtype=np.uint8).tobytes()
