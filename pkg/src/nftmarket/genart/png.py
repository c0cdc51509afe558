"""Minimal deterministic PNG writer: 8-bit RGB, no interlace, filter 0 on
every row, zlib level 6. Fixed settings so the same raster always yields the
same bytes, which Pillow's encoder does not guarantee across versions.
"""

from __future__ import annotations

import struct
import zlib

import numpy as np

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
_ZLIB_LEVEL = 6


def _chunk(tag: bytes, payload: bytes) -> bytes:
    crc = zlib.crc32(tag + payload) & 0xFFFFFFFF
    return struct.pack(">I", len(payload)) + tag + payload + struct.pack(">I", crc)


def encode_png(raster: np.ndarray) -> bytes:
    if raster.ndim != 3 or raster.shape[2] != 3 or raster.dtype != np.uint8:
        raise ValueError("raster must be (h, w, 3) uint8")
    height, width = raster.shape[:2]
    ihdr = struct.pack(">IIBBBBB", width, height, 8, 2, 0, 0, 0)
    rows = bytearray()
    for y in range(height):
        rows.append(0)  # filter type 0 (None)
        rows.extend(raster[y].tobytes())
    idat = zlib.compress(bytes(rows), _ZLIB_LEVEL)
    return PNG_SIGNATURE + _chunk(b"IHDR", ihdr) + _chunk(b"IDAT", idat) + _chunk(b"IEND", b"")


def png_size(png_bytes: bytes) -> tuple[int, int]:
    """(width, height) from the IHDR without a full decode."""
    if not png_bytes.startswith(PNG_SIGNATURE):
        raise ValueError("not a PNG")
    width, height = struct.unpack(">II", png_bytes[16:24])
    return width, height
