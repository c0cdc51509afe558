"""Text-to-image generation behind a provider abstraction.

The procedural provider is the offline default: the prompt text hashes to an
8-byte seed and the raster is a pure function of (seed, width, height), so
the same prompt always produces byte-identical PNG output. The remote
provider posts the prompt to a configured text-to-image HTTP endpoint and
re-encodes whatever comes back as PNG.
"""

from __future__ import annotations

import base64
import hashlib
import io
import os
import threading
from dataclasses import dataclass

from ..errors import DecodeFailure, ProviderUnavailable, ValidationError
from .kernels import render_numpy, render_numba, render_raster, numba_enabled
from .png import encode_png, png_size

VALID_SIZES = (256, 512, 1024)
DEFAULT_SIZE = 512
MAX_PROMPT_CHARS = 1000
SEED_BYTES = 8

__all__ = [
    "Prompt",
    "GeneratedImage",
    "ProceduralProvider",
    "RemoteProvider",
    "prompt_seed",
    "render_procedural",
    "render_raster",
    "render_numpy",
    "render_numba",
    "numba_enabled",
    "encode_png",
    "png_size",
]


@dataclass(frozen=True)
class Prompt:
    text: str
    width: int = DEFAULT_SIZE
    height: int = DEFAULT_SIZE

    def __post_init__(self):
        if not isinstance(self.text, str) or not self.text.strip():
            raise ValidationError("prompt text must be non-empty")
        if len(self.text) > MAX_PROMPT_CHARS:
            raise ValidationError(f"prompt text exceeds {MAX_PROMPT_CHARS} chars")
        if self.width not in VALID_SIZES or self.width != self.height:
            raise ValidationError(f"dimensions must be square and one of {VALID_SIZES}")


@dataclass(frozen=True)
class GeneratedImage:
    png_bytes: bytes
    width: int
    height: int
    provider: str  # "procedural" | "remote"
    seed: bytes | None = None


def prompt_seed(text: str) -> bytes:
    return hashlib.sha256(text.encode("utf-8")).digest()[:SEED_BYTES]


def render_procedural(seed: bytes, width: int, height: int):
    if len(seed) != SEED_BYTES:
        raise ValidationError("seed must be exactly 8 bytes")
    if width not in VALID_SIZES or width != height:
        raise ValidationError(f"dimensions must be square and one of {VALID_SIZES}")
    return render_raster(int.from_bytes(seed, "big"), width, height)


class ProceduralProvider:
    name = "procedural"

    def generate(self, prompt: Prompt) -> GeneratedImage:
        seed = prompt_seed(prompt.text)
        raster = render_procedural(seed, prompt.width, prompt.height)
        return GeneratedImage(
            png_bytes=encode_png(raster),
            width=prompt.width,
            height=prompt.height,
            provider=self.name,
            seed=seed,
        )


class RemoteProvider:
    """Client for a hosted text-to-image service.

    Single POST of {"prompt": ..., "size": "WxH"} with a bearer token taken
    from the configured environment variable; the response carries either a
    base64 image or a URL to fetch. At most ``max_in_flight`` concurrent
    requests to stay under provider rate limits.
    """

    name = "remote"

    def __init__(
        self,
        endpoint: str,
        credential_env: str = "NFTMARKET_REMOTE_TOKEN",
        timeout_ms: int = 30000,
        max_in_flight: int = 2,
        client=None,
    ):
        self.endpoint = endpoint
        self.credential_env = credential_env
        self.timeout_s = timeout_ms / 1000.0
        self._slots = threading.Semaphore(max_in_flight)
        self._client = client  # injectable for tests

    def _http(self):
        if self._client is not None:
            return self._client
        import httpx

        return httpx.Client(timeout=self.timeout_s)

    def generate(self, prompt: Prompt) -> GeneratedImage:
        token = os.environ.get(self.credential_env, "")
        headers = {"Authorization": f"Bearer {token}"} if token else {}
        body = {"prompt": prompt.text, "size": f"{prompt.width}x{prompt.height}"}
        with self._slots:
            client = self._http()
            try:
                resp = client.post(self.endpoint, json=body, headers=headers)
            except Exception as e:
                raise ProviderUnavailable(f"remote provider unreachable: {e}") from e
            if resp.status_code == 429:
                retry = resp.headers.get("Retry-After")
                raise ProviderUnavailable(
                    "remote provider rate-limited",
                    retry_after_s=float(retry) if retry else None,
                )
            if resp.status_code >= 400:
                raise ProviderUnavailable(f"remote provider HTTP {resp.status_code}")
            try:
                payload = resp.json()
            except ValueError:
                raise DecodeFailure("remote provider returned non-JSON") from None
            if "image_b64" in payload:
                try:
                    raw = base64.b64decode(payload["image_b64"], validate=True)
                except Exception:
                    raise DecodeFailure("invalid base64 image payload") from None
            elif "url" in payload:
                try:
                    fetched = client.get(payload["url"])
                except Exception as e:
                    raise ProviderUnavailable(f"image fetch failed: {e}") from e
                if fetched.status_code >= 400:
                    raise ProviderUnavailable(f"image fetch HTTP {fetched.status_code}")
                raw = fetched.content
            else:
                raise DecodeFailure("remote response carries neither image_b64 nor url")
        return self._reencode(raw, prompt)

    def _reencode(self, raw: bytes, prompt: Prompt) -> GeneratedImage:
        import numpy as np
        from PIL import Image, UnidentifiedImageError

        try:
            with Image.open(io.BytesIO(raw)) as im:
                raster = np.asarray(im.convert("RGB"), dtype=np.uint8)
        except (UnidentifiedImageError, OSError):
            raise DecodeFailure("remote returned bytes that do not decode as an image") from None
        return GeneratedImage(
            png_bytes=encode_png(raster),
            width=raster.shape[1],
            height=raster.shape[0],
            provider=self.name,
        )


def make_provider(config: dict) -> ProceduralProvider | RemoteProvider:
    """Build a provider from flat config keys (see service config format)."""
    mode = config.get("provider", "procedural")
    if mode == "procedural":
        return ProceduralProvider()
    if mode == "remote":
        endpoint = config.get("provider.remote.endpoint")
        if not endpoint:
            raise ValidationError("remote provider requires provider.remote.endpoint")
        return RemoteProvider(
            endpoint=endpoint,
            credential_env=config.get("provider.remote.credential_env", "NFTMARKET_REMOTE_TOKEN"),
            timeout_ms=int(config.get("provider.remote.timeout_ms", 30000)),
        )
    raise ValidationError(f"unknown provider {mode!r}")
