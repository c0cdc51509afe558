import hashlib
import io
import json
import socket

import numpy as np
import pytest
from PIL import Image

from nftmarket import genart
from nftmarket.content_store import ContentStore
from nftmarket.errors import DecodeFailure, ProviderUnavailable, ValidationError
from nftmarket.genart.kernels import _mix_py, render_numba, render_numpy


class TestPrompt:
    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            genart.Prompt("   ")

    def test_too_long_rejected(self):
        with pytest.raises(ValidationError):
            genart.Prompt("x" * 1001)

    def test_bad_dimensions(self):
        with pytest.raises(ValidationError):
            genart.Prompt("ok", 300, 300)
        with pytest.raises(ValidationError):
            genart.Prompt("ok", 256, 512)


class TestProcedural:
    provider = genart.ProceduralProvider()

    def test_same_prompt_byte_identical(self):
        a = self.provider.generate(genart.Prompt("alpha", 256, 256))
        b = self.provider.generate(genart.Prompt("alpha", 256, 256))
        assert a.png_bytes == b.png_bytes

    def test_different_prompts_differ(self):
        a = self.provider.generate(genart.Prompt("a", 256, 256))
        b = self.provider.generate(genart.Prompt("b", 256, 256))
        assert a.seed != b.seed
        assert a.png_bytes != b.png_bytes

    def test_seed_is_sha256_prefix(self):
        # independent SHA-256 oracle, value frozen before the build
        img = self.provider.generate(genart.Prompt("test", 256, 256))
        assert img.seed == hashlib.sha256(b"test").digest()[:8]
        assert img.seed.hex() == "9f86d081884c7d65"

    def test_zero_seed_shape(self):
        raster = genart.render_procedural(bytes(8), 256, 256)
        assert raster.shape == (256, 256, 3) and raster.dtype == np.uint8

    def test_distinct_seeds_distinct_pixels(self):
        a = genart.render_procedural(b"\x00" * 8, 256, 256)
        b = genart.render_procedural(b"\x01" * 8, 256, 256)
        assert not np.array_equal(a, b)

    def test_png_decodes_to_declared_size(self):
        img = self.provider.generate(genart.Prompt("decode me", 256, 256))
        with Image.open(io.BytesIO(img.png_bytes)) as im:
            assert im.size == (256, 256) and im.mode == "RGB"
        assert genart.png_size(img.png_bytes) == (256, 256)

    def test_pipeline_roundtrip_through_store(self):
        store = ContentStore()
        img = self.provider.generate(genart.Prompt("pin me", 256, 256))
        cid = store.pin_bytes(img.png_bytes, "image/png")
        data, media_type = store.fetch(cid)
        assert data == img.png_bytes and media_type == "image/png"

    def test_many_prompts_deterministic(self):
        import random

        rng = random.Random(5)
        for _ in range(25):
            text = "".join(rng.choices("abcdefgh ", k=rng.randrange(1, 30)))
            p = genart.Prompt(text, 256, 256)
            assert self.provider.generate(p).png_bytes == self.provider.generate(p).png_bytes

    def test_no_network_access(self, monkeypatch):
        def explode(*a, **k):
            raise AssertionError("procedural provider opened a socket")

        monkeypatch.setattr(socket, "socket", explode)
        self.provider.generate(genart.Prompt("offline", 256, 256))


class TestKernels:
    def test_numpy_numba_bit_identical(self):
        for seed in (0, 1, 0xDEADBEEFCAFEF00D, 2**64 - 1):
            assert np.array_equal(render_numpy(seed, 256, 256), render_numba(seed, 256, 256))

    def test_env_flag_selects_numpy(self, monkeypatch):
        monkeypatch.setenv("NFTMARKET_NO_NUMBA", "1")
        assert not genart.numba_enabled()
        monkeypatch.setenv("NFTMARKET_NO_NUMBA", "0")
        # numba is installed in this environment
        assert genart.numba_enabled()

    def test_splitmix_reference_values(self):
        # splitmix64(0) stream head, from the published reference sequence
        assert _mix_py(0) == 0xE220A8397B1DCDAF


class FakeResponse:
    def __init__(self, status_code=200, payload=None, content=b"", headers=None):
        self.status_code = status_code
        self._payload = payload
        self.content = content
        self.headers = headers or {}
        self.text = ""

    def json(self):
        if self._payload is None:
            raise ValueError("no json")
        return self._payload


class FakeHttp:
    def __init__(self, post_resp, get_resp=None):
        self.post_resp = post_resp
        self.get_resp = get_resp
        self.posts = []

    def post(self, url, **kwargs):
        self.posts.append((url, kwargs))
        return self.post_resp

    def get(self, url):
        return self.get_resp


def _png_b64():
    import base64

    raster = np.zeros((256, 256, 3), dtype=np.uint8)
    return base64.b64encode(genart.encode_png(raster)).decode()


class TestRemote:
    def _provider(self, fake):
        return genart.RemoteProvider("http://img.example/generate", client=fake)

    def test_base64_payload(self):
        fake = FakeHttp(FakeResponse(payload={"image_b64": _png_b64()}))
        img = self._provider(fake).generate(genart.Prompt("remote", 256, 256))
        assert img.provider == "remote"
        assert genart.png_size(img.png_bytes) == (256, 256)

    def test_url_payload(self):
        raster = np.zeros((256, 256, 3), dtype=np.uint8)
        png = genart.encode_png(raster)
        fake = FakeHttp(
            FakeResponse(payload={"url": "http://img.example/i.png"}),
            get_resp=FakeResponse(content=png),
        )
        img = self._provider(fake).generate(genart.Prompt("remote", 256, 256))
        assert genart.png_size(img.png_bytes) == (256, 256)

    def test_http_error(self):
        fake = FakeHttp(FakeResponse(status_code=500, payload={}))
        with pytest.raises(ProviderUnavailable):
            self._provider(fake).generate(genart.Prompt("remote", 256, 256))

    def test_rate_limit_retry_after(self):
        fake = FakeHttp(FakeResponse(status_code=429, payload={}, headers={"Retry-After": "7"}))
        with pytest.raises(ProviderUnavailable) as exc:
            self._provider(fake).generate(genart.Prompt("remote", 256, 256))
        assert exc.value.retry_after_s == 7.0

    def test_non_image_bytes(self):
        import base64

        fake = FakeHttp(FakeResponse(payload={"image_b64": base64.b64encode(b"nope").decode()}))
        with pytest.raises(DecodeFailure):
            self._provider(fake).generate(genart.Prompt("remote", 256, 256))

    def test_failure_leaves_store_untouched(self):
        from nftmarket.node import Node

        fake = FakeHttp(FakeResponse(status_code=503, payload={}))
        node = Node(provider=self._provider(fake))
        with pytest.raises(ProviderUnavailable):
            node.generate("remote prompt", 256, 256)
        assert len(node.store) == 0

    def test_request_shape(self):
        fake = FakeHttp(FakeResponse(payload={"image_b64": _png_b64()}))
        self._provider(fake).generate(genart.Prompt("shape check", 512, 512))
        url, kwargs = fake.posts[0]
        assert kwargs["json"] == {"prompt": "shape check", "size": "512x512"}


def test_make_provider_config():
    assert isinstance(genart.make_provider({"provider": "procedural"}), genart.ProceduralProvider)
    remote = genart.make_provider(
        {"provider": "remote", "provider.remote.endpoint": "http://x/y"}
    )
    assert isinstance(remote, genart.RemoteProvider)
    with pytest.raises(ValidationError):
        genart.make_provider({"provider": "remote"})
    with pytest.raises(ValidationError):
        genart.make_provider({"provider": "other"})
