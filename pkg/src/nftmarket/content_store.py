"""Content-addressed object store with CIDv0-shaped identifiers.

A CID is base58btc(0x12 0x20 || SHA-256(bytes)): the classic "Qm..." string.
Objects persist in an append-only log file; an in-memory index is rebuilt on
startup and every fetch re-verifies the hash, so corruption is loud.
"""

from __future__ import annotations

import hashlib
import json
import os
import struct
import threading
from dataclasses import dataclass
from typing import Any

from .errors import IntegrityFailure, NotFound, ValidationError

BASE58_ALPHABET = "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz"
_B58_INDEX = {c: i for i, c in enumerate(BASE58_ALPHABET)}

MULTIHASH_PREFIX = b"\x12\x20"  # sha2-256, 32-byte digest


def base58_encode(data: bytes) -> str:
    n = int.from_bytes(data, "big")
    digits = []
    while n > 0:
        n, rem = divmod(n, 58)
        digits.append(BASE58_ALPHABET[rem])
    pad = len(data) - len(data.lstrip(b"\x00"))
    return "1" * pad + "".join(reversed(digits))


def base58_decode(text: str) -> bytes:
    n = 0
    for c in text:
        if c not in _B58_INDEX:
            raise ValidationError(f"invalid base58 character {c!r}")
        n = n * 58 + _B58_INDEX[c]
    raw = n.to_bytes((n.bit_length() + 7) // 8, "big")
    pad = len(text) - len(text.lstrip("1"))
    return b"\x00" * pad + raw


def compute_cid(data: bytes) -> str:
    return base58_encode(MULTIHASH_PREFIX + hashlib.sha256(data).digest())


def check_cid(text: str) -> str:
    raw = base58_decode(text)
    if len(raw) != 34 or not raw.startswith(MULTIHASH_PREFIX):
        raise ValidationError(f"not a sha2-256 CIDv0: {text!r}")
    return text


def is_cid(text: str) -> bool:
    try:
        check_cid(text)
        return True
    except ValidationError:
        return False


# --- metadata documents ----------------------------------------------------

METADATA_KEYS = ("name", "description", "price", "image")
JSON_MEDIA_TYPE = "application/json"


@dataclass(frozen=True)
class MetadataDocument:
    name: str
    description: str
    price: int
    image: str

    def __post_init__(self):
        if not isinstance(self.name, str) or not isinstance(self.description, str):
            raise ValidationError("name and description must be strings")
        if not isinstance(self.price, int) or isinstance(self.price, bool) or self.price < 0:
            raise ValidationError("price must be an unsigned integer")
        if not isinstance(self.image, str):
            raise ValidationError("image must be a URI string")

    def to_canonical_bytes(self) -> bytes:
        # fixed key order, no insignificant whitespace, raw UTF-8
        doc = {k: getattr(self, k) for k in METADATA_KEYS}
        return json.dumps(doc, separators=(",", ":"), ensure_ascii=False).encode("utf-8")

    @classmethod
    def from_obj(cls, obj: Any) -> "MetadataDocument":
        if not isinstance(obj, dict):
            raise ValidationError("metadata must be a JSON object")
        missing = [k for k in METADATA_KEYS if k not in obj]
        extra = [k for k in obj if k not in METADATA_KEYS]
        if missing or extra:
            raise ValidationError(
                f"metadata keys must be exactly {list(METADATA_KEYS)}"
                f" (missing={missing}, extra={extra})"
            )
        return cls(
            name=obj["name"],
            description=obj["description"],
            price=obj["price"],
            image=obj["image"],
        )

    @classmethod
    def from_bytes(cls, data: bytes) -> "MetadataDocument":
        try:
            obj = json.loads(data.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise ValidationError(f"metadata is not valid JSON: {e}") from None
        return cls.from_obj(obj)


# --- the store -------------------------------------------------------------


@dataclass(frozen=True)
class PinnedObject:
    cid: str
    data: bytes
    media_type: str
    pinned_at: float


class ContentStore:
    """Pin-by-hash object store backed by an append-only log.

    Log record layout: u32 BE content length, then the media type as a
    4-byte length-prefixed UTF-8 string, then the content bytes.
    """

    def __init__(self, log_path: str | None = None, clock=None):
        from .clock import SystemClock

        self._clock = clock or SystemClock()
        self._log_path = log_path
        self._lock = threading.Lock()
        self._objects: dict[str, PinnedObject] = {}
        if log_path is not None and os.path.exists(log_path):
            self._replay_log()

    def _replay_log(self) -> None:
        with open(self._log_path, "rb") as f:
            raw = f.read()
        pos = 0
        while pos < len(raw):
            try:
                if pos + 8 > len(raw):
                    raise ValidationError("truncated record header")
                (content_len,) = struct.unpack_from(">I", raw, pos)
                (mt_len,) = struct.unpack_from(">I", raw, pos + 4)
                end = pos + 8 + mt_len + content_len
                if end > len(raw):
                    raise ValidationError("truncated record body")
                media_type = raw[pos + 8 : pos + 8 + mt_len].decode("utf-8")
                data = raw[pos + 8 + mt_len : end]
            except (ValidationError, UnicodeDecodeError):
                raise IntegrityFailure(
                    f"corrupt object log {self._log_path} at offset {pos}"
                ) from None
            self._index(data, media_type)
            pos = end

    def _index(self, data: bytes, media_type: str) -> str:
        cid = compute_cid(data)
        if cid not in self._objects:
            self._objects[cid] = PinnedObject(
                cid=cid, data=data, media_type=media_type, pinned_at=self._clock.now()
            )
        return cid

    def _append(self, data: bytes, media_type: str) -> None:
        if self._log_path is None:
            return
        mt = media_type.encode("utf-8")
        record = struct.pack(">II", len(data), len(mt)) + mt + data
        with open(self._log_path, "ab") as f:
            f.write(record)
            f.flush()
            os.fsync(f.fileno())

    def pin_bytes(self, data: bytes, media_type: str = "application/octet-stream") -> str:
        with self._lock:
            cid = compute_cid(data)
            if cid not in self._objects:
                self._append(data, media_type)
                self._index(data, media_type)
            return cid

    def pin_json(self, doc: MetadataDocument) -> str:
        if not isinstance(doc, MetadataDocument):
            doc = MetadataDocument.from_obj(doc)
        return self.pin_bytes(doc.to_canonical_bytes(), JSON_MEDIA_TYPE)

    def fetch(self, cid: str) -> tuple[bytes, str]:
        check_cid(cid)
        with self._lock:
            obj = self._objects.get(cid)
        if obj is None:
            raise NotFound(f"no object pinned under {cid}")
        if compute_cid(obj.data) != cid:
            raise IntegrityFailure(f"stored bytes no longer hash to {cid}")
        return obj.data, obj.media_type

    def fetch_metadata(self, cid: str) -> MetadataDocument:
        data, _ = self.fetch(cid)
        return MetadataDocument.from_bytes(data)

    def __len__(self) -> int:
        with self._lock:
            return len(self._objects)

    def cids(self) -> list[str]:
        with self._lock:
            return sorted(self._objects)
