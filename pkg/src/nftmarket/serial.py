"""Canonical byte encoding used for signing preimages and hashes.

Rules: fields are concatenated in declared order; unsigned integers are
big-endian fixed 8 bytes; variable-length byte strings and UTF-8 strings
carry a 4-byte big-endian length prefix. Two equal values always encode to
identical bytes, so hashes and signatures are unambiguous.
"""

import struct

from .errors import ValidationError

U64_MAX = 2**64 - 1


def enc_u64(n: int) -> bytes:
    if not 0 <= n <= U64_MAX:
        raise ValidationError(f"integer out of u64 range: {n}")
    return struct.pack(">Q", n)


def enc_bytes(b: bytes) -> bytes:
    return struct.pack(">I", len(b)) + b


def enc_str(s: str) -> bytes:
    return enc_bytes(s.encode("utf-8"))


class Reader:
    """Sequential decoder over a canonical byte string."""

    def __init__(self, data: bytes):
        self._data = data
        self._pos = 0

    def take(self, n: int) -> bytes:
        if self._pos + n > len(self._data):
            raise ValidationError("truncated record")
        out = self._data[self._pos : self._pos + n]
        self._pos += n
        return out

    def u64(self) -> int:
        return struct.unpack(">Q", self.take(8))[0]

    def blob(self) -> bytes:
        (n,) = struct.unpack(">I", self.take(4))
        return self.take(n)

    def string(self) -> str:
        return self.blob().decode("utf-8")

    def done(self) -> bool:
        return self._pos == len(self._data)

    def expect_done(self) -> None:
        if not self.done():
            raise ValidationError("trailing bytes in record")
