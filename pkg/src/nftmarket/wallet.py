"""Keys, addresses, signing and the challenge-response connect flow.

Private keys are plain Ed25519 seeds and never travel: the service only ever
sees public keys, signatures and session tokens. Addresses are the first 20
bytes of SHA-256 over the public key, rendered as 0x-prefixed lowercase hex.
"""

from __future__ import annotations

import hashlib
import os
import secrets
import threading
from dataclasses import dataclass

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)

from .clock import Clock, SystemClock
from .errors import (
    BadSignature,
    ChallengeAlreadyUsed,
    ChallengeExpired,
    UnknownChallenge,
    ValidationError,
)

ADDRESS_BYTES = 20
SEED_BYTES = 32
PUBKEY_BYTES = 32
SIGNATURE_BYTES = 64

ZERO_ADDRESS = "0x" + "00" * ADDRESS_BYTES

LOGIN_PREFIX = b"login:"
DEFAULT_CHALLENGE_TTL_S = 120.0


def is_address(s: str) -> bool:
    if not (isinstance(s, str) and len(s) == 42 and s.startswith("0x")):
        return False
    hexpart = s[2:]
    return hexpart == hexpart.lower() and all(c in "0123456789abcdef" for c in hexpart)


def check_address(s: str) -> str:
    if not is_address(s):
        raise ValidationError(f"malformed address: {s!r}")
    return s


def address_bytes(addr: str) -> bytes:
    check_address(addr)
    return bytes.fromhex(addr[2:])


def address_from_bytes(b: bytes) -> str:
    if len(b) != ADDRESS_BYTES:
        raise ValidationError("address must be 20 bytes")
    return "0x" + b.hex()


def derive_address(public_key: bytes) -> str:
    if len(public_key) != PUBKEY_BYTES:
        raise ValidationError("public key must be 32 bytes")
    return address_from_bytes(hashlib.sha256(public_key).digest()[:ADDRESS_BYTES])


@dataclass(frozen=True)
class KeyPair:
    seed: bytes
    public_key: bytes

    @property
    def address(self) -> str:
        return derive_address(self.public_key)

    def __repr__(self) -> str:  # keep the seed out of logs and tracebacks
        return f"KeyPair(address={self.address})"


def generate_keypair(seed: bytes | None = None) -> KeyPair:
    if seed is None:
        seed = secrets.token_bytes(SEED_BYTES)
    elif len(seed) != SEED_BYTES:
        raise ValidationError("seed must be exactly 32 bytes")
    priv = Ed25519PrivateKey.from_private_bytes(seed)
    pub = priv.public_key().public_bytes_raw()
    return KeyPair(seed=seed, public_key=pub)


def sign(keypair: KeyPair, message: bytes) -> bytes:
    priv = Ed25519PrivateKey.from_private_bytes(keypair.seed)
    return priv.sign(message)


def verify(public_key: bytes, message: bytes, signature: bytes) -> bool:
    if len(public_key) != PUBKEY_BYTES or len(signature) != SIGNATURE_BYTES:
        raise ValidationError("malformed key or signature length")
    try:
        Ed25519PublicKey.from_public_bytes(public_key).verify(signature, message)
        return True
    except InvalidSignature:
        return False


def login_message(nonce_hex: str) -> bytes:
    """Exact bytes a wallet signs to prove a challenge."""
    return LOGIN_PREFIX + nonce_hex.encode("ascii")


# --- keystore file: a single line of 64 hex chars (the seed) ---------------


def save_keystore(path: str, keypair: KeyPair) -> None:
    fd = os.open(path, os.O_WRONLY | os.O_CREAT | os.O_TRUNC, 0o600)
    with os.fdopen(fd, "w") as f:
        f.write(keypair.seed.hex() + "\n")


def load_keystore(path: str) -> KeyPair:
    with open(path) as f:
        line = f.read().strip()
    try:
        seed = bytes.fromhex(line)
    except ValueError:
        raise ValidationError(f"keystore {path} is not hex") from None
    if len(seed) != SEED_BYTES:
        raise ValidationError(f"keystore {path} must hold 64 hex chars")
    return generate_keypair(seed)


# --- challenge registry ----------------------------------------------------


@dataclass
class Challenge:
    address: str
    nonce: str  # 16 random bytes, hex
    issued_at: float
    ttl: float


@dataclass(frozen=True)
class Session:
    token: str
    address: str
    expires_at: float


class ChallengeRegistry:
    """Single-use, TTL-bound login challenges. Thread-safe."""

    def __init__(
        self,
        clock: Clock | None = None,
        ttl_s: float = DEFAULT_CHALLENGE_TTL_S,
        session_ttl_s: float = 3600.0,
    ):
        self._clock = clock or SystemClock()
        self._ttl = ttl_s
        self._session_ttl = session_ttl_s
        self._lock = threading.Lock()
        self._pending: dict[str, Challenge] = {}
        self._consumed: set[str] = set()
        self._sessions: dict[str, Session] = {}

    def issue(self, address: str) -> Challenge:
        check_address(address)
        ch = Challenge(
            address=address,
            nonce=secrets.token_bytes(16).hex(),
            issued_at=self._clock.now(),
            ttl=self._ttl,
        )
        with self._lock:
            self._pending[ch.nonce] = ch
        return ch

    def prove(self, nonce: str, public_key: bytes, signature: bytes) -> Session:
        now = self._clock.now()
        with self._lock:
            if nonce in self._consumed:
                raise ChallengeAlreadyUsed("challenge already consumed")
            ch = self._pending.get(nonce)
            if ch is None:
                raise UnknownChallenge(f"no pending challenge for nonce {nonce}")
            if now - ch.issued_at > ch.ttl:
                del self._pending[nonce]
                raise ChallengeExpired("challenge expired")
        # signature work happens outside the lock; consumption below is the
        # atomic step that prevents double-proving under races
        if derive_address(public_key) != ch.address:
            raise BadSignature("public key does not match challenged address")
        if not verify(public_key, login_message(ch.nonce), signature):
            raise BadSignature("invalid challenge signature")
        with self._lock:
            if nonce in self._consumed:
                raise ChallengeAlreadyUsed("challenge already consumed")
            self._pending.pop(nonce, None)
            self._consumed.add(nonce)
            sess = Session(
                token=secrets.token_bytes(32).hex(),
                address=ch.address,
                expires_at=now + self._session_ttl,
            )
            self._sessions[sess.token] = sess
        return sess

    def latest_nonce(self, address: str) -> str | None:
        """Most recently issued pending challenge nonce for an address."""
        with self._lock:
            best: Challenge | None = None
            for ch in self._pending.values():
                if ch.address == address and (best is None or ch.issued_at >= best.issued_at):
                    best = ch
            return best.nonce if best else None

    def session_address(self, token: str) -> str | None:
        with self._lock:
            sess = self._sessions.get(token)
        if sess is None or self._clock.now() > sess.expires_at:
            return None
        return sess.address
