"""Deterministic single-node chain: accounts, signed transactions, blocks,
and the marketplace contract (mint / list / buy) executed inside it.

All mutation flows through one serialized queue; every transaction either
commits fully or reverts with zero state change. Zero fees, so the sum of
balances always equals total faucet issuance.
"""

from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass, field

from . import wallet
from .clock import Clock, SystemClock
from .content_store import ContentStore, MetadataDocument, is_cid
from .errors import (
    INSUFFICIENT_FUNDS,
    METADATA_INVALID,
    NOT_LISTED,
    SELF_PURCHASE,
    UNKNOWN_TOKEN,
    UNKNOWN_URI,
    WRONG_PAYMENT,
    ZERO_PRICE,
    BadSignature,
    ContractRevert,
    NonceMismatch,
    NotFound,
    UnknownSender,
    ValidationError,
)
from .serial import Reader, enc_bytes, enc_str, enc_u64

HASH_BYTES = 32
GENESIS_PREV_HASH = bytes(HASH_BYTES)

OP_MINT = 0x01
OP_BUY = 0x02
OP_TRANSFER = 0x03
OP_FAUCET = 0x04

_OP_NAMES = {OP_MINT: "mint", OP_BUY: "buy", OP_TRANSFER: "transfer", OP_FAUCET: "faucet"}


# --- contract calls --------------------------------------------------------


@dataclass(frozen=True)
class Mint:
    token_uri: str
    price: int

    def encode(self) -> bytes:
        return bytes([OP_MINT]) + enc_str(self.token_uri) + enc_u64(self.price)


@dataclass(frozen=True)
class BuyToken:
    token_id: int

    def encode(self) -> bytes:
        return bytes([OP_BUY]) + enc_u64(self.token_id)


@dataclass(frozen=True)
class Transfer:
    to: str

    def encode(self) -> bytes:
        return bytes([OP_TRANSFER]) + enc_bytes(wallet.address_bytes(self.to))


@dataclass(frozen=True)
class Faucet:
    to: str

    def encode(self) -> bytes:
        return bytes([OP_FAUCET]) + enc_bytes(wallet.address_bytes(self.to))


ContractCall = Mint | BuyToken | Transfer | Faucet


def decode_call(data: bytes) -> ContractCall:
    if not data:
        raise ValidationError("empty contract call")
    r = Reader(data[1:])
    op = data[0]
    if op == OP_MINT:
        call: ContractCall = Mint(token_uri=r.string(), price=r.u64())
    elif op == OP_BUY:
        call = BuyToken(token_id=r.u64())
    elif op == OP_TRANSFER:
        call = Transfer(to=wallet.address_from_bytes(r.blob()))
    elif op == OP_FAUCET:
        call = Faucet(to=wallet.address_from_bytes(r.blob()))
    else:
        raise ValidationError(f"unknown contract opcode 0x{op:02x}")
    r.expect_done()
    return call


# --- transactions ----------------------------------------------------------


@dataclass(frozen=True)
class Transaction:
    sender: str
    nonce: int
    call: ContractCall
    value: int
    public_key: bytes
    signature: bytes

    def unsigned_bytes(self) -> bytes:
        return (
            enc_bytes(wallet.address_bytes(self.sender))
            + enc_u64(self.nonce)
            + enc_bytes(self.call.encode())
            + enc_u64(self.value)
        )

    def canonical_bytes(self) -> bytes:
        return self.unsigned_bytes() + self.public_key + self.signature

    def tx_hash(self) -> bytes:
        return hashlib.sha256(self.canonical_bytes()).digest()

    @classmethod
    def decode(cls, data: bytes) -> "Transaction":
        r = Reader(data)
        sender = wallet.address_from_bytes(r.blob())
        nonce = r.u64()
        call = decode_call(r.blob())
        value = r.u64()
        public_key = r.take(wallet.PUBKEY_BYTES)
        signature = r.take(wallet.SIGNATURE_BYTES)
        r.expect_done()
        return cls(sender, nonce, call, value, public_key, signature)


def decode_unsigned(data: bytes) -> tuple[str, int, ContractCall, int]:
    """Parse canonical unsigned transaction bytes back into fields."""
    r = Reader(data)
    sender = wallet.address_from_bytes(r.blob())
    nonce = r.u64()
    call = decode_call(r.blob())
    value = r.u64()
    r.expect_done()
    return sender, nonce, call, value


def unsigned_tx_bytes(sender: str, nonce: int, call: ContractCall, value: int) -> bytes:
    return (
        enc_bytes(wallet.address_bytes(sender))
        + enc_u64(nonce)
        + enc_bytes(call.encode())
        + enc_u64(value)
    )


def sign_transaction(
    keypair: wallet.KeyPair, nonce: int, call: ContractCall, value: int
) -> Transaction:
    sender = keypair.address
    preimage = unsigned_tx_bytes(sender, nonce, call, value)
    sig = wallet.sign(keypair, preimage)
    return Transaction(sender, nonce, call, value, keypair.public_key, sig)


def _system_tx(nonce: int, call: ContractCall, value: int) -> Transaction:
    # faucet transactions originate from the zero address; no key can sign
    # for it (its address is not the hash of any known public key), so the
    # chain itself mints them with zeroed credentials
    return Transaction(
        wallet.ZERO_ADDRESS,
        nonce,
        call,
        value,
        bytes(wallet.PUBKEY_BYTES),
        bytes(wallet.SIGNATURE_BYTES),
    )


# --- chain records ---------------------------------------------------------


@dataclass
class Account:
    balance: int = 0
    nonce: int = 0


@dataclass(frozen=True)
class NFTRecord:
    token_id: int
    owner: str
    creator: str
    token_uri: str
    price: int
    listed: bool


@dataclass(frozen=True)
class Event:
    kind: str  # "Minted" | "Sold"
    token_id: int
    payload: dict


@dataclass(frozen=True)
class Receipt:
    tx_hash: bytes
    status: str  # "Success" | "Reverted"
    reason: str | None
    block_height: int
    events: tuple[Event, ...]

    @property
    def success(self) -> bool:
        return self.status == "Success"


@dataclass(frozen=True)
class Block:
    height: int
    prev_hash: bytes
    tx_hashes: tuple[bytes, ...]
    timestamp: int
    block_hash: bytes = field(default=b"", compare=False)

    def header_bytes(self) -> bytes:
        out = enc_u64(self.height) + self.prev_hash + enc_u64(len(self.tx_hashes))
        for h in self.tx_hashes:
            out += h
        out += enc_u64(self.timestamp)
        return out


def _hash_block(height: int, prev_hash: bytes, tx_hashes: list[bytes], timestamp: int) -> Block:
    blk = Block(height, prev_hash, tuple(tx_hashes), timestamp)
    return Block(height, prev_hash, tuple(tx_hashes), timestamp, hashlib.sha256(blk.header_bytes()).digest())


# --- the chain -------------------------------------------------------------

# log records: transactions are hex of canonical tx bytes; a block seal is a
# zero-length blob marker followed by the block timestamp (a real transaction
# always starts with the 20-byte address length prefix, so the marker cannot
# collide)
_SEAL_MARKER = enc_bytes(b"")


class Chain:
    def __init__(self, content_store: ContentStore, clock: Clock | None = None):
        self._store = content_store
        self._clock = clock or SystemClock()
        self._lock = threading.RLock()
        self._accounts: dict[str, Account] = {}
        self._tokens: dict[int, NFTRecord] = {}
        self._receipts: dict[bytes, Receipt] = {}
        self._queue: list[Transaction] = []
        self._pending_by_sender: dict[str, int] = {}
        self._issuance = 0
        self._log: list[str] = []  # hex records, txs and seal markers
        genesis = _hash_block(0, GENESIS_PREV_HASH, [], 0)
        self._blocks: list[Block] = [genesis]

    # -- reads --------------------------------------------------------------

    @property
    def height(self) -> int:
        return self._blocks[-1].height

    @property
    def blocks(self) -> list[Block]:
        with self._lock:
            return list(self._blocks)

    @property
    def issuance(self) -> int:
        return self._issuance

    def get_balance(self, address: str) -> int:
        wallet.check_address(address)
        with self._lock:
            acct = self._accounts.get(address)
            return acct.balance if acct else 0

    def get_nonce(self, address: str) -> int:
        wallet.check_address(address)
        with self._lock:
            acct = self._accounts.get(address)
            return acct.nonce if acct else 0

    def accounts(self) -> dict[str, tuple[int, int]]:
        """Snapshot of (balance, nonce) per known address."""
        with self._lock:
            return {a: (acct.balance, acct.nonce) for a, acct in self._accounts.items()}

    def get_receipt(self, tx_hash: bytes) -> Receipt:
        with self._lock:
            rcpt = self._receipts.get(tx_hash)
        if rcpt is None:
            raise NotFound(f"no receipt for {tx_hash.hex()}")
        return rcpt

    def state_hash(self) -> str:
        with self._lock:
            h = hashlib.sha256()
            for addr in sorted(self._accounts):
                acct = self._accounts[addr]
                h.update(enc_bytes(wallet.address_bytes(addr)))
                h.update(enc_u64(acct.balance))
                h.update(enc_u64(acct.nonce))
            for token_id in sorted(self._tokens):
                t = self._tokens[token_id]
                h.update(enc_u64(t.token_id))
                h.update(enc_bytes(wallet.address_bytes(t.owner)))
                h.update(enc_bytes(wallet.address_bytes(t.creator)))
                h.update(enc_str(t.token_uri))
                h.update(enc_u64(t.price))
                h.update(b"\x01" if t.listed else b"\x00")
            return h.hexdigest()

    # -- marketplace queries ------------------------------------------------

    def get_all_listings(self) -> list[NFTRecord]:
        with self._lock:
            return [self._tokens[i] for i in sorted(self._tokens) if self._tokens[i].listed]

    def get_tokens_of(self, owner: str) -> list[NFTRecord]:
        wallet.check_address(owner)
        with self._lock:
            return [self._tokens[i] for i in sorted(self._tokens) if self._tokens[i].owner == owner]

    def get_token(self, token_id: int) -> NFTRecord:
        with self._lock:
            t = self._tokens.get(token_id)
        if t is None:
            raise NotFound(f"unknown token {token_id}")
        return t

    def owner_of(self, token_id: int) -> str:
        return self.get_token(token_id).owner

    def token_uri(self, token_id: int) -> str:
        return self.get_token(token_id).token_uri

    def total_minted(self) -> int:
        with self._lock:
            return len(self._tokens)

    # -- writes -------------------------------------------------------------

    def faucet(self, address: str, amount: int) -> Receipt:
        wallet.check_address(address)
        if amount <= 0:
            raise ValidationError("faucet amount must be positive")
        with self._lock:
            sys_acct = self._accounts.setdefault(wallet.ZERO_ADDRESS, Account())
            nonce = sys_acct.nonce + self._pending_by_sender.get(wallet.ZERO_ADDRESS, 0)
            tx = _system_tx(nonce, Faucet(address), amount)
            self._enqueue(tx)
            self.seal_block()
            return self.get_receipt(tx.tx_hash())

    def submit_transaction(self, tx: Transaction) -> bytes:
        if isinstance(tx.call, Faucet):
            raise ValidationError("faucet transactions cannot be submitted externally")
        if wallet.derive_address(tx.public_key) != tx.sender:
            raise BadSignature("public key does not hash to sender address")
        if not wallet.verify(tx.public_key, tx.unsigned_bytes(), tx.signature):
            raise BadSignature("invalid transaction signature")
        if isinstance(tx.call, Mint) and tx.value != 0:
            raise ValidationError("mint transactions carry no value")
        with self._lock:
            acct = self._accounts.get(tx.sender)
            if acct is None:
                raise UnknownSender(f"sender {tx.sender} has no account (fund it first)")
            expected = acct.nonce + self._pending_by_sender.get(tx.sender, 0)
            if tx.nonce != expected:
                raise NonceMismatch(f"expected nonce {expected}, got {tx.nonce}")
            return self._enqueue(tx)

    def _enqueue(self, tx: Transaction) -> bytes:
        self._queue.append(tx)
        self._pending_by_sender[tx.sender] = self._pending_by_sender.get(tx.sender, 0) + 1
        return tx.tx_hash()

    def seal_block(self, timestamp: int | None = None) -> Block:
        with self._lock:
            if timestamp is None:
                timestamp = int(self._clock.now())
            batch, self._queue = self._queue, []
            self._pending_by_sender.clear()
            height = self.height + 1
            tx_hashes: list[bytes] = []
            receipts: list[Receipt] = []
            for tx in batch:
                txh = tx.tx_hash()
                tx_hashes.append(txh)
                try:
                    events = self._execute(tx)
                    receipts.append(Receipt(txh, "Success", None, height, tuple(events)))
                except ContractRevert as rv:
                    receipts.append(Receipt(txh, "Reverted", rv.reason, height, ()))
                self._log.append(tx.canonical_bytes().hex())
            block = _hash_block(height, self._blocks[-1].block_hash, tx_hashes, timestamp)
            self._blocks.append(block)
            for rcpt in receipts:
                self._receipts[rcpt.tx_hash] = rcpt
            self._log.append((_SEAL_MARKER + enc_u64(timestamp)).hex())
            return block

    def _execute(self, tx: Transaction) -> list[Event]:
        """Apply one transaction. Raises ContractRevert with zero mutation."""
        call = tx.call
        if isinstance(call, Faucet):
            acct = self._accounts.setdefault(call.to, Account())
            acct.balance += tx.value
            self._issuance += tx.value
            self._accounts.setdefault(wallet.ZERO_ADDRESS, Account()).nonce += 1
            return []

        sender = self._accounts.get(tx.sender)
        if sender is None or tx.nonce != sender.nonce:
            raise ContractRevert("NonceMismatch")

        if isinstance(call, Transfer):
            if sender.balance < tx.value:
                raise ContractRevert(INSUFFICIENT_FUNDS)
            recipient = self._accounts.setdefault(call.to, Account())
            sender.balance -= tx.value
            recipient.balance += tx.value
            sender.nonce += 1
            return []

        if isinstance(call, Mint):
            if call.price == 0:
                raise ContractRevert(ZERO_PRICE)
            try:
                data, _ = self._store.fetch(call.token_uri)
            except (NotFound, ValidationError):
                raise ContractRevert(UNKNOWN_URI) from None
            try:
                MetadataDocument.from_bytes(data)
            except ValidationError:
                raise ContractRevert(METADATA_INVALID) from None
            token_id = len(self._tokens) + 1
            self._tokens[token_id] = NFTRecord(
                token_id=token_id,
                owner=tx.sender,
                creator=tx.sender,
                token_uri=call.token_uri,
                price=call.price,
                listed=True,
            )
            sender.nonce += 1
            return [
                Event(
                    "Minted",
                    token_id,
                    {
                        "creator": tx.sender,
                        "token_uri": call.token_uri,
                        "price": call.price,
                    },
                )
            ]

        if isinstance(call, BuyToken):
            token = self._tokens.get(call.token_id)
            if token is None:
                raise ContractRevert(UNKNOWN_TOKEN)
            if not token.listed:
                raise ContractRevert(NOT_LISTED)
            if tx.sender == token.owner:
                raise ContractRevert(SELF_PURCHASE)
            if tx.value != token.price:
                raise ContractRevert(WRONG_PAYMENT)
            if sender.balance < tx.value:
                raise ContractRevert(INSUFFICIENT_FUNDS)
            seller = self._accounts.setdefault(token.owner, Account())
            sender.balance -= tx.value
            seller.balance += tx.value
            self._tokens[call.token_id] = NFTRecord(
                token_id=token.token_id,
                owner=tx.sender,
                creator=token.creator,
                token_uri=token.token_uri,
                price=token.price,
                listed=False,
            )
            sender.nonce += 1
            return [
                Event(
                    "Sold",
                    call.token_id,
                    {"seller": token.owner, "buyer": tx.sender, "price": token.price},
                )
            ]

        raise ContractRevert("UnknownCall")

    # -- verification and log replay ----------------------------------------

    def verify_chain(self) -> bool:
        with self._lock:
            prev = None
            for blk in self._blocks:
                expected = _hash_block(blk.height, blk.prev_hash, list(blk.tx_hashes), blk.timestamp)
                if expected.block_hash != blk.block_hash:
                    return False
                if prev is None:
                    if blk.prev_hash != GENESIS_PREV_HASH or blk.height != 0:
                        return False
                else:
                    if blk.prev_hash != prev.block_hash or blk.height != prev.height + 1:
                        return False
                prev = blk
            return True

    def export_log(self) -> str:
        with self._lock:
            return "\n".join(self._log) + ("\n" if self._log else "")

    @classmethod
    def replay_log(cls, log_text: str, content_store: ContentStore) -> "Chain":
        """Rebuild a chain from an exported log; block hashes reproduce exactly."""
        chain = cls(content_store)
        seal_prefix = _SEAL_MARKER.hex()
        for line in log_text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith(seal_prefix):
                r = Reader(bytes.fromhex(line))
                r.blob()
                ts = r.u64()
                r.expect_done()
                chain.seal_block(timestamp=ts)
            else:
                tx = Transaction.decode(bytes.fromhex(line))
                with chain._lock:
                    chain._enqueue(tx)
        return chain
