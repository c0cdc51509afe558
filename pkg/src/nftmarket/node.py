"""In-process marketplace node: the one object the HTTP service, the CLI's
offline mode and the bench harness all drive.

Owns the content store, the chain, the challenge registry and the image
provider, and persists both append-only logs under a data directory (or runs
purely in memory when no directory is given). Restart = replay both logs.
"""

from __future__ import annotations

import os
import threading

from . import genart
from .chain import Chain, Receipt, Transaction
from .clock import Clock
from .content_store import ContentStore, MetadataDocument, is_cid
from .errors import IntegrityFailure, NotFound, ValidationError
from .wallet import ChallengeRegistry, check_address

OBJECT_LOG = "objects.log"
CHAIN_LOG = "chain.log"


class Node:
    def __init__(
        self,
        data_dir: str | None = None,
        provider=None,
        clock: Clock | None = None,
        challenge_ttl_s: float = 120.0,
    ):
        self.data_dir = data_dir
        self._chain_log_path = None
        self._flushed_records = 0
        self._persist_lock = threading.Lock()

        object_log = None
        if data_dir is not None:
            os.makedirs(data_dir, exist_ok=True)
            object_log = os.path.join(data_dir, OBJECT_LOG)
            self._chain_log_path = os.path.join(data_dir, CHAIN_LOG)

        self.store = ContentStore(log_path=object_log, clock=clock)
        self.chain = self._load_chain(clock)
        self.registry = ChallengeRegistry(clock=clock, ttl_s=challenge_ttl_s)
        self.provider = provider or genart.ProceduralProvider()

    def _load_chain(self, clock) -> Chain:
        if self._chain_log_path and os.path.exists(self._chain_log_path):
            with open(self._chain_log_path) as f:
                text = f.read()
            try:
                chain = Chain.replay_log(text, self.store)
            except ValidationError as e:
                raise IntegrityFailure(f"corrupt chain log {self._chain_log_path}: {e}") from e
            chain._clock = clock or chain._clock
            self._flushed_records = len(chain._log)
            return chain
        return Chain(self.store, clock=clock)

    def _persist_chain(self) -> None:
        if self._chain_log_path is None:
            return
        with self._persist_lock:
            records = self.chain._log[self._flushed_records :]
            if not records:
                return
            with open(self._chain_log_path, "a") as f:
                for rec in records:
                    f.write(rec + "\n")
                f.flush()
                os.fsync(f.fileno())
            self._flushed_records += len(records)

    # -- mutations ----------------------------------------------------------

    def faucet(self, address: str, amount: int) -> Receipt:
        rcpt = self.chain.faucet(address, amount)
        self._persist_chain()
        return rcpt

    def submit_and_seal(self, tx: Transaction) -> Receipt:
        """Submit one signed transaction and seal it into its own block."""
        tx_hash = self.chain.submit_transaction(tx)
        self.chain.seal_block()
        self._persist_chain()
        return self.chain.get_receipt(tx_hash)

    def generate(self, text: str, width: int, height: int) -> str:
        """Generate an image and pin it; returns the image CID."""
        image = self.provider.generate(genart.Prompt(text, width, height))
        return self.store.pin_bytes(image.png_bytes, "image/png")

    # -- views --------------------------------------------------------------

    def resolve_metadata(self, token_uri: str) -> MetadataDocument | None:
        if not is_cid(token_uri):
            return None
        try:
            return self.store.fetch_metadata(token_uri)
        except (NotFound, ValidationError):
            return None

    def nft_view(self, record) -> dict:
        doc = self.resolve_metadata(record.token_uri)
        return {
            "token_id": record.token_id,
            "owner": record.owner,
            "creator": record.creator,
            "token_uri": record.token_uri,
            "price": record.price,
            "listed": record.listed,
            "metadata": None
            if doc is None
            else {
                "name": doc.name,
                "description": doc.description,
                "price": doc.price,
                "image": doc.image,
            },
        }

    def listings_view(self, offset: int = 0, limit: int = 50) -> dict:
        all_listings = self.chain.get_all_listings()
        page = all_listings[offset : offset + limit]
        return {"items": [self.nft_view(r) for r in page], "total": len(all_listings)}

    def profile_view(self, address: str) -> dict:
        check_address(address)
        tokens = self.chain.get_tokens_of(address)
        return {
            "address": address,
            "nft_count": len(tokens),
            "total_value": sum(t.price for t in tokens),
            "tokens": [self.nft_view(t) for t in tokens],
        }

    @staticmethod
    def receipt_view(rcpt: Receipt) -> dict:
        return {
            "tx_hash": rcpt.tx_hash.hex(),
            "status": rcpt.status,
            "reason": rcpt.reason,
            "block_height": rcpt.block_height,
            "events": [
                {"kind": ev.kind, "token_id": ev.token_id, **ev.payload} for ev in rcpt.events
            ],
        }
