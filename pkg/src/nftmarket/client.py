"""Client abstraction over the marketplace API.

Two implementations with the same surface: HttpClient speaks the JSON API of
a running service, InprocClient drives a Node directly. The CLI and the
bench harness are written against this interface, so every flow works both
offline and over the wire.
"""

from __future__ import annotations

import json

from . import chain as chainmod
from . import wallet
from .content_store import MetadataDocument
from .errors import (
    BadSignature,
    ContractRevert,
    NftMarketError,
    NonceMismatch,
    NotFound,
    ValidationError,
)
from .node import Node


class RemoteError(NftMarketError):
    """Server-side failure reported over HTTP."""

    def __init__(self, status_code: int, reason: str, detail: str = ""):
        super().__init__(f"HTTP {status_code} {reason}: {detail}")
        self.status_code = status_code
        self.reason = reason


def make_envelope(keypair: wallet.KeyPair, nonce: int, call, value: int) -> dict:
    unsigned = chainmod.unsigned_tx_bytes(keypair.address, nonce, call, value)
    return {
        "unsigned_tx": unsigned.hex(),
        "signature": wallet.sign(keypair, unsigned).hex(),
        "public_key": keypair.public_key.hex(),
    }


class MarketClient:
    """Shared higher-level flows; subclasses provide the raw calls."""

    def health(self) -> dict:
        raise NotImplementedError

    def faucet(self, address: str, amount: int) -> dict:
        raise NotImplementedError

    def challenge(self, address: str) -> dict:
        raise NotImplementedError

    def connect(self, address: str, public_key: bytes, signature: bytes, nonce: str) -> dict:
        raise NotImplementedError

    def generate(self, text: str, width: int, height: int, session: str) -> dict:
        raise NotImplementedError

    def pin(self, doc: MetadataDocument) -> dict:
        raise NotImplementedError

    def submit_envelope(self, envelope: dict) -> dict:
        raise NotImplementedError

    def listings(self, offset: int = 0, limit: int = 50) -> dict:
        raise NotImplementedError

    def nft(self, token_id: int) -> dict:
        raise NotImplementedError

    def profile(self, address: str) -> dict:
        raise NotImplementedError

    def account(self, address: str) -> dict:
        raise NotImplementedError

    def cid_bytes(self, cid: str) -> bytes:
        raise NotImplementedError

    # -- flows --------------------------------------------------------------

    def login(self, keypair: wallet.KeyPair) -> str:
        ch = self.challenge(keypair.address)
        sig = wallet.sign(keypair, wallet.login_message(ch["nonce"]))
        out = self.connect(keypair.address, keypair.public_key, sig, ch["nonce"])
        return out["session_token"]

    def mint(self, keypair: wallet.KeyPair, token_uri: str, price: int) -> dict:
        nonce = self.account(keypair.address)["nonce"]
        return self.submit_envelope(make_envelope(keypair, nonce, chainmod.Mint(token_uri, price), 0))

    def buy(self, keypair: wallet.KeyPair, token_id: int, payment: int) -> dict:
        nonce = self.account(keypair.address)["nonce"]
        return self.submit_envelope(
            make_envelope(keypair, nonce, chainmod.BuyToken(token_id), payment)
        )


class InprocClient(MarketClient):
    def __init__(self, node: Node):
        self.node = node

    def health(self):
        return {
            "status": "ok",
            "height": self.node.chain.height,
            "state_hash": self.node.chain.state_hash(),
        }

    def faucet(self, address, amount):
        rcpt = self.node.faucet(address, amount)
        return {"tx_hash": rcpt.tx_hash.hex(), "receipt": self.node.receipt_view(rcpt)}

    def challenge(self, address):
        ch = self.node.registry.issue(address)
        return {"nonce": ch.nonce, "ttl_s": ch.ttl}

    def connect(self, address, public_key, signature, nonce):
        sess = self.node.registry.prove(nonce, public_key, signature)
        return {"session_token": sess.token, "expires_at": sess.expires_at}

    def generate(self, text, width, height, session):
        return {"image_cid": self.node.generate(text, width, height)}

    def pin(self, doc):
        return {"cid": self.node.store.pin_json(doc)}

    def submit_envelope(self, envelope):
        unsigned = bytes.fromhex(envelope["unsigned_tx"])
        sender, nonce, call, value = chainmod.decode_unsigned(unsigned)
        tx = chainmod.Transaction(
            sender,
            nonce,
            call,
            value,
            bytes.fromhex(envelope["public_key"]),
            bytes.fromhex(envelope["signature"]),
        )
        rcpt = self.node.submit_and_seal(tx)
        if not rcpt.success:
            raise ContractRevert(rcpt.reason)
        return {"tx_hash": rcpt.tx_hash.hex(), "receipt": self.node.receipt_view(rcpt)}

    def listings(self, offset=0, limit=50):
        return self.node.listings_view(offset=offset, limit=limit)

    def nft(self, token_id):
        return self.node.nft_view(self.node.chain.get_token(token_id))

    def profile(self, address):
        return self.node.profile_view(address)

    def account(self, address):
        return {
            "address": address,
            "balance": self.node.chain.get_balance(address),
            "nonce": self.node.chain.get_nonce(address),
        }

    def cid_bytes(self, cid):
        data, _ = self.node.store.fetch(cid)
        return data


class HttpClient(MarketClient):
    def __init__(self, base_url: str, client=None):
        import httpx

        self.base_url = base_url.rstrip("/")
        self._http = client or httpx.Client(base_url=self.base_url, timeout=60.0)
        self.last_body: bytes = b""

    def _check(self, resp):
        self.last_body = resp.content
        if resp.status_code < 400:
            return resp.json()
        try:
            body = resp.json()
        except (ValueError, json.JSONDecodeError):
            body = {"error": "Unknown", "detail": resp.text}
        reason = body.get("error", "Unknown")
        detail = body.get("detail", "")
        if resp.status_code == 403:
            raise BadSignature(detail or reason)
        if resp.status_code == 409:
            raise NonceMismatch(detail or reason)
        if resp.status_code == 404:
            raise NotFound(detail or reason)
        if resp.status_code == 422:
            raise ContractRevert(reason)
        if resp.status_code == 400:
            raise ValidationError(detail or reason)
        raise RemoteError(resp.status_code, reason, detail)

    def health(self):
        return self._check(self._http.get("/healthz"))

    def faucet(self, address, amount):
        return self._check(self._http.post("/faucet", json={"address": address, "amount": amount}))

    def challenge(self, address):
        return self._check(self._http.post("/wallet/challenge", json={"address": address}))

    def connect(self, address, public_key, signature, nonce):
        return self._check(
            self._http.post(
                "/wallet/connect",
                json={
                    "address": address,
                    "public_key": public_key.hex(),
                    "signature": signature.hex(),
                    "nonce": nonce,
                },
            )
        )

    def generate(self, text, width, height, session):
        return self._check(
            self._http.post(
                "/generate",
                json={"prompt": text, "width": width, "height": height},
                headers={"Authorization": f"Bearer {session}"},
            )
        )

    def pin(self, doc):
        payload = {
            "name": doc.name,
            "description": doc.description,
            "price": doc.price,
            "image": doc.image,
        }
        return self._check(self._http.post("/pin", json=payload))

    def submit_envelope(self, envelope):
        return self._check(self._http.post("/tx", json={"envelope": envelope}))

    def listings(self, offset=0, limit=50):
        return self._check(
            self._http.get("/market/listings", params={"offset": offset, "limit": limit})
        )

    def nft(self, token_id):
        return self._check(self._http.get(f"/nft/{token_id}"))

    def profile(self, address):
        return self._check(self._http.get(f"/profile/{address}"))

    def account(self, address):
        return self._check(self._http.get(f"/account/{address}"))

    def cid_bytes(self, cid):
        resp = self._http.get(f"/cid/{cid}")
        if resp.status_code >= 400:
            self._check(resp)
        return resp.content
