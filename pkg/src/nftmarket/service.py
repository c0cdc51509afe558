"""HTTP JSON API over the in-process node.

Read endpoints are public; /generate requires a session from the wallet
connect flow; mutations go through /tx as signed envelopes (the server never
signs anything, it only verifies). Each accepted envelope is sealed into its
own block before the response goes out.

Error mapping: 400 validation, 401 missing/expired session, 403 bad
signature, 404 not found, 409 nonce mismatch, 422 contract revert with the
machine-readable reason in the body.
"""

from __future__ import annotations

import os

from fastapi import FastAPI, Header, Request, Response
from fastapi.responses import JSONResponse

from . import chain as chainmod
from .errors import (
    BadSignature,
    ChallengeError,
    NftMarketError,
    NonceMismatch,
    NotFound,
    UnknownSender,
    ValidationError,
)
from .node import Node


def _error(status: int, reason: str, detail: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": reason, "detail": detail})


def _hex_field(body: dict, key: str) -> bytes:
    value = body.get(key)
    if not isinstance(value, str):
        raise ValidationError(f"missing hex field {key!r}")
    try:
        return bytes.fromhex(value)
    except ValueError:
        raise ValidationError(f"field {key!r} is not hex") from None


def create_app(node: Node, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="nftmarket", docs_url=None, redoc_url=None)
    app.state.node = node

    @app.exception_handler(NftMarketError)
    async def _handle(request: Request, exc: NftMarketError):
        if isinstance(exc, (BadSignature,)):
            return _error(403, "BadSignature", str(exc))
        if isinstance(exc, NonceMismatch):
            return _error(409, "NonceMismatch", str(exc))
        if isinstance(exc, NotFound):
            return _error(404, "NotFound", str(exc))
        if isinstance(exc, ChallengeError):
            return _error(401, type(exc).__name__, str(exc))
        if isinstance(exc, (ValidationError, UnknownSender)):
            return _error(400, type(exc).__name__, str(exc))
        return _error(500, type(exc).__name__, str(exc))

    @app.get("/healthz")
    def healthz():
        return {
            "status": "ok",
            "height": node.chain.height,
            "state_hash": node.chain.state_hash(),
        }

    @app.post("/wallet/challenge")
    async def wallet_challenge(request: Request):
        body = await request.json()
        address = body.get("address", "")
        ch = node.registry.issue(address)
        return {"nonce": ch.nonce, "ttl_s": ch.ttl}

    @app.post("/wallet/connect")
    async def wallet_connect(request: Request):
        body = await request.json()
        address = body.get("address", "")
        public_key = _hex_field(body, "public_key")
        signature = _hex_field(body, "signature")
        nonce = body.get("nonce") or node.registry.latest_nonce(address)
        if nonce is None:
            raise ValidationError(f"no pending challenge for {address}")
        sess = node.registry.prove(nonce, public_key, signature)
        return {"session_token": sess.token, "expires_at": sess.expires_at}

    def _require_session(authorization: str | None) -> str:
        token = ""
        if authorization and authorization.startswith("Bearer "):
            token = authorization[len("Bearer ") :]
        addr = node.registry.session_address(token)
        if addr is None:
            raise ChallengeError("missing or expired session token")
        return addr

    @app.post("/generate")
    async def generate(request: Request, authorization: str | None = Header(default=None)):
        _require_session(authorization)
        body = await request.json()
        text = body.get("prompt", "")
        width = int(body.get("width", 512))
        height = int(body.get("height", 512))
        image_cid = node.generate(text, width, height)
        return {"image_cid": image_cid}

    @app.post("/faucet")
    async def faucet(request: Request):
        body = await request.json()
        rcpt = node.faucet(body.get("address", ""), int(body.get("amount", 0)))
        return {"tx_hash": rcpt.tx_hash.hex(), "receipt": node.receipt_view(rcpt)}

    @app.post("/tx")
    async def submit_tx(request: Request):
        body = await request.json()
        envelope = body.get("envelope")
        if not isinstance(envelope, dict):
            raise ValidationError("body must carry an envelope object")
        unsigned = _hex_field(envelope, "unsigned_tx")
        signature = _hex_field(envelope, "signature")
        public_key = _hex_field(envelope, "public_key")
        sender, nonce, call, value = chainmod.decode_unsigned(unsigned)
        tx = chainmod.Transaction(sender, nonce, call, value, public_key, signature)
        rcpt = node.submit_and_seal(tx)
        if not rcpt.success:
            return JSONResponse(
                status_code=422,
                content={
                    "error": rcpt.reason,
                    "tx_hash": rcpt.tx_hash.hex(),
                    "receipt": node.receipt_view(rcpt),
                },
            )
        return {"tx_hash": rcpt.tx_hash.hex(), "receipt": node.receipt_view(rcpt)}

    @app.post("/pin")
    async def pin(request: Request):
        from .content_store import MetadataDocument

        body = await request.json()
        doc = MetadataDocument.from_obj(body)
        return {"cid": node.store.pin_json(doc)}

    @app.get("/market/listings")
    def listings(offset: int = 0, limit: int = 50):
        return node.listings_view(offset=offset, limit=limit)

    @app.get("/nft/{token_id}")
    def nft(token_id: int):
        return node.nft_view(node.chain.get_token(token_id))

    @app.get("/profile/{address}")
    def profile(address: str):
        return node.profile_view(address)

    @app.get("/account/{address}")
    def account(address: str):
        return {
            "address": address,
            "balance": node.chain.get_balance(address),
            "nonce": node.chain.get_nonce(address),
        }

    @app.get("/cid/{cid}")
    def fetch_cid(cid: str):
        data, media_type = node.store.fetch(cid)
        return Response(content=data, media_type=media_type)

    if ui_dir and os.path.isdir(ui_dir):
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def serve(config: dict, ui_dir: str | None = None) -> None:
    """Blocking entry point: build a node from config and run uvicorn."""
    import uvicorn

    from .genart import make_provider

    node = Node(
        data_dir=config.get("data_dir") or None,
        provider=make_provider(config),
        challenge_ttl_s=float(config.get("challenge_ttl_s", 120)),
    )
    app = create_app(node, ui_dir=ui_dir)
    uvicorn.run(app, host="127.0.0.1", port=int(config.get("port", 8570)), log_level="warning")
