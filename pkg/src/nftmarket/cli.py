"""Command-line surface: every marketplace flow scriptable without the UI.

Target selection: --target is either a service URL (http://...) or a data
directory for the embedded in-process stack (default ./nftmarket-data).
Exit codes: 0 success, 1 validation error, 2 remote or contract error.
"""

from __future__ import annotations

import json
import sys

import click

from . import perf, wallet
from .client import HttpClient, InprocClient, MarketClient, RemoteError
from .config import load_config
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

EXIT_VALIDATION = 1
EXIT_REMOTE = 2


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _make_client(target: str) -> MarketClient:
    if target.startswith("http://") or target.startswith("https://"):
        return HttpClient(target)
    return InprocClient(Node(data_dir=target))


def _load_keys(keystore: str | None) -> wallet.KeyPair:
    if not keystore:
        _fail(EXIT_VALIDATION, "this command requires --keystore")
    try:
        return wallet.load_keystore(keystore)
    except (OSError, ValidationError) as e:
        _fail(EXIT_VALIDATION, str(e))


def _emit(ctx, payload: dict, human_lines: list[str]):
    if ctx.obj["json"]:
        client = ctx.obj.get("client")
        if isinstance(client, HttpClient) and client.last_body:
            # pass-through: exactly what the server sent
            sys.stdout.buffer.write(client.last_body)
            sys.stdout.buffer.write(b"\n")
        else:
            click.echo(json.dumps(payload))
    else:
        for line in human_lines:
            click.echo(line)


def _run(ctx, fn):
    try:
        return fn()
    except (ValidationError,) as e:
        _fail(EXIT_VALIDATION, str(e))
    except (ContractRevert,) as e:
        _fail(EXIT_REMOTE, f"transaction reverted: {e.reason}")
    except (BadSignature, NonceMismatch, NotFound, RemoteError, NftMarketError) as e:
        _fail(EXIT_REMOTE, str(e))


@click.group()
@click.option("--target", default="./nftmarket-data", show_default=True,
              help="Service URL (http://...) or data directory for in-process mode.")
@click.option("--keystore", default=None, type=click.Path(), help="Path to the seed keystore file.")
@click.option("--output", "output", type=click.Choice(["human", "json"]), default="human",
              show_default=True)
@click.option("--config", "config_path", default=None, type=click.Path(exists=True))
@click.pass_context
def main(ctx, target, keystore, output, config_path):
    ctx.ensure_object(dict)
    ctx.obj.update(
        target=target,
        keystore=keystore,
        json=(output == "json"),
        config_path=config_path,
    )


def _client(ctx) -> MarketClient:
    if "client" not in ctx.obj:
        ctx.obj["client"] = _run(ctx, lambda: _make_client(ctx.obj["target"]))
    return ctx.obj["client"]


@main.command()
@click.option("--out", "out_path", required=True, type=click.Path(),
              help="Where to write the keystore file.")
@click.pass_context
def keygen(ctx, out_path):
    """Generate a keypair and write its seed to a keystore file."""
    kp = wallet.generate_keypair()
    wallet.save_keystore(out_path, kp)
    _emit(ctx, {"address": kp.address, "keystore": out_path},
          [f"address   {kp.address}", f"keystore  {out_path}"])


@main.command()
@click.option("--address", default=None, help="Recipient (default: keystore address).")
@click.option("--amount", required=True, type=int)
@click.pass_context
def faucet(ctx, address, amount):
    """Credit an address with funds."""
    if address is None:
        address = _load_keys(ctx.obj["keystore"]).address
    client = _client(ctx)
    out = _run(ctx, lambda: client.faucet(address, amount))
    _emit(ctx, out, [f"funded {address} with {amount}  (tx {out['tx_hash'][:16]}…)"])


@main.command()
@click.option("--prompt", "prompt_text", required=True)
@click.option("--width", default=512, show_default=True, type=int)
@click.option("--height", default=512, show_default=True, type=int)
@click.option("--save", "save_path", default=None, type=click.Path(),
              help="Also write the generated PNG to this path.")
@click.pass_context
def generate(ctx, prompt_text, width, height, save_path):
    """Generate an image from a prompt and pin it; prints the image CID."""
    kp = _load_keys(ctx.obj["keystore"])
    client = _client(ctx)

    def go():
        session = client.login(kp)
        return client.generate(prompt_text, width, height, session)

    out = _run(ctx, go)
    if save_path:
        data = _run(ctx, lambda: client.cid_bytes(out["image_cid"]))
        with open(save_path, "wb") as f:
            f.write(data)
    _emit(ctx, out, [f"image_cid  {out['image_cid']}"])


@main.command()
@click.option("--name", required=True)
@click.option("--description", required=True)
@click.option("--price", required=True, type=int, help="Price in smallest currency units.")
@click.option("--prompt", "prompt_text", default=None,
              help="Generate the image from this prompt first.")
@click.option("--image-cid", "image_cid", default=None, help="Use an already-pinned image.")
@click.pass_context
def mint(ctx, name, description, price, prompt_text, image_cid):
    """Create the metadata document, pin it, and mint + list the token."""
    if (prompt_text is None) == (image_cid is None):
        _fail(EXIT_VALIDATION, "provide exactly one of --prompt or --image-cid")
    kp = _load_keys(ctx.obj["keystore"])
    client = _client(ctx)

    def go():
        cid = image_cid
        if prompt_text is not None:
            session = client.login(kp)
            cid = client.generate(prompt_text, 512, 512, session)["image_cid"]
        doc = MetadataDocument(name=name, description=description, price=price,
                               image=f"cid:{cid}")
        meta_cid = client.pin(doc)["cid"]
        return client.mint(kp, meta_cid, price)

    out = _run(ctx, go)
    token_id = out["receipt"]["events"][0]["token_id"]
    _emit(ctx, out, [f"minted token {token_id}  (tx {out['tx_hash'][:16]}…)"])


@main.command()
@click.option("--offset", default=0, type=int)
@click.option("--limit", default=50, type=int)
@click.pass_context
def listings(ctx, offset, limit):
    """Show listed tokens."""
    client = _client(ctx)
    out = _run(ctx, lambda: client.listings(offset, limit))
    lines = [f"{'id':>4}  {'price':>10}  {'owner':<42}  name"]
    for item in out["items"]:
        name = (item["metadata"] or {}).get("name", "?")
        lines.append(f"{item['token_id']:>4}  {item['price']:>10}  {item['owner']:<42}  {name}")
    lines.append(f"total: {out['total']}")
    _emit(ctx, out, lines)


@main.command()
@click.argument("token_id", type=int)
@click.pass_context
def show(ctx, token_id):
    """Show one token with resolved metadata."""
    client = _client(ctx)
    out = _run(ctx, lambda: client.nft(token_id))
    meta = out["metadata"] or {}
    _emit(ctx, out, [
        f"token    {out['token_id']}",
        f"name     {meta.get('name', '?')}",
        f"desc     {meta.get('description', '?')}",
        f"price    {out['price']}",
        f"owner    {out['owner']}",
        f"creator  {out['creator']}",
        f"listed   {out['listed']}",
        f"uri      {out['token_uri']}",
        f"image    {meta.get('image', '?')}",
    ])


@main.command()
@click.argument("token_id", type=int)
@click.pass_context
def buy(ctx, token_id):
    """Buy a listed token at its asking price."""
    kp = _load_keys(ctx.obj["keystore"])
    client = _client(ctx)

    def go():
        price = client.nft(token_id)["price"]
        return client.buy(kp, token_id, price)

    out = _run(ctx, go)
    _emit(ctx, out, [f"bought token {token_id}  (tx {out['tx_hash'][:16]}…)"])


@main.command()
@click.argument("address", required=False)
@click.pass_context
def profile(ctx, address):
    """Show owned tokens, count and total value for an address."""
    if address is None:
        address = _load_keys(ctx.obj["keystore"]).address
    client = _client(ctx)
    out = _run(ctx, lambda: client.profile(address))
    lines = [
        f"address      {out['address']}",
        f"nft_count    {out['nft_count']}",
        f"total_value  {out['total_value']}",
    ]
    for t in out["tokens"]:
        name = (t["metadata"] or {}).get("name", "?")
        lines.append(f"  #{t['token_id']}  {name}  ({t['price']})")
    _emit(ctx, out, lines)


@main.command()
@click.pass_context
def serve(ctx):
    """Run the HTTP service (config from --config or defaults)."""
    from .service import serve as run_service

    cfg = load_config(ctx.obj["config_path"])
    if ctx.obj["target"] and not ctx.obj["target"].startswith("http"):
        cfg.setdefault("data_dir", ctx.obj["target"])
        if not cfg.get("data_dir"):
            cfg["data_dir"] = ctx.obj["target"]
    import os

    ui_dir = os.path.join(os.path.dirname(os.path.dirname(os.path.dirname(__file__))),
                          "frontend", "dist")
    _run(ctx, lambda: run_service(cfg, ui_dir=ui_dir if os.path.isdir(ui_dir) else None))


@main.command()
@click.option("--phase", type=click.Choice(list(perf.PHASES)), required=True)
@click.option("--n", "n", default=20, show_default=True, type=int)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--format", "fmt", type=click.Choice(["csv", "plotdata"]), default="csv",
              show_default=True)
@click.pass_context
def bench(ctx, phase, n, out_path, fmt):
    """Measure per-request latency and emit a CSV or plot-data file."""
    client = _client(ctx)
    report = _run(ctx, lambda: perf.run_bench(phase, n, client))
    perf.emit(report, out_path, fmt)
    summary = {
        "phase": report.phase,
        "n": report.n,
        "mean_ms": report.mean_ms,
        "max_ms": report.max_ms,
        "min_ms": report.min_ms,
        "p50_ms": report.p50_ms,
        "p95_ms": report.p95_ms,
        "failures": report.failures,
        "out": out_path,
    }
    if ctx.obj["json"]:
        click.echo(json.dumps(summary))
    else:
        click.echo(
            f"{report.phase}: n={report.n} mean={report.mean_ms:.3f}ms "
            f"min={report.min_ms:.3f}ms p50={report.p50_ms:.3f}ms "
            f"p95={report.p95_ms:.3f}ms max={report.max_ms:.3f}ms "
            f"failures={report.failures} -> {out_path}"
        )


if __name__ == "__main__":
    main()
