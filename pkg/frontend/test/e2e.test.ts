// @vitest-environment node
/** Full-stack flow against the real service: spawn `nftmarket serve` in a
 * temp directory, then drive challenge/connect, generate, pin, mint, and buy
 * through MarketApi with locally signed envelopes. */

import { spawn, ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { MarketApi } from "../src/api";
import { keystoreFromSeed } from "../src/keystore";

const PORT = 8600 + Math.floor(Math.random() * 400);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;
let workdir: string;

beforeAll(async () => {
  workdir = mkdtempSync(join(tmpdir(), "nftmarket-e2e-"));
  const cfg = join(workdir, "service.conf");
  writeFileSync(cfg, `port=${PORT}\ndata_dir=${join(workdir, "data")}\n`);
  server = spawn("nftmarket", ["--target", join(workdir, "data"), "--config", cfg, "serve"], {
    stdio: ["ignore", "inherit", "inherit"],
    env: { ...process.env, NFTMARKET_NO_NUMBA: "1" },
  });
  const deadline = Date.now() + 60000;
  for (;;) {
    if (server.exitCode !== null) throw new Error(`server exited: ${server.exitCode}`);
    try {
      const res = await fetch(`${BASE}/healthz`);
      if (res.ok) break;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) throw new Error("server did not come up");
    await new Promise((r) => setTimeout(r, 200));
  }
});

afterAll(() => {
  server?.kill("SIGTERM");
  rmSync(workdir, { recursive: true, force: true });
});

const seller = keystoreFromSeed(new Uint8Array(32).fill(0x21));
const buyer = keystoreFromSeed(new Uint8Array(32).fill(0x22));

describe("end-to-end against the real service", () => {
  const api = new MarketApi(BASE);
  let tokenId: number;
  let imageCid: string;

  it("funds both accounts", async () => {
    await api.faucet(seller.address, 1000);
    await api.faucet(buyer.address, 1000);
    expect((await api.account(seller.address)).balance).toBe(1000);
  });

  it("logs in via challenge/connect and generates an image", async () => {
    await api.login(seller);
    imageCid = await api.generate("teal archipelago", 256, 256);
    expect(imageCid).toMatch(/^Qm/);
    const res = await fetch(api.cidUrl(imageCid));
    expect(res.headers.get("content-type")).toBe("image/png");
    const bytes = new Uint8Array(await res.arrayBuffer());
    expect(Array.from(bytes.slice(0, 4))).toEqual([0x89, 0x50, 0x4e, 0x47]);
  });

  it("rejects /generate without a session", async () => {
    const anon = new MarketApi(BASE);
    await expect(anon.generate("x")).rejects.toMatchObject({ status: 401 });
  });

  it("pins metadata and mints from a locally signed envelope", async () => {
    const metaCid = await api.pinMetadata({
      name: "archipelago",
      description: "teal water",
      price: 120,
      image: `cid:${imageCid}`,
    });
    const out = await api.mint(seller, metaCid, 120);
    expect(out.receipt.status).toBe("Success");
    tokenId = out.receipt.events[0].token_id;
    const listings = await api.listings();
    expect(listings.total).toBe(1);
    expect(listings.items[0].token_id).toBe(tokenId);
    expect(listings.items[0].metadata!.name).toBe("archipelago");
  });

  it("rejects a tampered signature", async () => {
    const metaCid = await api.pinMetadata({ name: "x", description: "y", price: 1, image: "cid:QmX" });
    const acct = await api.account(seller.address);
    const { signEnvelope } = await import("../src/tx");
    const env = signEnvelope(seller, BigInt(acct.nonce), { kind: "mint", tokenUri: metaCid, price: 1n }, 0n);
    const flipped = (parseInt(env.signature.slice(0, 2), 16) ^ 1).toString(16).padStart(2, "0");
    env.signature = flipped + env.signature.slice(2);
    const res = await fetch(`${BASE}/tx`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ envelope: env }),
    });
    expect(res.status).toBe(403);
    expect((await res.json()).error).toBe("BadSignature");
  });

  it("surfaces a contract revert reason", async () => {
    await expect(api.buy(buyer, tokenId, 60)).rejects.toMatchObject({
      status: 422,
      reason: "WrongPayment",
    });
  });

  it("buys at the asking price and settles balances", async () => {
    const out = await api.buy(buyer, tokenId, 120);
    expect(out.receipt.status).toBe("Success");
    const prof = await api.profile(buyer.address);
    expect(prof.nft_count).toBe(1);
    expect(prof.tokens[0].token_id).toBe(tokenId);
    expect((await api.account(buyer.address)).balance).toBe(880);
    expect((await api.account(seller.address)).balance).toBe(1120);
    expect((await api.nft(tokenId)).owner).toBe(buyer.address);
    expect((await api.nft(tokenId)).listed).toBe(false);
  });
});
