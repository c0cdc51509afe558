/** Signing parity against golden vectors produced by the server-side
 * implementation: same seed and fields must yield byte-identical unsigned
 * transactions and signatures (Ed25519 signing is deterministic). */

import { describe, expect, it } from "vitest";

import { bytesToHex, hexToBytes } from "../src/codec";
import { deriveAddress, keystoreFromSeed } from "../src/keystore";
import { ContractCall, signEnvelope, unsignedTxBytes } from "../src/tx";
import vectors from "./golden_vectors.json";

function toCall(spec: any): ContractCall {
  if (spec.kind === "mint") return { kind: "mint", tokenUri: spec.tokenUri, price: BigInt(spec.price) };
  if (spec.kind === "buy") return { kind: "buy", tokenId: BigInt(spec.tokenId) };
  return { kind: "transfer", to: spec.to };
}

describe("golden transaction vectors", () => {
  for (const [i, vec] of vectors.transactions.entries()) {
    it(`case ${i}: ${vec.call.kind}`, () => {
      const ks = keystoreFromSeed(hexToBytes(vec.seed));
      expect(ks.publicKeyHex).toBe(vec.public_key);
      expect(ks.address).toBe(vec.address);

      const unsigned = unsignedTxBytes(
        ks.address,
        BigInt(vec.nonce),
        toCall(vec.call),
        BigInt(vec.value),
      );
      expect(bytesToHex(unsigned)).toBe(vec.unsigned_tx);

      const env = signEnvelope(ks, BigInt(vec.nonce), toCall(vec.call), BigInt(vec.value));
      expect(env.unsigned_tx).toBe(vec.unsigned_tx);
      expect(env.signature).toBe(vec.signature);
      expect(env.public_key).toBe(vec.public_key);
    });
  }
});

describe("golden login vector", () => {
  it("signs login:<nonce> identically", () => {
    const vec = vectors.login;
    const ks = keystoreFromSeed(hexToBytes(vec.seed));
    expect(ks.address).toBe(vec.address);
    const message = new TextEncoder().encode(`login:${vec.nonce}`);
    expect(bytesToHex(message)).toBe(vec.message_hex);
    expect(bytesToHex(ks.sign(message))).toBe(vec.signature);
  });
});

describe("address derivation", () => {
  it("hashes the public key and keeps 20 bytes", () => {
    const ks = keystoreFromSeed(hexToBytes(vectors.transactions[0].seed));
    expect(deriveAddress(hexToBytes(ks.publicKeyHex))).toBe(ks.address);
    expect(ks.address).toMatch(/^0x[0-9a-f]{40}$/);
  });
});
