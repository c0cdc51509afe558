/** Browser-side keystore: the Ed25519 seed lives in localStorage and never
 * appears in any network request; only the derived public key and
 * signatures leave this module. */

import * as ed from "@noble/ed25519";
import { sha512 } from "@noble/hashes/sha512";
import { sha256 } from "@noble/hashes/sha256";

import { bytesToHex, hexToBytes } from "./codec";

// noble-ed25519 needs a sync sha512 to enable the sync API
ed.etc.sha512Sync = (...m: Uint8Array[]) => sha512(ed.etc.concatBytes(...m));

const STORAGE_KEY = "nftmarket.seed";

export interface Keystore {
  address: string;
  publicKeyHex: string;
  sign(message: Uint8Array): Uint8Array;
}

export function deriveAddress(publicKey: Uint8Array): string {
  return "0x" + bytesToHex(sha256(publicKey).slice(0, 20));
}

class SeedKeystore implements Keystore {
  readonly address: string;
  readonly publicKeyHex: string;
  private readonly seed: Uint8Array;

  constructor(seed: Uint8Array) {
    if (seed.length !== 32) throw new Error("seed must be 32 bytes");
    this.seed = seed;
    const pub = ed.getPublicKey(seed);
    this.publicKeyHex = bytesToHex(pub);
    this.address = deriveAddress(pub);
  }

  sign(message: Uint8Array): Uint8Array {
    return ed.sign(message, this.seed);
  }
}

export function keystoreFromSeed(seed: Uint8Array): Keystore {
  return new SeedKeystore(seed);
}

export function loadKeystore(storage: Storage = localStorage): Keystore | null {
  const hex = storage.getItem(STORAGE_KEY);
  if (!hex) return null;
  return new SeedKeystore(hexToBytes(hex));
}

export function createKeystore(storage: Storage = localStorage): Keystore {
  const seed = crypto.getRandomValues(new Uint8Array(32));
  storage.setItem(STORAGE_KEY, bytesToHex(seed));
  return new SeedKeystore(seed);
}

export function clearKeystore(storage: Storage = localStorage): void {
  storage.removeItem(STORAGE_KEY);
}
