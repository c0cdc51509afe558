/** Canonical transaction encoding. The unsigned byte layout here must match
 * the server's decoder exactly: address bytes, nonce, call bytes, and value,
 * each length-prefixed or fixed-width. The signature covers the unsigned
 * bytes verbatim. */

import { bytesToHex, concat, encBytes, encStr, encU64, hexToBytes } from "./codec";
import { Keystore } from "./keystore";

const OP_MINT = 0x01;
const OP_BUY = 0x02;
const OP_TRANSFER = 0x03;

export type ContractCall =
  | { kind: "mint"; tokenUri: string; price: bigint }
  | { kind: "buy"; tokenId: bigint }
  | { kind: "transfer"; to: string };

export function addressBytes(address: string): Uint8Array {
  if (!/^0x[0-9a-f]{40}$/.test(address)) {
    throw new Error(`invalid address: ${address}`);
  }
  return hexToBytes(address.slice(2));
}

export function encodeCall(call: ContractCall): Uint8Array {
  switch (call.kind) {
    case "mint":
      return concat(Uint8Array.of(OP_MINT), encStr(call.tokenUri), encU64(call.price));
    case "buy":
      return concat(Uint8Array.of(OP_BUY), encU64(call.tokenId));
    case "transfer":
      return concat(Uint8Array.of(OP_TRANSFER), encBytes(addressBytes(call.to)));
  }
}

export function unsignedTxBytes(
  sender: string,
  nonce: bigint,
  call: ContractCall,
  value: bigint,
): Uint8Array {
  return concat(
    encBytes(addressBytes(sender)),
    encU64(nonce),
    encBytes(encodeCall(call)),
    encU64(value),
  );
}

export interface Envelope {
  unsigned_tx: string;
  signature: string;
  public_key: string;
}

export function signEnvelope(
  ks: Keystore,
  nonce: bigint,
  call: ContractCall,
  value: bigint,
): Envelope {
  const unsigned = unsignedTxBytes(ks.address, nonce, call, value);
  return {
    unsigned_tx: bytesToHex(unsigned),
    signature: bytesToHex(ks.sign(unsigned)),
    public_key: ks.publicKeyHex,
  };
}
