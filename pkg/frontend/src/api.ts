/** Typed client for the marketplace HTTP API.
 *
 * Mutations sign locally and submit envelopes; a 409 on /tx means our cached
 * nonce went stale, so the client re-reads the account nonce and retries once.
 * Server errors carry {error, detail}; both are surfaced in ApiError.
 */

import { Keystore } from "./keystore";
import { ContractCall, Envelope, signEnvelope } from "./tx";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly reason: string,
    readonly detail: string,
  ) {
    super(`${reason}: ${detail}`);
  }
}

export interface NftView {
  token_id: number;
  owner: string;
  creator: string;
  token_uri: string;
  price: number;
  listed: boolean;
  metadata: { name: string; description: string; price: number; image: string } | null;
}

export interface ListingsView {
  items: NftView[];
  total: number;
}

export interface ProfileView {
  address: string;
  nft_count: number;
  total_value: number;
  tokens: NftView[];
}

export interface AccountView {
  address: string;
  balance: number;
  nonce: number;
}

export interface TxResult {
  tx_hash: string;
  receipt: {
    tx_hash: string;
    status: string;
    reason: string | null;
    block_height: number;
    events: Array<{ kind: string; token_id: number; [k: string]: unknown }>;
  };
}

async function parseError(res: Response): Promise<ApiError> {
  let reason = `HTTP ${res.status}`;
  let detail = "";
  try {
    const body = await res.json();
    if (typeof body.error === "string") reason = body.error;
    if (typeof body.detail === "string") detail = body.detail;
  } catch {
    // non-JSON error body; keep the status line
  }
  return new ApiError(res.status, reason, detail);
}

export class MarketApi {
  private sessionToken: string | null = null;

  constructor(readonly baseUrl: string = "") {}

  private async request(path: string, init?: RequestInit): Promise<any> {
    const res = await fetch(this.baseUrl + path, init);
    if (!res.ok) throw await parseError(res);
    return res.json();
  }

  private post(path: string, body: unknown, headers: Record<string, string> = {}) {
    return this.request(path, {
      method: "POST",
      headers: { "content-type": "application/json", ...headers },
      body: JSON.stringify(body),
    });
  }

  // --- reads ---

  health(): Promise<{ status: string; height: number; state_hash: string }> {
    return this.request("/healthz");
  }

  listings(offset = 0, limit = 50): Promise<ListingsView> {
    return this.request(`/market/listings?offset=${offset}&limit=${limit}`);
  }

  nft(tokenId: number): Promise<NftView> {
    return this.request(`/nft/${tokenId}`);
  }

  profile(address: string): Promise<ProfileView> {
    return this.request(`/profile/${address}`);
  }

  account(address: string): Promise<AccountView> {
    return this.request(`/account/${address}`);
  }

  cidUrl(cid: string): string {
    return `${this.baseUrl}/cid/${cid}`;
  }

  // --- session ---

  get session(): string | null {
    return this.sessionToken;
  }

  async login(ks: Keystore): Promise<string> {
    const challenge = await this.post("/wallet/challenge", { address: ks.address });
    const message = new TextEncoder().encode(`login:${challenge.nonce}`);
    const signature = ks.sign(message);
    const out = await this.post("/wallet/connect", {
      address: ks.address,
      nonce: challenge.nonce,
      public_key: ks.publicKeyHex,
      signature: Array.from(signature, (b) => b.toString(16).padStart(2, "0")).join(""),
    });
    this.sessionToken = out.session_token;
    return out.session_token;
  }

  // --- mutations ---

  faucet(address: string, amount: number): Promise<TxResult> {
    return this.post("/faucet", { address, amount });
  }

  async generate(prompt: string, width = 512, height = 512): Promise<string> {
    if (!this.sessionToken) throw new ApiError(401, "ChallengeError", "not logged in");
    const out = await this.post(
      "/generate",
      { prompt, width, height },
      { authorization: `Bearer ${this.sessionToken}` },
    );
    return out.image_cid;
  }

  async pinMetadata(doc: {
    name: string;
    description: string;
    price: number;
    image: string;
  }): Promise<string> {
    const out = await this.post("/pin", doc);
    return out.cid;
  }

  private submitEnvelope(envelope: Envelope): Promise<TxResult> {
    return this.post("/tx", { envelope });
  }

  /** Sign and submit; on a nonce conflict re-read the account and retry once. */
  async sendTx(ks: Keystore, call: ContractCall, value: bigint): Promise<TxResult> {
    const acct = await this.account(ks.address);
    try {
      return await this.submitEnvelope(signEnvelope(ks, BigInt(acct.nonce), call, value));
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        const fresh = await this.account(ks.address);
        return this.submitEnvelope(signEnvelope(ks, BigInt(fresh.nonce), call, value));
      }
      throw err;
    }
  }

  mint(ks: Keystore, metaCid: string, price: number): Promise<TxResult> {
    return this.sendTx(ks, { kind: "mint", tokenUri: metaCid, price: BigInt(price) }, 0n);
  }

  buy(ks: Keystore, tokenId: number, price: number): Promise<TxResult> {
    return this.sendTx(ks, { kind: "buy", tokenId: BigInt(tokenId) }, BigInt(price));
  }

  transfer(ks: Keystore, to: string, amount: number): Promise<TxResult> {
    return this.sendTx(ks, { kind: "transfer", to }, BigInt(amount));
  }
}
