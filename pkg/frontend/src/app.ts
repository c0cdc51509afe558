/** Hash-routed single-page UI: #/market, #/nft/<id>, #/mint, #/profile,
 * #/connect. Every mutation re-fetches the data it rendered from, so the
 * page always shows post-seal server state, never an optimistic guess. */

import { ApiError, MarketApi, NftView } from "./api";
import { clearKeystore, createKeystore, Keystore, loadKeystore } from "./keystore";

const api = new MarketApi("");
let keystore: Keystore | null = null;

function el(tag: string, attrs: Record<string, string> = {}, ...children: (Node | string)[]) {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  node.append(...children);
  return node;
}

function statusLine(target: HTMLElement, text: string, kind: "ok" | "err" = "ok") {
  const line = el("p", { class: `status ${kind}` }, text);
  target.prepend(line);
}

function describeError(err: unknown): string {
  if (err instanceof ApiError) {
    return err.detail ? `${err.reason}: ${err.detail}` : err.reason;
  }
  return String(err);
}

function card(nft: NftView): HTMLElement {
  const name = nft.metadata ? nft.metadata.name : `token ${nft.token_id}`;
  const imageCid = nft.metadata?.image?.startsWith("cid:")
    ? nft.metadata.image.slice(4)
    : null;
  const node = el(
    "div",
    { class: "card", "data-token-id": String(nft.token_id) },
    imageCid ? el("img", { src: api.cidUrl(imageCid), alt: name }) : el("div", { class: "noimg" }, "no image"),
    el("h3", {}, name),
    el("p", { class: "price" }, nft.listed ? `${nft.price} coins` : "not listed"),
    el("a", { href: `#/nft/${nft.token_id}` }, "view"),
  );
  return node;
}

// --- pages -----------------------------------------------------------------

async function marketPage(root: HTMLElement) {
  const listings = await api.listings();
  root.append(el("h2", {}, `Marketplace (${listings.total} listed)`));
  const grid = el("div", { class: "grid" });
  for (const nft of listings.items) grid.append(card(nft));
  root.append(grid);
}

async function nftPage(root: HTMLElement, tokenId: number) {
  const nft = await api.nft(tokenId);
  const name = nft.metadata ? nft.metadata.name : `token ${nft.token_id}`;
  root.append(el("h2", {}, name));
  const imageCid = nft.metadata?.image?.startsWith("cid:") ? nft.metadata.image.slice(4) : null;
  if (imageCid) root.append(el("img", { class: "detail", src: api.cidUrl(imageCid), alt: name }));
  root.append(
    el("p", {}, nft.metadata ? nft.metadata.description : "(metadata unavailable)"),
    el("dl", {},
      el("dt", {}, "owner"), el("dd", {}, nft.owner),
      el("dt", {}, "creator"), el("dd", {}, nft.creator),
      el("dt", {}, "price"), el("dd", {}, String(nft.price)),
      el("dt", {}, "listed"), el("dd", {}, String(nft.listed)),
      el("dt", {}, "metadata cid"), el("dd", {}, nft.token_uri),
    ),
  );
  if (nft.listed && keystore && keystore.address !== nft.owner) {
    const btn = el("button", { id: "buy" }, `Buy for ${nft.price}`) as HTMLButtonElement;
    btn.onclick = async () => {
      btn.disabled = true;
      try {
        await api.buy(keystore!, nft.token_id, nft.price);
        render(); // re-fetch the token; ownership changed server-side
      } catch (err) {
        statusLine(root, describeError(err), "err");
        btn.disabled = false;
      }
    };
    root.append(btn);
  }
}

async function mintPage(root: HTMLElement) {
  if (!keystore) {
    root.append(el("p", {}, "Connect a wallet first."), el("a", { href: "#/connect" }, "connect"));
    return;
  }
  root.append(el("h2", {}, "Mint"));
  const form = el("form", { id: "mint-form" },
    el("label", {}, "Prompt", el("input", { name: "prompt", required: "" })),
    el("label", {}, "Name", el("input", { name: "name", required: "" })),
    el("label", {}, "Description", el("input", { name: "description", required: "" })),
    el("label", {}, "Price", el("input", { name: "price", type: "number", min: "1", required: "" })),
    el("button", { type: "submit" }, "Generate + mint"),
  ) as HTMLFormElement;
  form.onsubmit = async (ev) => {
    ev.preventDefault();
    const data = new FormData(form);
    try {
      if (!api.session) await api.login(keystore!);
      const imageCid = await api.generate(String(data.get("prompt")));
      const price = Number(data.get("price"));
      const metaCid = await api.pinMetadata({
        name: String(data.get("name")),
        description: String(data.get("description")),
        price,
        image: `cid:${imageCid}`,
      });
      const out = await api.mint(keystore!, metaCid, price);
      const tokenId = out.receipt.events[0]?.token_id;
      statusLine(root, `minted token ${tokenId} (tx ${out.tx_hash.slice(0, 16)}…)`);
      location.hash = `#/nft/${tokenId}`;
    } catch (err) {
      statusLine(root, describeError(err), "err");
    }
  };
  root.append(form);
}

async function profilePage(root: HTMLElement) {
  if (!keystore) {
    root.append(el("p", {}, "Connect a wallet first."), el("a", { href: "#/connect" }, "connect"));
    return;
  }
  const [prof, acct] = await Promise.all([
    api.profile(keystore.address),
    api.account(keystore.address),
  ]);
  root.append(
    el("h2", {}, "Profile"),
    el("p", { class: "addr" }, prof.address),
    el("p", {}, `balance ${acct.balance}, nonce ${acct.nonce}`),
    el("p", {}, `${prof.nft_count} tokens, total value ${prof.total_value}`),
  );
  const faucetBtn = el("button", { id: "faucet" }, "Faucet 1000") as HTMLButtonElement;
  faucetBtn.onclick = async () => {
    try {
      await api.faucet(keystore!.address, 1000);
      render();
    } catch (err) {
      statusLine(root, describeError(err), "err");
    }
  };
  root.append(faucetBtn);
  const grid = el("div", { class: "grid" });
  for (const nft of prof.tokens) grid.append(card(nft));
  root.append(grid);
}

async function connectPage(root: HTMLElement) {
  root.append(el("h2", {}, "Wallet"));
  if (keystore) {
    root.append(el("p", { class: "addr" }, `connected as ${keystore.address}`));
    const out = el("button", { id: "disconnect" }, "Forget key") as HTMLButtonElement;
    out.onclick = () => {
      clearKeystore();
      keystore = null;
      render();
    };
    root.append(out);
    return;
  }
  const btn = el("button", { id: "create" }, "Create wallet in this browser") as HTMLButtonElement;
  btn.onclick = async () => {
    keystore = createKeystore();
    try {
      await api.login(keystore);
      statusLine(root, "connected");
    } catch (err) {
      statusLine(root, describeError(err), "err");
    }
    render();
  };
  root.append(
    el("p", {}, "The key is generated and stored in this browser only; the server sees signatures, never the seed."),
    btn,
  );
}

// --- router ----------------------------------------------------------------

export async function render() {
  const root = document.getElementById("app");
  if (!root) return;
  root.replaceChildren();
  const nav = el("nav", {},
    el("a", { href: "#/market" }, "market"), " ",
    el("a", { href: "#/mint" }, "mint"), " ",
    el("a", { href: "#/profile" }, "profile"), " ",
    el("a", { href: "#/connect" }, keystore ? keystore.address.slice(0, 10) + "…" : "connect"),
  );
  root.append(nav);
  const body = el("main", {});
  root.append(body);
  const hash = location.hash || "#/market";
  try {
    const nftMatch = hash.match(/^#\/nft\/(\d+)$/);
    if (nftMatch) await nftPage(body, Number(nftMatch[1]));
    else if (hash === "#/mint") await mintPage(body);
    else if (hash === "#/profile") await profilePage(body);
    else if (hash === "#/connect") await connectPage(body);
    else await marketPage(body);
  } catch (err) {
    body.append(el("p", { class: "status err" }, describeError(err)));
  }
}

export function start() {
  keystore = loadKeystore();
  window.addEventListener("hashchange", render);
  render();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  start();
}
