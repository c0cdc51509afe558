/** DOM rendering: the router draws the gallery, detail, and connect pages
 * from API responses, and mutations trigger a re-fetch instead of patching
 * the DOM optimistically. */

import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

const NFT = (id: number, listed = true) => ({
  token_id: id,
  owner: "0x" + "11".repeat(20),
  creator: "0x" + "11".repeat(20),
  token_uri: "QmMeta" + id,
  price: 40 + id,
  listed,
  metadata: { name: `piece ${id}`, description: `desc ${id}`, price: 40 + id, image: "cid:QmImg" + id },
});

let fetchCalls: string[];
let listings: any;

beforeEach(async () => {
  localStorage.clear();
  location.hash = "";
  document.body.innerHTML = '<div id="app"></div>';
  fetchCalls = [];
  listings = { items: [NFT(1), NFT(2)], total: 2 };
  vi.stubGlobal("fetch", async (url: string) => {
    const path = String(url).split("?")[0];
    fetchCalls.push(path);
    let body: any = { error: "NotFound", detail: path };
    let status = 404;
    if (path === "/market/listings") [status, body] = [200, listings];
    else if (path.startsWith("/nft/")) [status, body] = [200, NFT(Number(path.split("/")[2]))];
    return new Response(JSON.stringify(body), {
      status,
      headers: { "content-type": "application/json" },
    });
  });
});

afterEach(() => vi.unstubAllGlobals());

async function renderApp() {
  vi.resetModules();
  const mod = await import("../src/app");
  await mod.render();
  // the page functions await fetches inside render; give microtasks a beat
  await new Promise((r) => setTimeout(r, 0));
  return mod;
}

describe("market page", () => {
  it("renders one card per listing with name, price and image", async () => {
    await renderApp();
    const cards = document.querySelectorAll(".card");
    expect(cards).toHaveLength(2);
    expect(cards[0].querySelector("h3")!.textContent).toBe("piece 1");
    expect(cards[0].querySelector(".price")!.textContent).toContain("41");
    expect(cards[0].querySelector("img")!.getAttribute("src")).toBe("/cid/QmImg1");
    expect(document.querySelector("h2")!.textContent).toContain("2 listed");
  });

  it("shows an empty gallery without errors", async () => {
    listings = { items: [], total: 0 };
    await renderApp();
    expect(document.querySelectorAll(".card")).toHaveLength(0);
    expect(document.querySelector("h2")!.textContent).toContain("0 listed");
  });
});

describe("nft detail page", () => {
  it("renders metadata fields", async () => {
    location.hash = "#/nft/1";
    await renderApp();
    expect(document.querySelector("h2")!.textContent).toBe("piece 1");
    expect(document.body.textContent).toContain("desc 1");
    expect(document.body.textContent).toContain("QmMeta1");
  });

  it("offers no buy button without a connected wallet", async () => {
    location.hash = "#/nft/1";
    await renderApp();
    expect(document.getElementById("buy")).toBeNull();
  });
});

describe("error page", () => {
  it("surfaces the server reason string", async () => {
    location.hash = "#/nft/999";
    vi.stubGlobal("fetch", async () =>
      new Response(JSON.stringify({ error: "NotFound", detail: "token 999" }), { status: 404 }),
    );
    await renderApp();
    expect(document.querySelector(".status.err")!.textContent).toContain("NotFound");
    expect(document.querySelector(".status.err")!.textContent).toContain("token 999");
  });
});

describe("connect page", () => {
  it("prompts to create a wallet when none is stored", async () => {
    location.hash = "#/connect";
    await renderApp();
    expect(document.getElementById("create")).not.toBeNull();
    expect(document.getElementById("disconnect")).toBeNull();
  });
});
