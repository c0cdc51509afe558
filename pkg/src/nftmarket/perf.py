"""Per-request latency measurement in the shape of the reference figures:
x = request ordinal, y = elapsed time, plus mean/max/min and nearest-rank
percentiles. Requests run sequentially so individual latencies are not
confounded by concurrency.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from . import wallet
from .client import MarketClient
from .content_store import MetadataDocument
from .errors import NftMarketError, ValidationError

PHASES = ("generate", "mint", "buy", "e2e")


@dataclass(frozen=True)
class LatencySample:
    request_index: int  # 1-based
    phase: str
    elapsed_ms: float
    ok: bool


@dataclass(frozen=True)
class BenchReport:
    phase: str
    n: int
    mean_ms: float
    max_ms: float
    min_ms: float
    p50_ms: float
    p95_ms: float
    failures: int
    samples: tuple[LatencySample, ...]


class AllRequestsFailed(NftMarketError):
    pass


def nearest_rank(sorted_values: list[float], percentile: int) -> float:
    """Value at 1-based index ceil(p/100 * n) of the sorted list."""
    n = len(sorted_values)
    rank = -(-percentile * n // 100)  # ceil without floats
    return sorted_values[max(1, rank) - 1]


def summarize(phase: str, samples: list[LatencySample]) -> BenchReport:
    ok_values = [s.elapsed_ms for s in samples if s.ok]
    if not ok_values:
        raise AllRequestsFailed(f"all {len(samples)} {phase} requests failed")
    ordered = sorted(ok_values)
    return BenchReport(
        phase=phase,
        n=len(samples),
        mean_ms=sum(ok_values) / len(ok_values),
        max_ms=ordered[-1],
        min_ms=ordered[0],
        p50_ms=nearest_rank(ordered, 50),
        p95_ms=nearest_rank(ordered, 95),
        failures=len(samples) - len(ok_values),
        samples=tuple(samples),
    )


class BenchDriver:
    """Builds per-phase request closures against a MarketClient.

    Setup work (funding wallets, pinning metadata, pre-minting tokens for the
    buy phase) happens outside the timed window.
    """

    FUNDING = 10**12
    PRICE = 100

    def __init__(self, client: MarketClient):
        self.client = client
        self.minter = wallet.generate_keypair()
        self.buyer = wallet.generate_keypair()
        self.session: str | None = None

    def _ensure_funded(self):
        self.client.faucet(self.minter.address, self.FUNDING)
        self.client.faucet(self.buyer.address, self.FUNDING)

    def _ensure_session(self) -> str:
        if self.session is None:
            self.session = self.client.login(self.minter)
        return self.session

    def _pin_doc(self, i: int) -> str:
        doc = MetadataDocument(
            name=f"bench token {i}",
            description="latency bench artifact",
            price=self.PRICE,
            image="cid:none",
        )
        return self.client.pin(doc)["cid"]

    def prepare(self, phase: str, n: int):
        if phase not in PHASES:
            raise ValidationError(f"unknown phase {phase!r}; choose from {PHASES}")
        self._ensure_funded()
        self._ensure_session()
        if phase == "mint":
            self._cids = [self._pin_doc(i) for i in range(n)]
        elif phase == "buy":
            self._token_ids = []
            for i in range(n):
                out = self.client.mint(self.minter, self._pin_doc(i), self.PRICE)
                self._token_ids.append(out["receipt"]["events"][0]["token_id"])

    def request(self, phase: str, i: int) -> None:
        if phase == "generate":
            self.client.generate(f"bench prompt {i}", 256, 256, self.session)
        elif phase == "mint":
            self.client.mint(self.minter, self._cids[i], self.PRICE)
        elif phase == "buy":
            self.client.buy(self.buyer, self._token_ids[i], self.PRICE)
        elif phase == "e2e":
            cid = self.client.generate(f"bench prompt {i}", 256, 256, self.session)["image_cid"]
            doc = MetadataDocument(
                name=f"bench token {i}",
                description="latency bench artifact",
                price=self.PRICE,
                image=f"cid:{cid}",
            )
            meta_cid = self.client.pin(doc)["cid"]
            self.client.mint(self.minter, meta_cid, self.PRICE)


def run_bench(phase: str, n: int, client: MarketClient) -> BenchReport:
    if n < 1:
        raise ValidationError("n must be >= 1")
    driver = BenchDriver(client)
    driver.prepare(phase, n)
    samples: list[LatencySample] = []
    for i in range(n):
        start = time.monotonic()
        ok = True
        try:
            driver.request(phase, i)
        except NftMarketError:
            ok = False
        elapsed_ms = round((time.monotonic() - start) * 1000.0, 3)
        samples.append(LatencySample(i + 1, phase, elapsed_ms, ok))
    return summarize(phase, samples)


# --- emission --------------------------------------------------------------

CSV_HEADER = "request_index,phase,elapsed_ms,ok"


def emit_csv(report: BenchReport) -> str:
    lines = [CSV_HEADER]
    for s in report.samples:
        lines.append(f"{s.request_index},{s.phase},{s.elapsed_ms:.3f},{1 if s.ok else 0}")
    return "\n".join(lines) + "\n"


def emit_plotdata(report: BenchReport) -> str:
    lines = [f"# phase: {report.phase}  (x = request index, y = elapsed ms)"]
    for s in report.samples:
        if s.ok:
            lines.append(f"{s.request_index}\t{s.elapsed_ms:.3f}")
    return "\n".join(lines) + "\n"


def emit(report: BenchReport, path: str, fmt: str = "csv") -> None:
    if fmt == "csv":
        text = emit_csv(report)
    elif fmt == "plotdata":
        text = emit_plotdata(report)
    else:
        raise ValidationError(f"unknown format {fmt!r}")
    with open(path, "w") as f:
        f.write(text)


def parse_csv(text: str) -> list[LatencySample]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise ValidationError("not a bench CSV")
    out = []
    for ln in lines[1:]:
        idx, phase, ms, ok = ln.split(",")
        out.append(LatencySample(int(idx), phase, float(ms), ok == "1"))
    return out
