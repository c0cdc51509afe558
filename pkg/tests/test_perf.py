import pytest

from nftmarket import perf
from nftmarket.client import InprocClient
from nftmarket.errors import ValidationError
from nftmarket.node import Node
from nftmarket.perf import LatencySample, emit_csv, emit_plotdata, nearest_rank, parse_csv, summarize


def samples(values, phase="generate", ok=True):
    return [LatencySample(i + 1, phase, v, ok) for i, v in enumerate(values)]


class TestStats:
    def test_hand_computed(self):
        rep = summarize("generate", samples([10.0, 20.0, 30.0]))
        assert rep.mean_ms == 20.0
        assert rep.max_ms == 30.0
        assert rep.min_ms == 10.0
        assert rep.p50_ms == 20.0
        assert rep.p95_ms == 30.0

    def test_nearest_rank_definition(self):
        # independent recomputation of ceil(p/100 * n) straight from the rule
        import math

        values = sorted([3.0, 1.0, 4.0, 1.5, 9.0, 2.6, 5.0])
        for p in (1, 25, 50, 75, 95, 100):
            expected = values[max(1, math.ceil(p / 100 * len(values))) - 1]
            assert nearest_rank(values, p) == expected

    def test_ordering_invariant(self):
        import random

        rng = random.Random(3)
        for _ in range(50):
            vals = [round(rng.uniform(0, 100), 3) for _ in range(rng.randrange(1, 40))]
            rep = summarize("mint", samples(vals))
            assert rep.min_ms <= rep.p50_ms <= rep.p95_ms <= rep.max_ms
            assert rep.min_ms <= rep.mean_ms <= rep.max_ms

    def test_failures_excluded_but_counted(self):
        s = samples([10.0, 20.0]) + [LatencySample(3, "generate", 500.0, False)]
        rep = summarize("generate", s)
        assert rep.mean_ms == 15.0
        assert rep.failures == 1
        assert rep.n == 3

    def test_all_failed(self):
        with pytest.raises(perf.AllRequestsFailed):
            summarize("generate", samples([5.0], ok=False))


class TestEmission:
    def test_csv_shape(self):
        rep = summarize("mint", samples([1.0, 2.0, 3.0], phase="mint"))
        text = emit_csv(rep)
        lines = text.strip().split("\n")
        assert lines[0] == "request_index,phase,elapsed_ms,ok"
        assert len(lines) == 4
        assert lines[1] == "1,mint,1.000,1"

    def test_reemit_identical(self, tmp_path):
        rep = summarize("buy", samples([4.25, 1.125], phase="buy"))
        p1, p2 = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
        perf.emit(rep, p1, "csv")
        perf.emit(rep, p2, "csv")
        assert open(p1, "rb").read() == open(p2, "rb").read()

    def test_csv_reparse_recomputes_stats(self):
        import random

        rng = random.Random(11)
        vals = [round(rng.uniform(0.5, 300), 3) for _ in range(37)]
        rep = summarize("e2e", samples(vals, phase="e2e"))
        parsed = parse_csv(emit_csv(rep))
        rep2 = summarize("e2e", parsed)
        assert (rep2.mean_ms, rep2.max_ms, rep2.min_ms, rep2.p50_ms, rep2.p95_ms) == (
            rep.mean_ms,
            rep.max_ms,
            rep.min_ms,
            rep.p50_ms,
            rep.p95_ms,
        )

    def test_plotdata_two_columns(self):
        rep = summarize("generate", samples([7.5, 8.5]))
        lines = emit_plotdata(rep).strip().split("\n")
        assert lines[0].startswith("#")
        assert lines[1].split("\t") == ["1", "7.500"]

    def test_unknown_format(self, tmp_path):
        rep = summarize("generate", samples([1.0]))
        with pytest.raises(ValidationError):
            perf.emit(rep, str(tmp_path / "x"), "xml")


class TestRunBench:
    def test_single_request_inproc(self):
        client = InprocClient(Node())
        rep = perf.run_bench("generate", 1, client)
        assert rep.n == 1
        assert rep.mean_ms == rep.samples[0].elapsed_ms
        assert rep.samples[0].request_index == 1

    def test_indices_contiguous(self):
        client = InprocClient(Node())
        rep = perf.run_bench("mint", 3, client)
        assert [s.request_index for s in rep.samples] == [1, 2, 3]
        assert all(s.ok for s in rep.samples)

    def test_buy_phase(self):
        client = InprocClient(Node())
        rep = perf.run_bench("buy", 2, client)
        assert rep.failures == 0

    def test_bad_phase_and_n(self):
        client = InprocClient(Node())
        with pytest.raises(ValidationError):
            perf.run_bench("warp", 1, client)
        with pytest.raises(ValidationError):
            perf.run_bench("generate", 0, client)

    def test_e2e_dominates_components(self):
        client = InprocClient(Node())
        # warm the jit so the first timed sample is not a compile
        perf.run_bench("generate", 1, client)
        gen = perf.run_bench("generate", 5, client)
        mint = perf.run_bench("mint", 5, client)
        e2e = perf.run_bench("e2e", 5, client)
        assert e2e.mean_ms >= max(gen.mean_ms, mint.mean_ms)
