import numpy as np
import pytest

from samurai.errors import EmptyResults, MissingTruth, ParseError, UnknownScene
from samurai.metrics import (
    EvalReport,
    evaluate,
    load_truth_csv,
    mrr,
    per_scene_ranks,
    recall_at_k,
    write_truth_csv,
)
from samurai.retrieval import RankedList


def results_with_ranks(ranks):
    """One scene per entry of ``ranks``; None means the target is absent."""
    out, truth = [], {}
    for i, rank in enumerate(ranks):
        sid = f"s{i:03d}"
        truth[sid] = "target"
        entries = [(f"filler{j:02d}", 1.0 - j / 100) for j in range(10)]
        if rank is not None:
            entries[rank - 1] = ("target", 1.0 - (rank - 1) / 100)
        out.append(RankedList(sid, "text", entries))
    return out, truth


class TestRecall:
    def test_perfect_run(self):
        results, truth = results_with_ranks([1, 1, 1])
        for k in (1, 5, 10):
            assert recall_at_k(results, truth, k) == 1.0

    def test_hand_case(self):
        results, truth = results_with_ranks([1, 2, 4, None])
        assert recall_at_k(results, truth, 1) == 0.25
        assert recall_at_k(results, truth, 5) == 0.75
        assert recall_at_k(results, truth, 10) == 0.75

    def test_monotone_in_k(self):
        rng = np.random.default_rng(61)
        for _ in range(50):
            ranks = [
                None if rng.random() < 0.2 else int(rng.integers(1, 11))
                for _ in range(int(rng.integers(1, 30)))
            ]
            results, truth = results_with_ranks(ranks)
            r1 = recall_at_k(results, truth, 1)
            r5 = recall_at_k(results, truth, 5)
            r10 = recall_at_k(results, truth, 10)
            assert r1 <= r5 <= r10


class TestMrr:
    def test_all_rank_one(self):
        results, truth = results_with_ranks([1, 1])
        assert mrr(results, truth) == 1.0

    def test_hand_case(self):
        results, truth = results_with_ranks([1, 2, 4, None])
        assert mrr(results, truth) == 0.4375

    def test_table_witness(self):
        results, truth = results_with_ranks([1] * 44 + [2] * 4 + [4] * 2)
        assert mrr(results, truth) == pytest.approx(0.93, abs=1e-12)

    def test_cutoff_zeroes_deep_ranks(self):
        results, truth = results_with_ranks([1, 10])
        entries = [(f"x{j}", 1.0 - j / 100) for j in range(12)]
        entries[11] = ("target", 0.5)
        results.append(RankedList("s999", "text", entries))
        truth["s999"] = "target"
        assert mrr(results, truth, cutoff=10) == pytest.approx((1 + 0.1 + 0) / 3)

    def test_order_invariance(self):
        results, truth = results_with_ranks([3, 1, None, 7, 2])
        forward = mrr(results, truth)
        backward = mrr(list(reversed(results)), truth)
        assert forward == backward

    def test_bounds_vs_recall(self):
        rng = np.random.default_rng(62)
        for _ in range(50):
            ranks = [
                None if rng.random() < 0.3 else int(rng.integers(1, 11))
                for _ in range(int(rng.integers(1, 25)))
            ]
            results, truth = results_with_ranks(ranks)
            r10 = recall_at_k(results, truth, 10)
            m = mrr(results, truth)
            assert r10 / 10 <= m <= r10

    def test_removing_rank_one_scene_never_raises_mrr(self):
        rng = np.random.default_rng(63)
        for _ in range(50):
            ranks = [1] + [
                None if rng.random() < 0.3 else int(rng.integers(1, 11))
                for _ in range(int(rng.integers(1, 20)))
            ]
            full_results, full_truth = results_with_ranks(ranks)
            whole = mrr(full_results, full_truth)
            rest = mrr(full_results[1:], {k: v for k, v in full_truth.items() if k != "s000"})
            assert rest <= whole + 1e-12


class TestEvaluate:
    def test_report_consistency(self):
        results, truth = results_with_ranks([1, 2, 4, None])
        report = evaluate(results, truth)
        assert report.num_queries == 4
        assert report.recall_at == {1: 0.25, 5: 0.75, 10: 0.75}
        assert report.mrr == 0.4375
        assert report.per_scene == {"s000": 1, "s001": 2, "s002": 4, "s003": None}

    def test_json_fixed_layout(self):
        report = EvalReport(
            num_queries=2,
            recall_at={1: 0.5, 5: 1.0, 10: 1.0},
            mrr=0.75,
            per_scene={"b": None, "a": 1},
        )
        assert report.to_json() == (
            '{"num_queries": 2, "recall_at_1": 0.5000, "recall_at_5": 1.0000, '
            '"recall_at_10": 1.0000, "mrr": 0.7500, "per_scene": {"a": 1, "b": null}}'
        )

    def test_empty_results(self):
        with pytest.raises(EmptyResults):
            evaluate([], {})
        with pytest.raises(UnknownScene):
            evaluate([], {"s": "o"})

    def test_missing_truth_fatal(self):
        results, truth = results_with_ranks([1, 1])
        del truth["s001"]
        with pytest.raises(MissingTruth):
            evaluate(results, truth)

    def test_truth_only_scene_fatal_unless_lenient(self):
        results, truth = results_with_ranks([1])
        truth["extra"] = "target"
        with pytest.raises(UnknownScene):
            evaluate(results, truth)
        report = evaluate(results, truth, lenient=True)
        assert report.num_queries == 2
        assert report.per_scene["extra"] is None
        assert report.mrr == 0.5

    def test_duplicate_result_scene_rejected(self):
        results, truth = results_with_ranks([1])
        with pytest.raises(ParseError):
            per_scene_ranks(results + results, truth)


class TestTruthCsv:
    def test_round_trip(self, tmp_path):
        truth = {"s2": "o9", "s1": "o3"}
        path = tmp_path / "truth.csv"
        write_truth_csv(path, truth)
        text = path.read_text(encoding="utf-8")
        assert text == "scene_id,object_id\ns1,o3\ns2,o9\n"
        assert load_truth_csv(path) == truth

    def test_headerless_accepted(self, tmp_path):
        path = tmp_path / "truth.csv"
        path.write_text("s1,o1\n", encoding="utf-8")
        assert load_truth_csv(path) == {"s1": "o1"}

    def test_duplicate_scene_rejected(self, tmp_path):
        path = tmp_path / "truth.csv"
        path.write_text("s1,o1\ns1,o2\n", encoding="utf-8")
        with pytest.raises(ParseError):
            load_truth_csv(path)

    def test_malformed_row_rejected(self, tmp_path):
        path = tmp_path / "truth.csv"
        path.write_text("s1\n", encoding="utf-8")
        with pytest.raises(ParseError):
            load_truth_csv(path)
