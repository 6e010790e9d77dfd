import random

import pytest

from adrpipe.predictions import (
    HEADER,
    PredictionRecord,
    RunMatrix,
    average_runs,
    filter_runs,
    load_predictions,
    write_predictions,
)


def write_pred_file(path, rows, header=HEADER):
    lines = [header] + [f"{m}\t{r}\t{t}\t{p}" for m, r, t, p in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def grid_rows(model, runs, tweets, prob=0.5):
    return [(model, f"r{i}", t, prob) for i in range(1, runs + 1) for t in tweets]


class TestLoad:
    def test_two_files_merge(self, tmp_path):
        a = tmp_path / "a.tsv"
        b = tmp_path / "b.tsv"
        write_pred_file(a, grid_rows("bert-large", 5, ["t1", "t2", "t3"]))
        write_pred_file(b, grid_rows("biobert", 5, ["t1", "t2", "t3"], prob=0.25))
        m = load_predictions([a, b])
        assert m.models == ("bert-large", "biobert")
        assert len(m.runs_per_model["bert-large"]) == 5
        assert m.tweet_ids == ("t1", "t2", "t3")

    def test_load_order_does_not_matter(self, tmp_path):
        a = tmp_path / "a.tsv"
        b = tmp_path / "b.tsv"
        write_pred_file(a, grid_rows("m1", 2, ["t1", "t2"], prob=0.1))
        write_pred_file(b, grid_rows("m2", 2, ["t1", "t2"], prob=0.9))
        m_ab = load_predictions([a, b], expected_runs=2)
        m_ba = load_predictions([b, a], expected_runs=2)
        assert m_ab == m_ba

    def test_missing_tweet_names_run_and_id(self, tmp_path):
        p = tmp_path / "p.tsv"
        rows = grid_rows("biobert", 3, ["t1", "t7"])
        rows.remove(("biobert", "r3", "t7", 0.5))
        write_pred_file(p, rows)
        with pytest.raises(ValueError, match="run r3 of biobert missing tweet t7"):
            load_predictions([p], expected_runs=None)

    def test_out_of_range_prob_names_line(self, tmp_path):
        p = tmp_path / "p.tsv"
        write_pred_file(p, [("m", "r1", "t1", "1.2")])
        with pytest.raises(ValueError, match="probability out of range at line 2"):
            load_predictions([p])

    def test_non_numeric_prob(self, tmp_path):
        p = tmp_path / "p.tsv"
        write_pred_file(p, [("m", "r1", "t1", "high")])
        with pytest.raises(ValueError, match="bad probability"):
            load_predictions([p])

    def test_duplicate_triple(self, tmp_path):
        p = tmp_path / "p.tsv"
        write_pred_file(p, [("m", "r1", "t1", 0.5), ("m", "r1", "t1", 0.6)])
        with pytest.raises(ValueError, match="duplicate prediction"):
            load_predictions([p])

    def test_missing_header(self, tmp_path):
        p = tmp_path / "p.tsv"
        write_pred_file(p, [("m", "r1", "t1", 0.5)], header="model\trun\ttweet\tp")
        with pytest.raises(ValueError, match="header"):
            load_predictions([p])

    def test_run_count_warning(self, tmp_path):
        p = tmp_path / "p.tsv"
        write_pred_file(p, grid_rows("m", 3, ["t1"]))
        with pytest.warns(UserWarning, match="has 3 runs"):
            load_predictions([p], expected_runs=5)

    def test_hard_labels_accepted_as_probs(self, tmp_path):
        p = tmp_path / "p.tsv"
        write_pred_file(p, [("m", "r1", "t1", "0"), ("m", "r1", "t2", "1")])
        m = load_predictions([p], expected_runs=None)
        assert m.probs[("m", "r1", "t1")] == 0.0
        assert m.probs[("m", "r1", "t2")] == 1.0

    def test_write_read_round_trip(self, tmp_path):
        records = [
            PredictionRecord("m", f"r{i}", f"t{j}", (i + j) / 10)
            for i in range(1, 3)
            for j in range(4)
        ]
        out = tmp_path / "preds.tsv"
        write_predictions(records, out)
        m = load_predictions([out], expected_runs=2)
        assert m.probs[("m", "r2", "t3")] == pytest.approx(0.5)


class TestAverageRuns:
    def test_mean_of_five(self):
        records = [
            PredictionRecord("m", f"r{i}", "t1", p)
            for i, p in enumerate([0.2, 0.4, 0.6, 0.8, 1.0], start=1)
        ]
        avg = average_runs(RunMatrix.from_records(records))
        assert avg["m"]["t1"] == pytest.approx(0.6)

    def test_single_run_identity(self):
        m = RunMatrix.from_records([PredictionRecord("m", "r1", "t1", 0.37)])
        assert average_runs(m)["m"]["t1"] == 0.37

    def test_run_relabeling_invariance(self):
        probs = [0.12, 0.93, 0.4]
        a = RunMatrix.from_records(
            [PredictionRecord("m", f"r{i}", "t", p) for i, p in enumerate(probs, 1)]
        )
        b = RunMatrix.from_records(
            [PredictionRecord("m", f"x{i}", "t", p) for i, p in enumerate(reversed(probs), 1)]
        )
        assert average_runs(a)["m"]["t"] == average_runs(b)["m"]["t"]

    def test_mean_within_run_bounds(self):
        rng = random.Random(5)
        for _ in range(50):
            probs = [rng.random() for _ in range(rng.randrange(1, 8))]
            m = RunMatrix.from_records(
                [PredictionRecord("m", f"r{i}", "t", p) for i, p in enumerate(probs, 1)]
            )
            mean = average_runs(m)["m"]["t"]
            assert min(probs) <= mean <= max(probs)


class TestFilterRuns:
    def test_drops_never_positive_run(self):
        gold = {"t1": 1, "t2": 0}
        records = [
            # r1 predicts the positive correctly, r2 predicts nothing positive
            PredictionRecord("m", "r1", "t1", 0.9),
            PredictionRecord("m", "r1", "t2", 0.1),
            PredictionRecord("m", "r2", "t1", 0.1),
            PredictionRecord("m", "r2", "t2", 0.1),
        ]
        m = RunMatrix.from_records(records)
        kept = filter_runs(m, gold, min_f1=0.5)
        assert kept.runs_per_model["m"] == ("r1",)

    def test_all_runs_dropped_is_error(self):
        gold = {"t1": 1}
        m = RunMatrix.from_records([PredictionRecord("m", "r1", "t1", 0.0)])
        with pytest.raises(ValueError, match="no runs left"):
            with pytest.warns(UserWarning):
                filter_runs(m, gold, min_f1=0.1)

    def test_missing_gold_is_error(self):
        m = RunMatrix.from_records([PredictionRecord("m", "r1", "t1", 0.5)])
        with pytest.raises(ValueError, match="gold labels missing"):
            filter_runs(m, {"other": 1}, min_f1=0.1)


class TestRecordValidation:
    def test_tab_in_identifier_rejected(self):
        with pytest.raises(ValueError, match="tab or newline"):
            PredictionRecord("m\tx", "r1", "t1", 0.5)

    def test_prob_out_of_range_rejected(self):
        with pytest.raises(ValueError, match="out of range"):
            PredictionRecord("m", "r1", "t1", -0.01)
