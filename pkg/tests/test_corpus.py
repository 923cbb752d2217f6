import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from casetriage import corpus
from casetriage.corpus import (
    LabeledCase,
    LabelStats,
    TaskSchema,
    balanced_weights,
    label_stats,
    load_dataset,
    load_schema,
    save_dataset,
    stratified_split,
)
from casetriage.errors import InputError

MAIN_ORGAN = load_schema(corpus.bundled_schema_path("main_organ"))


def write_jsonl(path, records):
    path.write_text("\n".join(json.dumps(r) for r in records) + "\n")


class TestSchema:
    def test_bundled_schemas_load(self):
        for task in ("main_organ", "disease_type", "cancer_reason",
                     "primary_cancer_site", "metastatic_disease"):
            schema = load_schema(corpus.bundled_schema_path(task))
            assert schema.n_labels >= 2

    def test_main_organ_has_15_labels(self):
        assert MAIN_ORGAN.n_labels == 15

    @pytest.mark.parametrize(
        "labels",
        [("a",), ("a", "a"), ("a", ""), ()],
    )
    def test_invalid_label_lists_rejected(self, labels):
        with pytest.raises(InputError):
            TaskSchema(name="t", labels=labels)


class TestLoadDataset:
    def test_gold_built_from_schema_lookup(self, tmp_path):
        path = tmp_path / "d.jsonl"
        write_jsonl(path, [{"id": "a", "text": "benign skin lesion", "labels": ["Skin"]}])
        (case,) = load_dataset(path, MAIN_ORGAN)
        expected = [0] * 15
        expected[MAIN_ORGAN.labels.index("Skin")] = 1
        assert list(case.gold) == expected

    def test_empty_label_list_gives_all_zero_gold(self, tmp_path):
        path = tmp_path / "d.jsonl"
        write_jsonl(path, [{"id": "b", "text": "normal tissue", "labels": []}])
        (case,) = load_dataset(path, MAIN_ORGAN)
        assert case.gold == (0,) * 15

    def test_unknown_label_named_in_error(self, tmp_path):
        path = tmp_path / "d.jsonl"
        write_jsonl(path, [{"id": "a", "text": "x", "labels": ["Bone"]}])
        with pytest.raises(InputError, match="Bone"):
            load_dataset(path, MAIN_ORGAN)

    def test_malformed_line_reports_line_number(self, tmp_path):
        path = tmp_path / "d.jsonl"
        path.write_text('{"id": "a", "text": "x", "labels": []}\n{broken\n')
        with pytest.raises(InputError, match=":2:"):
            load_dataset(path, MAIN_ORGAN)

    def test_duplicate_id_rejected(self, tmp_path):
        path = tmp_path / "d.jsonl"
        write_jsonl(path, [
            {"id": "a", "text": "x", "labels": []},
            {"id": "a", "text": "y", "labels": []},
        ])
        with pytest.raises(InputError, match="duplicate"):
            load_dataset(path, MAIN_ORGAN)

    def test_blank_text_rejected(self, tmp_path):
        path = tmp_path / "d.jsonl"
        write_jsonl(path, [{"id": "a", "text": "   ", "labels": []}])
        with pytest.raises(InputError):
            load_dataset(path, MAIN_ORGAN)

    def test_save_then_load_is_identity(self, tmp_path):
        cases = [
            LabeledCase(id="a", text="skin lesion, benign", gold=tuple(
                1 if lbl == "Skin" else 0 for lbl in MAIN_ORGAN.labels)),
            LabeledCase(id="b", text="unremarkable", gold=(0,) * 15),
            LabeledCase(id="c", text="breast and node", gold=tuple(
                1 if lbl in ("Breast", "Lymph node") else 0 for lbl in MAIN_ORGAN.labels)),
        ]
        path = tmp_path / "round.jsonl"
        save_dataset(cases, MAIN_ORGAN, path)
        assert load_dataset(path, MAIN_ORGAN) == cases


def make_cases(golds):
    return [LabeledCase(id=f"c{i}", text="w", gold=tuple(g)) for i, g in enumerate(golds)]


class TestStratifiedSplit:
    def test_deterministic_for_fixed_seed(self):
        cases = make_cases([(i % 2,) for i in range(40)])
        assert stratified_split(cases, seed=3) == stratified_split(cases, seed=3)

    def test_single_label_positives_proportional(self):
        cases = make_cases([(1,) if i < 20 else (0,) for i in range(100)])
        split = stratified_split(cases, seed=9)
        by_id = {c.id: c for c in cases}
        test_pos = sum(by_id[cid].gold[0] for cid in split.test)
        assert abs(test_pos - 4) <= 1

    def test_needs_five_cases(self):
        with pytest.raises(InputError):
            stratified_split(make_cases([(1,)] * 4))

    def test_ratios_must_sum_to_one(self):
        with pytest.raises(InputError):
            stratified_split(make_cases([(1,)] * 10), ratios=(0.5, 0.2, 0.2))

    @settings(max_examples=60, deadline=None)
    @given(
        golds=st.lists(
            st.lists(st.integers(0, 1), min_size=3, max_size=3),
            min_size=5,
            max_size=60,
        ),
        seed=st.integers(0, 2**31 - 1),
    )
    def test_partition_and_size_bounds_hold(self, golds, seed):
        cases = make_cases(golds)
        split = stratified_split(cases, seed=seed)
        ids = [c.id for c in cases]
        combined = list(split.train) + list(split.validation) + list(split.test)
        assert sorted(combined) == sorted(ids)
        assert len(set(combined)) == len(ids)
        m = len(cases)
        for part, ratio in ((split.train, 0.65), (split.validation, 0.15), (split.test, 0.20)):
            assert np.floor(ratio * m) - 1 <= len(part) <= np.ceil(ratio * m) + 1

    def test_per_label_rates_within_two_points_by_recount(self):
        rng = np.random.default_rng(42)
        golds = (rng.random((1000, 5)) < np.array([0.02, 0.1, 0.25, 0.4, 0.6])).astype(int)
        cases = make_cases(golds)
        split = stratified_split(cases, seed=1)
        gold_by_id = {c.id: np.asarray(c.gold) for c in cases}
        global_rate = golds.mean(axis=0)
        for part in (split.train, split.validation, split.test):
            rate = np.mean([gold_by_id[cid] for cid in part], axis=0)
            assert np.abs(rate - global_rate).max() <= 0.02

    def test_split_file_round_trip(self, tmp_path):
        cases = make_cases([(i % 2, (i // 2) % 2) for i in range(30)])
        split = stratified_split(cases, seed=4)
        path = tmp_path / "split.json"
        path.write_text(json.dumps(split.to_dict()))
        assert corpus.load_split(path) == split


class TestLabelStats:
    def test_counting(self):
        stats = label_stats(make_cases([(1, 0), (1, 1), (0, 0)]))
        assert stats.positive_counts == (2, 1)
        assert stats.total_cases == 3

    def test_all_zero_dataset(self):
        stats = label_stats(make_cases([(0, 0, 0)] * 4))
        assert stats.positive_counts == (0, 0, 0)

    def test_reference_manifest_recount(self):
        # Regenerate a manifest with the published per-label counts for the
        # bundled main-organ task and recount it.
        reference = json.loads(
            (corpus.bundled_schema_path("main_organ").parent / "reference_counts.json").read_text()
        )["main_organ"]
        m = reference["cases"]
        wanted = [reference["positives"][label] for label in MAIN_ORGAN.labels]
        golds = np.zeros((m, 15), dtype=int)
        offset = 0
        for i, count in enumerate(wanted):
            idx = (np.arange(count) + offset) % m
            golds[idx, i] = 1
            offset += count
        stats = label_stats(make_cases(golds))
        assert stats.total_cases == 89001
        assert dict(zip(MAIN_ORGAN.labels, stats.positive_counts))["Breast"] == 3097
        assert dict(zip(MAIN_ORGAN.labels, stats.positive_counts))["Skin"] == 26001
        assert list(stats.positive_counts) == wanted


class TestBalancedWeights:
    def test_formula_instantiation(self):
        stats = LabelStats(positive_counts=(10, 5), total_cases=20)
        assert balanced_weights(stats) == (1.0, 2.0)

    def test_uniform_mode_is_all_ones(self):
        stats = LabelStats(positive_counts=(3, 800), total_cases=900)
        assert balanced_weights(stats, mode="uniform") == (1.0, 1.0)

    def test_perfectly_balanced_counts_give_ones(self):
        stats = LabelStats(positive_counts=(6, 6, 6), total_cases=18)
        assert balanced_weights(stats) == (1.0, 1.0, 1.0)

    def test_zero_positive_label_named(self):
        stats = LabelStats(positive_counts=(5, 0), total_cases=10)
        with pytest.raises(InputError, match="rare"):
            balanced_weights(stats, labels=("common", "rare"))

    @given(
        counts=st.lists(st.integers(1, 500), min_size=2, max_size=12),
        extra=st.integers(0, 100),
    )
    def test_weight_times_count_is_m_over_n(self, counts, extra):
        m = max(counts) + extra
        stats = LabelStats(positive_counts=tuple(counts), total_cases=m)
        weights = balanced_weights(stats)
        n = len(counts)
        for w, c in zip(weights, counts):
            assert abs(w * c - m / n) <= 1e-12 * (m / n)
