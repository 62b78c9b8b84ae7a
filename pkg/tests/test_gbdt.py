"""Boosted trees: feature assembly, tree inference, training, metrics."""

import numpy as np
import numpy.testing as npt
import pytest

from latent_cpt.data import RegularProfile, SiteRecord
from latent_cpt.errors import (
    DimensionMismatch,
    LengthMismatch,
    MissingInput,
    SingleClassTraining,
    TooFewItems,
    UndefinedMetric,
)
from latent_cpt.gbdt import (
    ConfusionMatrix,
    GbdtConfig,
    Tree,
    TreeEnsemble,
    assemble_features,
    build_feature_table,
    confusion,
    load_ensemble,
    metrics,
    metrics_report,
    save_ensemble,
    train_gbdt,
    variant_feature_names,
)
from latent_cpt.gbdt.training import _best_split


def make_record(site_id="s1", label=1):
    return SiteRecord(site_id, pga_g=0.4, gwd_m=1.5, l_m=120.0,
                      slope_pct=0.8, elev_m=3.0, label=label)


def make_profile(site_id="s1"):
    rng = np.random.default_rng(abs(hash(site_id)) % 2**32)
    return RegularProfile(site_id,
                          rng.uniform(1.5, 3.0, 200),
                          rng.uniform(40.0, 180.0, 200))


def two_blob_data(n=80, seed=0, n_features=3):
    """Linearly separable blobs: feature 0 carries the signal."""
    rng = np.random.default_rng(seed)
    y = (np.arange(n) % 2).astype(int)
    x = rng.normal(0, 1, (n, n_features))
    x[:, 0] += np.where(y == 1, 4.0, -4.0)
    return x, y


class TestFeatureVariants:
    def test_names_and_widths(self):
        assert variant_feature_names("A") == ["pga", "gwd", "l", "slope", "elevation"]
        assert len(variant_feature_names("B")) == 9
        assert len(variant_feature_names("C")) == 25
        assert len(variant_feature_names("D")) == 25
        assert variant_feature_names("B")[5:] == [
            "ic_std", "ic_median", "qc1ncs_std", "qc1ncs_median"]
        assert variant_feature_names("C")[5] == "ic_avg0"
        assert variant_feature_names("C")[-1] == "qc1ncs_avg9"
        assert variant_feature_names("D")[5] == "I_c0"
        assert variant_feature_names("D")[-1] == "q_c9"

    def test_unknown_variant(self):
        with pytest.raises(LengthMismatch):
            variant_feature_names("E")

    def test_variant_a_vector(self):
        vec, names = assemble_features("A", make_record())
        npt.assert_array_equal(vec, [0.4, 1.5, 120.0, 0.8, 3.0])
        assert names == variant_feature_names("A")

    def test_b_and_c_need_profile(self):
        for variant in ("B", "C"):
            with pytest.raises(MissingInput):
                assemble_features(variant, make_record())

    def test_d_needs_latents(self):
        with pytest.raises(MissingInput):
            assemble_features("D", make_record())
        with pytest.raises(LengthMismatch):
            assemble_features("D", make_record(), latents=np.zeros(19))

    def test_c_matches_meter_averages(self):
        profile = make_profile()
        vec, _ = assemble_features("C", make_record(), profile=profile)
        npt.assert_array_equal(vec[5:15], profile.ic.reshape(10, 20).mean(axis=1))
        npt.assert_array_equal(vec[15:], profile.qc1ncs.reshape(10, 20).mean(axis=1))

    def test_feature_table_order_and_labels(self):
        rows = [(make_profile(f"s{i}"), make_record(f"s{i}", label=i % 2))
                for i in range(6)]
        x, y, names, ids = build_feature_table("A", rows)
        assert x.shape == (6, 5)
        npt.assert_array_equal(y, [0, 1, 0, 1, 0, 1])
        assert ids == [f"s{i}" for i in range(6)]

    def test_feature_table_missing_latents(self):
        rows = [(make_profile(), make_record())]
        with pytest.raises(MissingInput):
            build_feature_table("D", rows, latents_by_site={})


class TestTreePredict:
    def stump(self):
        return Tree.from_doc({
            "feature": 0, "threshold": 1.0, "cover": 10.0, "default_left": True,
            "left": {"weight": -2.0, "cover": 6.0},
            "right": {"weight": 3.0, "cover": 4.0},
        })

    def test_routing_strictly_less_goes_left(self):
        tree = self.stump()
        npt.assert_array_equal(
            tree.predict(np.array([[0.0], [0.999], [1.0], [1.5]])),
            [-2.0, -2.0, 3.0, 3.0],   # x < t left; boundary goes right
        )

    def test_depth_two_routing(self):
        tree = Tree.from_doc({
            "feature": 1, "threshold": 0.0, "cover": 8.0,
            "left": {"weight": 1.0, "cover": 4.0},
            "right": {
                "feature": 0, "threshold": 5.0, "cover": 4.0,
                "left": {"weight": 2.0, "cover": 2.0},
                "right": {"weight": 4.0, "cover": 2.0},
            },
        })
        x = np.array([[0.0, -1.0], [0.0, 1.0], [9.0, 1.0]])
        npt.assert_array_equal(tree.predict(x), [1.0, 2.0, 4.0])
        assert tree.n_leaves == 3 and tree.n_nodes == 5

    def test_doc_round_trip(self):
        tree = self.stump()
        back = Tree.from_doc(tree.to_doc())
        x = np.random.default_rng(0).uniform(-1, 3, (20, 2))
        npt.assert_array_equal(tree.predict(x), back.predict(x))

    def test_ensemble_margin_is_additive(self):
        t1 = self.stump()
        t2 = Tree.from_doc({"weight": 0.5, "cover": 1.0})
        ens = TreeEnsemble(base_score=-0.25, shrinkage=0.3,
                           feature_names=["f0"], trees=[t1, t2])
        x = np.array([[0.0], [2.0]])
        npt.assert_allclose(ens.predict_margin(x),
                            -0.25 + 0.3 * (t1.predict(x) + 0.5))

    def test_empty_ensemble_probability(self):
        ens = TreeEnsemble(base_score=0.0, shrinkage=0.3, feature_names=["a"])
        npt.assert_array_equal(ens.predict_proba(np.zeros((3, 1))), [0.5, 0.5, 0.5])

    def test_feature_count_checked(self):
        ens = TreeEnsemble(base_score=0.0, shrinkage=0.3, feature_names=["a", "b"])
        with pytest.raises(DimensionMismatch):
            ens.predict_margin(np.zeros((2, 3)))

    def test_truncated_bounds(self):
        ens = TreeEnsemble(0.0, 0.3, ["a"], trees=[self.stump()])
        assert len(ens.truncated(0).trees) == 0
        with pytest.raises(LengthMismatch):
            ens.truncated(2)


def all_candidate_gains(x, g, h, lam, min_child_weight):
    """Quadratic-time oracle: every admissible (gain, feature, threshold)."""
    total_g, total_h = g.sum(), h.sum()
    parent = total_g**2 / (total_h + lam)
    out = []
    for f in range(x.shape[1]):
        values = np.unique(x[:, f])
        for lo, hi in zip(values[:-1], values[1:]):
            t = 0.5 * (lo + hi)
            left = x[:, f] < t
            gl, hl = g[left].sum(), h[left].sum()
            gr, hr = total_g - gl, total_h - hl
            if hl < min_child_weight or hr < min_child_weight:
                continue
            gain = 0.5 * (gl**2 / (hl + lam) + gr**2 / (hr + lam) - parent)
            if gain > 0.0:
                out.append((gain, f, t))
    return out


class TestSplitSearch:
    def test_matches_naive_oracle(self):
        rng = np.random.default_rng(3)
        checked_unique = 0
        for trial in range(25):
            n = int(rng.integers(4, 40))
            p = int(rng.integers(1, 5))
            # coarse grid values force ties and duplicate feature values
            x = rng.integers(0, 5, (n, p)).astype(float)
            g = rng.normal(0, 1, n)
            h = rng.uniform(0.05, 1.0, n)
            fast = _best_split(x, g, h, 1.0, 0.0)
            candidates = all_candidate_gains(x, g, h, 1.0, 0.0)
            if not candidates:
                assert fast is None
                continue
            assert fast is not None, trial
            best_gain = max(c[0] for c in candidates)
            assert abs(fast[0] - best_gain) < 1e-10
            # the chosen split must be one of the (near-)maximal candidates;
            # exact tie-breaking among float ties is checked separately below
            near = [c for c in candidates if c[0] > best_gain - 1e-9]
            assert any(fast[1] == f and abs(fast[2] - t) < 1e-12
                       for _, f, t in near)
            if len(near) == 1:
                checked_unique += 1
                assert fast[1:] == (near[0][1], near[0][2])
        assert checked_unique >= 10   # the unique-winner branch really ran

    def test_tie_breaks_to_lowest_feature(self):
        # two identical columns: the split must name feature 0
        col = np.array([0.0, 0.0, 1.0, 1.0])
        x = np.column_stack([col, col])
        g = np.array([1.0, 1.0, -1.0, -1.0])
        h = np.ones(4)
        gain, feature, threshold = _best_split(x, g, h, 1.0, 0.0)
        assert feature == 0
        assert threshold == 0.5

    def test_min_child_weight_blocks_split(self):
        x = np.array([[0.0], [1.0]])
        g = np.array([1.0, -1.0])
        h = np.array([0.4, 0.4])
        assert _best_split(x, g, h, 1.0, 0.5) is None
        assert _best_split(x, g, h, 1.0, 0.4) is not None


class TestTraining:
    def test_separable_data_converges_fast(self):
        x, y = two_blob_data()
        ens, history = train_gbdt(x, y, x, y, ["a", "b", "c"],
                                  GbdtConfig(max_depth=2))
        assert history[0] == 1.0          # one tree already separates the blobs
        assert len(ens.trees) == 1
        npt.assert_array_equal(ens.predict_label(x), y)

    def test_truncation_and_halt_window(self):
        rng = np.random.default_rng(7)
        x = rng.normal(0, 1, (120, 4))
        y = (x[:, 0] + 0.8 * rng.normal(0, 1, 120) > 0).astype(int)
        xv = rng.normal(0, 1, (60, 4))
        yv = (xv[:, 0] + 0.8 * rng.normal(0, 1, 60) > 0).astype(int)
        config = GbdtConfig(max_depth=3, max_estimators=60, early_stopping_rounds=5)
        ens, history = train_gbdt(x, y, xv, yv, list("abcd"), config)
        best = int(np.argmax(history))    # first maximum = best round
        assert len(ens.trees) == best + 1
        assert len(ens.trees) <= config.max_estimators
        # training stops within early_stopping_rounds of the best round
        assert len(history) - 1 - best <= config.early_stopping_rounds

    def test_first_round_pure_leaf_weight(self):
        # identical feature rows leave no valid split: the first tree is a
        # single leaf whose weight is -sum(g) / (sum(h) + lambda) with
        # g = p - y, h = p (1 - p), p = training base rate.
        x = np.ones((10, 2))
        y = np.array([1, 1, 1, 0, 0, 0, 0, 0, 0, 0])
        ens, _ = train_gbdt(x, y, x, y, ["a", "b"],
                            GbdtConfig(max_estimators=1))
        p = 0.3
        g = p - y
        h = np.full(10, p * (1 - p))
        tree = ens.trees[0]
        assert tree.n_nodes == 1
        assert abs(tree.weight[0] - (-g.sum() / (h.sum() + 1.0))) < 1e-12
        assert abs(ens.base_score - np.log(p / (1 - p))) < 1e-12

    def test_single_class_labels_rejected(self):
        x = np.random.default_rng(0).normal(0, 1, (8, 2))
        with pytest.raises(SingleClassTraining):
            train_gbdt(x, np.ones(8), x, np.ones(8), ["a", "b"])

    def test_empty_sets_rejected(self):
        x = np.empty((0, 2))
        with pytest.raises(TooFewItems):
            train_gbdt(x, np.empty(0), x, np.empty(0), ["a", "b"])

    def test_row_order_invariance(self):
        x, y = two_blob_data(n=60, seed=11)
        xv, yv = two_blob_data(n=30, seed=12)
        perm = np.random.default_rng(13).permutation(60)
        e1, h1 = train_gbdt(x, y, xv, yv, list("abc"), GbdtConfig(max_depth=3))
        e2, h2 = train_gbdt(x[perm], y[perm], xv, yv, list("abc"),
                            GbdtConfig(max_depth=3))
        assert h1 == h2
        npt.assert_array_equal(e1.predict_margin(xv), e2.predict_margin(xv))

    def test_monotone_transform_invariance(self):
        # strictly increasing per-feature transforms preserve every split
        # partition, so for rows whose values were seen in training the
        # margins are identical (midpoint thresholds move, but never across
        # a seen value)
        rng = np.random.default_rng(21)
        x = rng.normal(0, 1, (80, 3))
        y = (x[:, 0] + x[:, 1] + 0.5 * rng.normal(0, 1, 80) > 0).astype(int)
        sub = rng.permutation(80)[:40]
        xv, yv = x[sub], y[sub]
        warp = lambda a: np.column_stack(
            [np.exp(a[:, 0]), a[:, 1] ** 3, 2.0 * a[:, 2] + 5.0])
        cfg = GbdtConfig(max_depth=3, max_estimators=20)
        e1, h1 = train_gbdt(x, y, xv, yv, list("abc"), cfg)
        e2, h2 = train_gbdt(warp(x), y, warp(xv), yv, list("abc"), cfg)
        assert h1 == h2
        npt.assert_allclose(e1.predict_margin(x), e2.predict_margin(warp(x)),
                            rtol=0, atol=1e-12)

    def test_config_seed_is_inert(self):
        x, y = two_blob_data(n=40, seed=5)
        e1, h1 = train_gbdt(x, y, x, y, list("abc"), GbdtConfig(seed=1))
        e2, h2 = train_gbdt(x, y, x, y, list("abc"), GbdtConfig(seed=999))
        assert h1 == h2
        npt.assert_array_equal(e1.predict_margin(x), e2.predict_margin(x))

    def test_config_validation(self):
        with pytest.raises(TooFewItems):
            GbdtConfig(max_depth=0).validate()
        with pytest.raises(TooFewItems):
            GbdtConfig(learning_rate=0.0).validate()

    def test_ensemble_io_round_trip(self, tmp_path):
        x, y = two_blob_data(n=50, seed=9)
        ens, _ = train_gbdt(x, y, x, y, list("abc"), GbdtConfig(max_depth=3))
        path = tmp_path / "model.json"
        save_ensemble(ens, path, {"seed": 9})
        back = load_ensemble(path)
        assert back.feature_names == ens.feature_names
        assert back.base_score == ens.base_score
        npt.assert_array_equal(back.predict_margin(x), ens.predict_margin(x))


class TestConfusionAndMetrics:
    def test_counts(self):
        cm = confusion([0, 0, 1, 1, 1], [0, 1, 1, 0, 1])
        assert (cm.tn, cm.fp, cm.fn, cm.tp) == (1, 1, 1, 2)
        assert cm.total == 5

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            confusion([0, 1], [0, 1, 1])

    def test_reference_counts_round_to_expected_values(self):
        # site-attribute model on the held-out test set: these counts are the
        # reference point for the full-pipeline comparison
        m = metrics(ConfusionMatrix(tn=220, fp=53, fn=51, tp=181))
        rounded = {k: round(v, 2) for k, v in m.items()}
        assert rounded == {
            "accuracy": 0.79,
            "balanced_accuracy": 0.79,
            "precision": 0.77,
            "recall": 0.78,
            "f1": 0.78,
        }

    def test_perfect_and_symmetric(self):
        m = metrics(ConfusionMatrix(tn=10, fp=0, fn=0, tp=10))
        assert all(v == 1.0 for v in m.values())
        a = metrics(ConfusionMatrix(tn=7, fp=2, fn=3, tp=8))
        b = metrics(ConfusionMatrix(tn=8, fp=3, fn=2, tp=7))
        # swapping the positive class swaps recall with specificity only
        assert a["accuracy"] == b["accuracy"]
        assert abs(a["balanced_accuracy"] - b["balanced_accuracy"]) < 1e-15

    def test_undefined_denominators_raise(self):
        with pytest.raises(UndefinedMetric):
            metrics(ConfusionMatrix(0, 0, 0, 0))
        with pytest.raises(UndefinedMetric):
            metrics(ConfusionMatrix(tn=5, fp=0, fn=0, tp=0))   # no positives
        with pytest.raises(UndefinedMetric):
            metrics(ConfusionMatrix(tn=0, fp=0, fn=5, tp=0))   # no predicted 1s

    def test_report_maps_undefined_to_none(self):
        rep = metrics_report(ConfusionMatrix(tn=5, fp=0, fn=0, tp=0))
        assert rep["accuracy"] == 1.0
        assert rep["recall"] is None and rep["f1"] is None
        assert rep["balanced_accuracy"] is None
        assert rep["precision"] is None

    def test_report_agrees_with_metrics_when_defined(self):
        cm = ConfusionMatrix(tn=220, fp=53, fn=51, tp=181)
        assert metrics_report(cm) == metrics(cm)
