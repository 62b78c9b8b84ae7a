"""Global importance rankings, dependency exports, and latent probes."""

import numpy as np
import numpy.testing as npt
import pytest

from latent_cpt.autoencoder import build_autoencoder
from latent_cpt.errors import IndexOutOfRange, TooFewItems, UnknownFeature
from latent_cpt.explain import (
    GlobalExplanation,
    ProbeResult,
    global_explanation,
    perturbation_probe,
    read_probe_csv,
    region_reconstruct,
    shap_summary_doc,
    write_dependency_csv,
    write_probe_csv,
    write_shap_csv,
)
from latent_cpt.gbdt import Tree, TreeEnsemble


def make_explanation(shap, features=None, names=None):
    shap = np.asarray(shap, dtype=float)
    n, m = shap.shape
    if features is None:
        features = np.arange(n * m, dtype=float).reshape(n, m)
    if names is None:
        names = [f"f{j}" for j in range(m)]
    return GlobalExplanation(
        feature_names=list(names),
        row_ids=[f"r{i}" for i in range(n)],
        shap=shap,
        features=np.asarray(features, dtype=float),
        base_value=0.1,
    )


def stump_ensemble(n_features=3, feature=0):
    tree = Tree.from_doc({
        "feature": feature, "threshold": 0.5, "cover": 2.0,
        "left": {"weight": -1.0, "cover": 1.0},
        "right": {"weight": 1.0, "cover": 1.0},
    })
    return TreeEnsemble(0.0, 1.0, [f"f{j}" for j in range(n_features)], [tree])


class TestRanking:
    def test_mean_abs_and_order(self):
        exp = make_explanation([[1.0, -4.0, 2.0],
                                [-3.0, 0.0, 2.0]])
        npt.assert_array_equal(exp.mean_abs_shap, [2.0, 2.0, 2.0])
        # exact ties keep the original feature order
        assert [f for f, _ in exp.ranking()] == ["f0", "f1", "f2"]

    def test_descending_with_distinct_values(self):
        exp = make_explanation([[0.5, -4.0, 2.0]])
        assert exp.ranking() == [("f1", 4.0), ("f2", 2.0), ("f0", 0.5)]

    def test_top_features_remainder(self):
        exp = make_explanation([[4.0, 3.0, 2.0, 1.0]])
        top, remainder = exp.top_features(k=2)
        assert [f for f, _ in top] == ["f0", "f1"]
        assert remainder == 3.0  # 2.0 + 1.0
        top_all, rem_all = exp.top_features(k=10)
        assert len(top_all) == 4 and rem_all == 0.0

    def test_single_used_feature_ranks_first(self):
        rng = np.random.default_rng(0)
        ens = stump_ensemble(n_features=4, feature=2)
        rows = rng.random((20, 4))
        exp = global_explanation(ens, rows, [f"s{i}" for i in range(20)],
                                 rng.random((6, 4)))
        ranked = exp.ranking()
        assert ranked[0][0] == "f2"
        assert all(v == 0.0 for _, v in ranked[1:])

    def test_identical_rows_identical_attributions(self):
        rng = np.random.default_rng(1)
        ens = stump_ensemble()
        row = rng.random(3)
        exp = global_explanation(ens, np.tile(row, (5, 1)),
                                 [f"s{i}" for i in range(5)], rng.random((4, 3)))
        for i in range(1, 5):
            npt.assert_array_equal(exp.shap[i], exp.shap[0])


class TestDependency:
    def test_same_feature_both_axes(self):
        exp = make_explanation([[1.0, 2.0], [3.0, 4.0]],
                               features=[[10.0, 20.0], [30.0, 40.0]])
        x, y, color = exp.dependency_data("f0", "f0")
        npt.assert_array_equal(x, color)
        npt.assert_array_equal(x, [10.0, 30.0])
        npt.assert_array_equal(y, [1.0, 3.0])

    def test_unknown_feature(self):
        exp = make_explanation([[1.0, 2.0]])
        with pytest.raises(UnknownFeature):
            exp.dependency_data("nope", "f0")
        with pytest.raises(UnknownFeature):
            exp.dependency_data("f0", "nope")

    def test_csv_header_and_rows(self, tmp_path):
        exp = make_explanation([[1.0, 2.0], [3.0, 4.0]],
                               features=[[10.0, 20.0], [30.0, 40.0]])
        path = tmp_path / "dep.csv"
        write_dependency_csv(path, exp, "f1", "f0", provenance={"seed": 0})
        lines = path.read_text().splitlines()
        assert lines[0].startswith("#")
        header = next(ln for ln in lines if not ln.startswith("#"))
        assert header == "row_id,f1,shap_f1,f0"
        assert lines[-1] == "r1,40.0,4.0,30.0"


class TestSummaryExports:
    def test_shap_csv_long_form(self, tmp_path):
        exp = make_explanation([[1.0, -2.0]], features=[[5.0, 6.0]])
        path = tmp_path / "shap.csv"
        write_shap_csv(path, exp, provenance={"seed": 3})
        rows = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
        assert rows[0] == "row_id,feature,feature_value,shap_value"
        assert rows[1:] == ["r0,f0,5.0,1.0", "r0,f1,6.0,-2.0"]

    def test_summary_doc(self):
        exp = make_explanation([[4.0, 1.0]])
        doc = shap_summary_doc(exp)
        assert doc["n_rows"] == 1
        assert doc["base_value"] == 0.1
        assert doc["ranking"][0] == {"feature": "f0", "mean_abs_shap": 4.0}
        assert doc["remainder_mean_abs_shap"] == 0.0


@pytest.fixture(scope="module")
def small_model():
    # untrained decoder is fine here: probes only need a deterministic
    # latent -> profile map with the production geometry
    return build_autoencoder("ic", 2.0, 0.5, np.random.default_rng(77))


@pytest.fixture(scope="module")
def latent_table():
    return np.random.default_rng(78).normal(0, 1, (40, 10))


class TestRegionReconstruct:
    def test_counts_and_shapes(self, small_model, latent_table):
        profiles, count = region_reconstruct(small_model, latent_table, 3,
                                             -10.0, 10.0)
        assert count == 40 and profiles.shape == (40, 200)
        empty, zero = region_reconstruct(small_model, latent_table, 3,
                                         100.0, 200.0)
        assert zero == 0 and empty.shape == (0, 200)

    def test_selection_matches_decode(self, small_model, latent_table):
        profiles, count = region_reconstruct(small_model, latent_table, 0,
                                             0.0, 1.0)
        mask = (latent_table[:, 0] >= 0.0) & (latent_table[:, 0] <= 1.0)
        assert count == int(mask.sum()) > 0
        npt.assert_array_equal(profiles,
                               small_model.decode_batch(latent_table[mask]))

    def test_bad_bounds_and_index(self, small_model, latent_table):
        with pytest.raises(ValueError):
            region_reconstruct(small_model, latent_table, 0, 1.0, 1.0)
        with pytest.raises(IndexOutOfRange):
            region_reconstruct(small_model, latent_table, 10, 0.0, 1.0)


class TestPerturbationProbe:
    def test_zero_offset_delta_is_exactly_zero(self, small_model, latent_table):
        result = perturbation_probe(small_model, latent_table, 3,
                                    offsets=(-1.0, 0.0, 1.0), n_samples=20, seed=1)
        i0 = result.offsets.index(0.0)
        npt.assert_array_equal(result.delta_profiles[i0], np.zeros(200))

    def test_seeded_determinism(self, small_model, latent_table):
        kwargs = dict(offsets=(-1.0, 0.0, 1.0), n_samples=15)
        r1 = perturbation_probe(small_model, latent_table, 2, seed=5, **kwargs)
        r2 = perturbation_probe(small_model, latent_table, 2, seed=5, **kwargs)
        npt.assert_array_equal(r1.mean_profiles, r2.mean_profiles)
        r3 = perturbation_probe(small_model, latent_table, 2, seed=6, **kwargs)
        assert not np.array_equal(r1.mean_profiles, r3.mean_profiles)

    def test_offset_order_does_not_matter(self, small_model, latent_table):
        a = perturbation_probe(small_model, latent_table, 1,
                               offsets=(-2.0, 0.0, 2.0), n_samples=10, seed=3)
        b = perturbation_probe(small_model, latent_table, 1,
                               offsets=(2.0, 0.0, -2.0), n_samples=10, seed=3)
        npt.assert_array_equal(a.mean_profiles[a.offsets.index(2.0)],
                               b.mean_profiles[b.offsets.index(2.0)])

    def test_validation(self, small_model, latent_table):
        with pytest.raises(IndexOutOfRange):
            perturbation_probe(small_model, latent_table, 10)
        with pytest.raises(ValueError):
            perturbation_probe(small_model, latent_table, 0, offsets=(1.0, 2.0))
        with pytest.raises(TooFewItems):
            perturbation_probe(small_model, latent_table, 0, n_samples=0)

    def test_peak_helpers(self):
        delta = np.zeros((3, 200))
        delta[0, 137] = -0.5   # largest magnitude across all offsets
        delta[2, 40] = 0.3
        result = ProbeResult(latent_index=0, offsets=(-1.0, 0.0, 1.0),
                             mean_profiles=np.zeros((3, 200)),
                             delta_profiles=delta, n_samples=5, seed=0)
        assert result.peak_bin() == 137
        assert result.peak_meter() == 6

    def test_csv_round_trip(self, small_model, latent_table, tmp_path):
        result = perturbation_probe(small_model, latent_table, 4,
                                    offsets=(-1.0, 0.0, 1.0), n_samples=8, seed=2)
        path = tmp_path / "probe.csv"
        write_probe_csv(path, result, provenance={"seed": 2})
        offsets, depths, deltas = read_probe_csv(path)
        npt.assert_array_equal(offsets, [-1.0, 0.0, 1.0])
        assert depths.shape == (200,) and abs(depths[0] - 0.025) < 1e-12
        npt.assert_array_equal(deltas, result.delta_profiles)
