"""Pipeline stages: each reads its inputs from disk, writes its artifacts
under the output directory, and embeds provenance (config hash + seed) in
everything it emits."""

import csv
from pathlib import Path

import numpy as np

from ..autoencoder.metrics import abs_log_difference, rmse
from ..autoencoder.model import load_model, save_model
from ..autoencoder.training import train_autoencoder, write_history
from ..data.io import (
    comment_lines,
    fmt_float,
    read_latent_table,
    read_profile_samples,
    read_regular_profiles,
    read_site_records,
    write_json,
    write_latent_table,
    write_profile_samples,
    write_regular_profiles,
    write_site_records,
)
from ..data.profiles import RawCptSamples, bin_centers, regularize_profile
from ..data.records import join_datasets
from ..data.split import load_split, save_split, split_dataset
from ..data.synth import generate_corpus
from ..errors import MissingArtifact
from ..explain.global_exp import (
    global_explanation,
    shap_summary_doc,
    write_dependency_csv,
    write_shap_csv,
)
from ..explain.probe import perturbation_probe, write_probe_csv
from ..gbdt.evaluation import confusion, metrics_report
from ..gbdt.features import build_feature_table
from ..gbdt.trees import load_ensemble, save_ensemble
from ..gbdt.training import train_gbdt
from .config import PipelineConfig

STAGES = ("synth", "prepare", "train-ae", "encode", "reconstruct-report",
          "train-clf", "evaluate", "explain", "probe")


def _provenance(cfg: PipelineConfig, seed: int, stage: str) -> dict:
    return {"config_sha256": cfg.config_sha256, "seed": seed, "stage": stage}


def _need(path: Path, hint: str = "") -> Path:
    if not Path(path).exists():
        raise MissingArtifact(str(path), hint)
    return Path(path)


def _out(cfg: PipelineConfig, name: str) -> Path:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    return cfg.out_dir / name


def _load_joined(cfg: PipelineConfig):
    profiles = read_regular_profiles(_need(_out(cfg, "regular.csv"), "run `prepare` first"))
    records = read_site_records(_need(cfg.sites_path, "run `synth` or supply site data"))
    rows, _ = join_datasets(profiles, records)
    return rows


def _split_rows(rows, split):
    by_subset = {"train": [], "val": [], "test": []}
    for profile, record in rows:
        by_subset[split.subset_of(profile.site_id)].append((profile, record))
    return by_subset


def stage_synth(cfg: PipelineConfig) -> list[Path]:
    """Generate the synthetic corpus and write raw-sample + site CSVs."""
    profiles, records = generate_corpus(cfg.synth_n_sites, cfg.synth_seed)
    prov = _provenance(cfg, cfg.synth_seed, "synth")
    centers = bin_centers()
    samples = [
        RawCptSamples(p.site_id, centers, p.ic, p.qc1ncs) for p in profiles
    ]
    cfg.profiles_path.parent.mkdir(parents=True, exist_ok=True)
    cfg.sites_path.parent.mkdir(parents=True, exist_ok=True)
    write_profile_samples(cfg.profiles_path, samples, prov)
    write_site_records(cfg.sites_path, records, prov)
    return [cfg.profiles_path, cfg.sites_path]


def stage_prepare(cfg: PipelineConfig) -> list[Path]:
    """Regularize raw samples, join with site records, split, and report."""
    samples = read_profile_samples(_need(cfg.profiles_path, "run `synth` or supply data"))
    records = read_site_records(_need(cfg.sites_path, "run `synth` or supply data"))
    regular = [regularize_profile(s) for s in samples]
    rows, report = join_datasets(regular, records)
    split = split_dataset([p.site_id for p, _ in rows], cfg.split_seed)
    prov = _provenance(cfg, cfg.split_seed, "prepare")

    regular_path = _out(cfg, "regular.csv")
    write_regular_profiles(regular_path, [p for p, _ in rows], prov)
    split_path = _out(cfg, "split.json")
    save_split(split, split_path, prov)

    by_subset = _split_rows(rows, split)
    report_doc = {
        "n_sites": len(rows),
        "dropped_missing_profile": list(report.missing_profile),
        "dropped_missing_record": list(report.missing_record),
        "subset_sizes": {k: len(v) for k, v in by_subset.items()},
        "subset_base_rates": {
            k: (float(np.mean([r.label for _, r in v])) if v else None)
            for k, v in by_subset.items()
        },
    }
    report_path = _out(cfg, "prepare_report.json")
    write_json(report_path, report_doc, prov)
    return [regular_path, split_path, report_path]


def _channel_matrix(rows, ids, channel):
    by_id = {p.site_id: p for p, _ in rows}
    return np.stack([by_id[s].channel(channel) for s in ids])


def stage_train_ae(cfg: PipelineConfig) -> list[Path]:
    """Train both channel autoencoders on the train split."""
    rows = _load_joined(cfg)
    split = load_split(_need(_out(cfg, "split.json"), "run `prepare` first"))
    train_ids = sorted(split.train)
    val_ids = sorted(split.val)
    outputs = []
    for channel in ("ic", "qc1ncs"):
        train_x = _channel_matrix(rows, train_ids, channel)
        val_x = _channel_matrix(rows, val_ids, channel)
        ae_cfg = cfg.ae_config(channel)
        model, history = train_autoencoder(train_x, val_x, channel, ae_cfg)
        prov = _provenance(cfg, ae_cfg.seed, "train-ae")
        model_path = _out(cfg, f"ae_{channel}.json")
        save_model(model, model_path, prov)
        history_path = _out(cfg, f"history_{channel}.csv")
        write_history(history_path, history, prov)
        outputs += [model_path, history_path]
    return outputs


def _load_ae(cfg: PipelineConfig, channel: str):
    return load_model(
        _need(_out(cfg, f"ae_{channel}.json"), "run `train-ae` first")
    )


def stage_encode(cfg: PipelineConfig) -> list[Path]:
    """Emit the latent table for every joined site."""
    rows = _load_joined(cfg)
    ids = [p.site_id for p, _ in rows]
    model_ic = _load_ae(cfg, "ic")
    model_qc = _load_ae(cfg, "qc1ncs")
    lat_ic = model_ic.encode_batch(np.stack([p.ic for p, _ in rows]))
    lat_qc = model_qc.encode_batch(np.stack([p.qc1ncs for p, _ in rows]))
    path = _out(cfg, "latents.csv")
    write_latent_table(path, ids, lat_ic, lat_qc,
                       _provenance(cfg, cfg.split_seed, "encode"))
    return [path]


def stage_reconstruct_report(cfg: PipelineConfig) -> list[Path]:
    """Per-profile reconstruction metrics on the held-out test split."""
    rows = _load_joined(cfg)
    split = load_split(_need(_out(cfg, "split.json"), "run `prepare` first"))
    test_ids = sorted(split.test)
    models = {ch: _load_ae(cfg, ch) for ch in ("ic", "qc1ncs")}
    prov = _provenance(cfg, cfg.split_seed, "reconstruct-report")

    csv_path = _out(cfg, "reconstruction.csv")
    stats: dict[str, dict] = {}
    with open(csv_path, "w", newline="") as fh:
        for line in comment_lines(prov):
            fh.write(line + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["site_id", "channel", "rmse", "abs_log_difference"])
        for channel, model in models.items():
            x = _channel_matrix(rows, test_ids, channel)
            recon = model.reconstruct_batch(x)
            rmses, alds = [], []
            for i, site_id in enumerate(test_ids):
                r = rmse(recon[i], x[i])
                rmses.append(r)
                if np.all(recon[i] > 0):
                    a = abs_log_difference(recon[i], x[i])
                    alds.append(a)
                    writer.writerow([site_id, channel, fmt_float(r), fmt_float(a)])
                else:
                    writer.writerow([site_id, channel, fmt_float(r), ""])
            stats[channel] = {
                "n_profiles": len(test_ids),
                "rmse": _distribution(rmses),
                "abs_log_difference": _distribution(alds),
                "n_non_positive_reconstructions": len(test_ids) - len(alds),
            }

    summary_path = _out(cfg, "reconstruction_summary.json")
    write_json(summary_path, {"split": "test", "channels": stats}, prov)
    return [csv_path, summary_path]


def _distribution(values) -> dict | None:
    if not values:
        return None
    arr = np.asarray(values, dtype=float)
    return {
        "min": float(arr.min()),
        "median": float(np.median(arr)),
        "mean": float(arr.mean()),
        "max": float(arr.max()),
    }


def _load_latents_by_site(cfg: PipelineConfig) -> dict[str, np.ndarray]:
    ids, lat_ic, lat_qc = read_latent_table(
        _need(_out(cfg, "latents.csv"), "run `encode` first")
    )
    both = np.hstack([lat_ic, lat_qc])
    return {site_id: both[i] for i, site_id in enumerate(ids)}


def _feature_tables(cfg: PipelineConfig, variant: str):
    rows = _load_joined(cfg)
    split = load_split(_need(_out(cfg, "split.json"), "run `prepare` first"))
    latents = _load_latents_by_site(cfg) if variant == "D" else None
    by_subset = _split_rows(rows, split)
    return {
        subset: build_feature_table(variant, subset_rows, latents)
        for subset, subset_rows in by_subset.items()
    }


def stage_train_clf(cfg: PipelineConfig) -> list[Path]:
    """Train one boosted ensemble per configured variant."""
    outputs = []
    for variant in cfg.variants:
        tables = _feature_tables(cfg, variant)
        x_tr, y_tr, names, _ = tables["train"]
        x_va, y_va, _, _ = tables["val"]
        ensemble, history = train_gbdt(x_tr, y_tr, x_va, y_va, names, cfg.gbdt_config)
        prov = _provenance(cfg, cfg.gbdt_config.seed, "train-clf")
        model_path = _out(cfg, f"model_{variant}.json")
        save_ensemble(ensemble, model_path, prov)
        rounds_path = _out(cfg, f"rounds_{variant}.csv")
        with open(rounds_path, "w", newline="") as fh:
            for line in comment_lines(prov):
                fh.write(line + "\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["round", "val_accuracy"])
            for i, acc in enumerate(history):
                writer.writerow([i, fmt_float(acc)])
        outputs += [model_path, rounds_path]
    return outputs


def stage_evaluate(cfg: PipelineConfig) -> list[Path]:
    """Test-split confusion counts and metrics for every configured variant."""
    report = {}
    for variant in cfg.variants:
        ensemble = load_ensemble(
            _need(_out(cfg, f"model_{variant}.json"), "run `train-clf` first")
        )
        tables = _feature_tables(cfg, variant)
        x_te, y_te, _, _ = tables["test"]
        cm = confusion(y_te, ensemble.predict_label(x_te))
        report[variant] = {
            "n_test": cm.total,
            "n_trees": len(ensemble.trees),
            "confusion": {"tn": cm.tn, "fp": cm.fp, "fn": cm.fn, "tp": cm.tp},
            "metrics": metrics_report(cm),
        }
    path = _out(cfg, "evaluation.json")
    write_json(path, report, _provenance(cfg, cfg.gbdt_config.seed, "evaluate"))
    return [path]


def stage_explain(cfg: PipelineConfig, svg: bool = False) -> list[Path]:
    """Global SHAP explanation of the configured variant on the test split,
    with a training-split background capped at explain.background_cap."""
    variant = cfg.explain.variant
    ensemble = load_ensemble(
        _need(_out(cfg, f"model_{variant}.json"), "run `train-clf` first")
    )
    tables = _feature_tables(cfg, variant)
    x_tr = tables["train"][0]
    x_te, _, _, test_ids = tables["test"]

    background = x_tr
    if background.shape[0] > cfg.explain.background_cap:
        rng = np.random.default_rng(cfg.explain.background_seed)
        keep = np.sort(rng.choice(background.shape[0], cfg.explain.background_cap,
                                  replace=False))
        background = background[keep]

    explanation = global_explanation(ensemble, x_te, test_ids, background)
    prov = _provenance(cfg, cfg.explain.background_seed, "explain")
    shap_path = _out(cfg, "shap_values.csv")
    write_shap_csv(shap_path, explanation, prov)
    summary_path = _out(cfg, "shap_summary.json")
    doc = shap_summary_doc(explanation)
    doc["variant"] = variant
    doc["background_rows"] = int(background.shape[0])
    write_json(summary_path, doc, prov)
    dep_path = _out(cfg, "dependency.csv")
    write_dependency_csv(dep_path, explanation, cfg.explain.dependency_feature,
                         cfg.explain.dependency_color, prov)
    outputs = [shap_path, summary_path, dep_path]
    if svg:
        outputs += _explain_svgs(cfg, explanation)
    return outputs


def stage_probe(cfg: PipelineConfig, svg: bool = False) -> list[Path]:
    """Latent perturbation sweep for the configured channel and index."""
    model = _load_ae(cfg, cfg.probe.channel)
    ids, lat_ic, lat_qc = read_latent_table(
        _need(_out(cfg, "latents.csv"), "run `encode` first")
    )
    latents = lat_ic if cfg.probe.channel == "ic" else lat_qc
    result = perturbation_probe(
        model, latents, cfg.probe.latent_index, offsets=cfg.probe.offsets,
        n_samples=cfg.probe.n_samples, seed=cfg.probe.seed,
    )
    prov = _provenance(cfg, cfg.probe.seed, "probe")
    path = _out(cfg, "probe.csv")
    write_probe_csv(path, result, prov)
    outputs = [path]
    if svg:
        outputs.append(_probe_svg(cfg, result))
    return outputs


# -- optional SVG rendering (requires matplotlib) ---------------------------


def _pyplot():
    try:
        import matplotlib
    except ImportError as exc:  # pragma: no cover - depends on environment
        raise MissingArtifact("matplotlib", "install the 'plots' extra for --svg") from exc
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _explain_svgs(cfg: PipelineConfig, explanation) -> list[Path]:
    plt = _pyplot()
    top, _ = explanation.top_features()
    names = [f for f, _ in top][::-1]
    values = [v for _, v in top][::-1]
    fig, ax = plt.subplots(figsize=(7, 5))
    ax.barh(names, values)
    ax.set_xlabel("mean |SHAP| (margin)")
    ax.set_title(f"Model {cfg.explain.variant}: feature importance")
    fig.tight_layout()
    rank_path = _out(cfg, "importance.svg")
    fig.savefig(rank_path)
    plt.close(fig)

    x, y, color = explanation.dependency_data(
        cfg.explain.dependency_feature, cfg.explain.dependency_color
    )
    fig, ax = plt.subplots(figsize=(6, 5))
    sc = ax.scatter(x, y, c=color, s=12, cmap="coolwarm")
    fig.colorbar(sc, label=cfg.explain.dependency_color)
    ax.set_xlabel(cfg.explain.dependency_feature)
    ax.set_ylabel(f"SHAP of {cfg.explain.dependency_feature}")
    fig.tight_layout()
    dep_path = _out(cfg, "dependency.svg")
    fig.savefig(dep_path)
    plt.close(fig)
    return [rank_path, dep_path]


def _probe_svg(cfg: PipelineConfig, result) -> Path:
    plt = _pyplot()
    centers = bin_centers()
    fig, ax = plt.subplots(figsize=(6, 6))
    cmap = plt.get_cmap("coolwarm")
    lo, hi = min(result.offsets), max(result.offsets)
    for i, offset in enumerate(result.offsets):
        frac = 0.5 if hi == lo else (offset - lo) / (hi - lo)
        ax.plot(result.delta_profiles[i], centers, color=cmap(frac), lw=1)
    ax.invert_yaxis()
    ax.set_xlabel("reconstruction delta")
    ax.set_ylabel("depth (m)")
    ax.set_title(f"{cfg.probe.channel} latent {cfg.probe.latent_index} sweep")
    fig.tight_layout()
    path = _out(cfg, "probe.svg")
    fig.savefig(path)
    plt.close(fig)
    return path


STAGE_FUNCS = {
    "synth": stage_synth,
    "prepare": stage_prepare,
    "train-ae": stage_train_ae,
    "encode": stage_encode,
    "reconstruct-report": stage_reconstruct_report,
    "train-clf": stage_train_clf,
    "evaluate": stage_evaluate,
    "explain": stage_explain,
    "probe": stage_probe,
}
