"""Pipeline configuration: one JSON file, explicit seeds, path resolution.

Relative paths in the file resolve against the config file's directory, so a
config plus its data directory can be moved as a unit.
"""

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from ..autoencoder.training import TrainConfig
from ..errors import ConfigError
from ..explain.probe import DEFAULT_OFFSETS
from ..gbdt.features import VARIANTS
from ..gbdt.training import GbdtConfig

_AE_KEYS = {"learning_rate", "batch_size", "max_epochs", "patience_epochs",
            "beta1", "beta2", "epsilon", "seed"}
_GBDT_KEYS = {"max_depth", "early_stopping_rounds", "max_estimators",
              "learning_rate", "l2_lambda", "min_child_weight", "seed"}


@dataclass(frozen=True)
class ExplainSettings:
    variant: str = "D"
    background_cap: int = 256
    background_seed: int = 0
    dependency_feature: str = "I_c3"
    dependency_color: str = "gwd"


@dataclass(frozen=True)
class ProbeSettings:
    channel: str = "ic"
    latent_index: int = 3
    offsets: tuple[float, ...] = DEFAULT_OFFSETS
    n_samples: int = 100
    seed: int = 1


@dataclass(frozen=True)
class PipelineConfig:
    profiles_path: Path
    sites_path: Path
    out_dir: Path
    synth_n_sites: int = 2000
    synth_seed: int = 42
    split_seed: int = 42
    ae_configs: dict[str, TrainConfig] = field(default_factory=dict)
    gbdt_config: GbdtConfig = field(default_factory=GbdtConfig)
    variants: tuple[str, ...] = VARIANTS
    explain: ExplainSettings = field(default_factory=ExplainSettings)
    probe: ProbeSettings = field(default_factory=ProbeSettings)
    config_sha256: str = ""

    def ae_config(self, channel: str) -> TrainConfig:
        return self.ae_configs.get(channel, TrainConfig(seed=self.split_seed))


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigError(message)


def _sub(doc: dict, key: str) -> dict:
    value = doc.get(key, {})
    _require(isinstance(value, dict), f"config section {key!r} must be an object")
    return value


def _train_config(doc: dict, where: str) -> TrainConfig:
    unknown = set(doc) - _AE_KEYS
    _require(not unknown, f"{where}: unknown keys {sorted(unknown)}")
    try:
        cfg = TrainConfig(**doc)
        cfg.validate()
    except ConfigError:
        raise
    except Exception as exc:  # noqa: BLE001 - surface as config error
        raise ConfigError(f"{where}: {exc}") from exc
    return cfg


def load_config(path) -> PipelineConfig:
    """Parse and validate; raises ConfigError on any problem."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    _require(isinstance(doc, dict), "config root must be a JSON object")

    base = path.parent

    def resolve(p: str) -> Path:
        q = Path(p)
        return q if q.is_absolute() else base / q

    paths = _sub(doc, "paths")
    profiles = resolve(str(paths.get("profiles", "profiles.csv")))
    sites = resolve(str(paths.get("sites", "sites.csv")))
    out_dir = resolve(str(paths.get("out", "out")))

    synth = _sub(doc, "synth")
    n_sites = int(synth.get("n_sites", 2000))
    _require(n_sites >= 1, "synth.n_sites must be >= 1")
    synth_seed = int(synth.get("seed", 42))

    split_seed = int(_sub(doc, "split").get("seed", 42))

    ae_section = _sub(doc, "autoencoder")
    ae_configs = {}
    for channel in ("ic", "qc1ncs"):
        if channel in ae_section:
            ae_configs[channel] = _train_config(
                ae_section[channel], f"autoencoder.{channel}"
            )

    gbdt_doc = _sub(doc, "gbdt")
    unknown = set(gbdt_doc) - _GBDT_KEYS
    _require(not unknown, f"gbdt: unknown keys {sorted(unknown)}")
    try:
        gbdt_config = GbdtConfig(**gbdt_doc)
        gbdt_config.validate()
    except ConfigError:
        raise
    except Exception as exc:  # noqa: BLE001
        raise ConfigError(f"gbdt: {exc}") from exc

    variants = tuple(doc.get("variants", list(VARIANTS)))
    _require(len(variants) >= 1, "variants must be non-empty")
    for v in variants:
        _require(v in VARIANTS, f"unknown variant {v!r}")
    _require(len(set(variants)) == len(variants), "variants must be unique")

    exp_doc = _sub(doc, "explain")
    explain = ExplainSettings(
        variant=str(exp_doc.get("variant", "D")),
        background_cap=int(exp_doc.get("background_cap", 256)),
        background_seed=int(exp_doc.get("background_seed", 0)),
        dependency_feature=str(exp_doc.get("dependency_feature", "I_c3")),
        dependency_color=str(exp_doc.get("dependency_color", "gwd")),
    )
    _require(explain.variant in VARIANTS, f"explain.variant {explain.variant!r} invalid")
    _require(explain.background_cap >= 1, "explain.background_cap must be >= 1")

    probe_doc = _sub(doc, "probe")
    probe = ProbeSettings(
        channel=str(probe_doc.get("channel", "ic")),
        latent_index=int(probe_doc.get("latent_index", 3)),
        offsets=tuple(float(v) for v in probe_doc.get("offsets", DEFAULT_OFFSETS)),
        n_samples=int(probe_doc.get("n_samples", 100)),
        seed=int(probe_doc.get("seed", 1)),
    )
    _require(probe.channel in ("ic", "qc1ncs"), "probe.channel must be ic or qc1ncs")
    _require(0 <= probe.latent_index < 10, "probe.latent_index must be in [0, 10)")
    _require(0.0 in probe.offsets, "probe.offsets must include 0")
    _require(probe.n_samples >= 1, "probe.n_samples must be >= 1")

    known_top = {"paths", "synth", "split", "autoencoder", "gbdt", "variants",
                 "explain", "probe"}
    unknown = set(doc) - known_top
    _require(not unknown, f"unknown top-level config keys {sorted(unknown)}")

    return PipelineConfig(
        profiles_path=profiles,
        sites_path=sites,
        out_dir=out_dir,
        synth_n_sites=n_sites,
        synth_seed=synth_seed,
        split_seed=split_seed,
        ae_configs=ae_configs,
        gbdt_config=gbdt_config,
        variants=variants,
        explain=explain,
        probe=probe,
        config_sha256=hashlib.sha256(raw).hexdigest(),
    )
