"""The bottleneck autoencoder: normalization, encode/decode, serialization.

The model works in a "prepared" space: profiles are z-scored with scalar
training-split statistics, reshaped to (rows, d), summed with the positional
encoding, and flattened back. The encoder maps prepared vectors to the latent
space; the decoder maps latents back to prepared space. ``decode`` undoes the
preparation (subtract encoding, denormalize) so its output is a physical
profile comparable to the original.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import LengthMismatch, NonFiniteInput, ZeroStd
from .network import MlpLayer, check_chain, init_layer, network_forward
from .posenc import PosEncodingConfig, positional_encoding

CHANNELS = ("ic", "qc1ncs")
ENCODER_SIZES = (200, 128, 64, 10)
LATENT_DIM = 10
MODEL_FORMAT_VERSION = "1"


def fit_norm_stats(train_values) -> tuple[float, float]:
    """Scalar mean/std over every entry of the training channel matrix."""
    arr = np.asarray(train_values, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise NonFiniteInput("training values must be finite")
    mean = float(arr.mean())
    std = float(arr.std())
    if std <= 0.0:
        raise ZeroStd("training channel is constant; cannot z-score")
    return mean, std


def normalize_channel(values, mean: float, std: float) -> np.ndarray:
    if std <= 0.0:
        raise ZeroStd(f"std must be > 0, got {std}")
    return (np.asarray(values, dtype=float) - mean) / std


def denormalize_channel(values, mean: float, std: float) -> np.ndarray:
    if std <= 0.0:
        raise ZeroStd(f"std must be > 0, got {std}")
    return np.asarray(values, dtype=float) * std + mean


@dataclass
class AutoencoderModel:
    """Trained (or initialized) autoencoder for one profile channel."""

    channel: str
    encoder: list[MlpLayer]
    decoder: list[MlpLayer]
    norm_mean: float
    norm_std: float
    pe: PosEncodingConfig

    def __post_init__(self):
        self.pe.validate()
        check_chain(self.encoder)
        check_chain(self.decoder)
        if self.encoder[0].n_in != self.pe.size or self.decoder[-1].n_out != self.pe.size:
            raise LengthMismatch("encoder input / decoder output must match rows * d")
        if self.encoder[-1].n_out != self.decoder[0].n_in:
            raise LengthMismatch("latent dimensions of encoder and decoder differ")
        if self.norm_std <= 0.0:
            raise ZeroStd(f"norm_std must be > 0, got {self.norm_std}")
        self._pe_flat = positional_encoding(self.pe).reshape(self.pe.size)

    @property
    def input_dim(self) -> int:
        return self.pe.size

    @property
    def latent_dim(self) -> int:
        return self.encoder[-1].n_out

    def parameters(self) -> list[np.ndarray]:
        """All weight and bias arrays in a fixed order (shared with Adam)."""
        params = []
        for layer in self.encoder + self.decoder:
            params.append(layer.weights)
            params.append(layer.biases)
        return params

    def copy_weights(self) -> list[np.ndarray]:
        return [p.copy() for p in self.parameters()]

    def load_weights(self, snapshot: list[np.ndarray]) -> None:
        for param, saved in zip(self.parameters(), snapshot, strict=True):
            param[...] = saved

    # -- prepared space ----------------------------------------------------

    def prepare(self, profiles: np.ndarray) -> np.ndarray:
        """Physical profiles (n, input_dim) -> normalized + position-coded."""
        x = np.atleast_2d(np.asarray(profiles, dtype=float))
        if x.shape[1] != self.input_dim:
            raise LengthMismatch(f"expected {self.input_dim} bins, got {x.shape[1]}")
        if not np.all(np.isfinite(x)):
            raise NonFiniteInput("profile contains non-finite values")
        return normalize_channel(x, self.norm_mean, self.norm_std) + self._pe_flat

    def unprepare(self, prepared: np.ndarray) -> np.ndarray:
        """Inverse of prepare."""
        return denormalize_channel(prepared - self._pe_flat, self.norm_mean, self.norm_std)

    # -- public mapping ----------------------------------------------------

    def encode_batch(self, profiles: np.ndarray) -> np.ndarray:
        out, _ = network_forward(self.encoder, self.prepare(profiles))
        return out

    def decode_batch(self, latents: np.ndarray) -> np.ndarray:
        z = np.atleast_2d(np.asarray(latents, dtype=float))
        if z.shape[1] != self.latent_dim:
            raise LengthMismatch(f"expected {self.latent_dim} latent values, got {z.shape[1]}")
        if not np.all(np.isfinite(z)):
            raise NonFiniteInput("latent vector contains non-finite values")
        out, _ = network_forward(self.decoder, z)
        return self.unprepare(out)

    def encode(self, profile) -> np.ndarray:
        return self.encode_batch(np.asarray(profile, dtype=float)[None, :])[0]

    def decode(self, z) -> np.ndarray:
        return self.decode_batch(np.asarray(z, dtype=float)[None, :])[0]

    def reconstruct_batch(self, profiles: np.ndarray) -> np.ndarray:
        return self.decode_batch(self.encode_batch(profiles))

    def reconstruct(self, profile) -> np.ndarray:
        return self.reconstruct_batch(np.asarray(profile, dtype=float)[None, :])[0]


def build_autoencoder(
    channel: str,
    norm_mean: float,
    norm_std: float,
    rng: np.random.Generator,
    pe: PosEncodingConfig | None = None,
    sizes: tuple[int, ...] = ENCODER_SIZES,
) -> AutoencoderModel:
    """Fresh model with mirrored encoder/decoder: rectified hidden layers,
    identity latent and output layers. The default sizes are the production
    200-128-64-10 architecture."""
    if channel not in CHANNELS:
        raise LengthMismatch(f"channel must be one of {CHANNELS}, got {channel!r}")
    pe = pe or PosEncodingConfig()
    if len(sizes) < 2:
        raise LengthMismatch("need at least input and latent sizes")
    if pe.size != sizes[0]:
        raise LengthMismatch(f"positional encoding covers {pe.size} bins, expected {sizes[0]}")

    def stack(dims):
        layers = []
        for k, (n_in, n_out) in enumerate(zip(dims, dims[1:])):
            act = "identity" if k == len(dims) - 2 else "relu"
            layers.append(init_layer(n_in, n_out, act, rng))
        return layers

    return AutoencoderModel(
        channel=channel,
        encoder=stack(sizes),
        decoder=stack(sizes[::-1]),
        norm_mean=norm_mean,
        norm_std=norm_std,
        pe=pe,
    )


def _layer_doc(layer: MlpLayer) -> dict:
    return {
        "shape": [layer.n_out, layer.n_in],
        "activation": layer.activation,
        "weights": [float(v) for v in layer.weights.reshape(-1)],
        "biases": [float(v) for v in layer.biases],
    }


def _layer_from_doc(doc: dict) -> MlpLayer:
    n_out, n_in = (int(v) for v in doc["shape"])
    weights = np.array(doc["weights"], dtype=float).reshape(n_out, n_in)
    return MlpLayer(weights, np.array(doc["biases"], dtype=float), doc["activation"])


def save_model(model: AutoencoderModel, path, provenance: dict | None = None) -> None:
    doc = {
        "format_version": MODEL_FORMAT_VERSION,
        "channel": model.channel,
        "pe": {"d": model.pe.d, "base": model.pe.base, "rows": model.pe.rows},
        "norm": {"mean": model.norm_mean, "std": model.norm_std},
        "encoder": [_layer_doc(l) for l in model.encoder],
        "decoder": [_layer_doc(l) for l in model.decoder],
    }
    if provenance is not None:
        doc["provenance"] = provenance
    Path(path).write_text(json.dumps(doc) + "\n")


def load_model(path) -> AutoencoderModel:
    doc = json.loads(Path(path).read_text())
    if doc.get("format_version") != MODEL_FORMAT_VERSION:
        raise LengthMismatch(
            f"{path}: unsupported model format {doc.get('format_version')!r}"
        )
    return AutoencoderModel(
        channel=doc["channel"],
        encoder=[_layer_from_doc(d) for d in doc["encoder"]],
        decoder=[_layer_from_doc(d) for d in doc["decoder"]],
        norm_mean=float(doc["norm"]["mean"]),
        norm_std=float(doc["norm"]["std"]),
        pe=PosEncodingConfig(
            d=int(doc["pe"]["d"]), base=float(doc["pe"]["base"]), rows=int(doc["pe"]["rows"])
        ),
    )
