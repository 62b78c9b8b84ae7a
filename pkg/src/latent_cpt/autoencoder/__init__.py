"""Positional encoding, bottleneck autoencoder, metrics, PCA baseline."""

from .metrics import abs_log_difference, rmse
from .model import (
    CHANNELS,
    ENCODER_SIZES,
    LATENT_DIM,
    AutoencoderModel,
    build_autoencoder,
    denormalize_channel,
    fit_norm_stats,
    load_model,
    normalize_channel,
    save_model,
)
from .network import MlpLayer, init_layer, network_backward, network_forward
from .pca import PcaBasis, pca_decode, pca_encode, pca_fit
from .posenc import PosEncodingConfig, positional_encoding
from .training import (
    Adam,
    TrainConfig,
    TrainingHistory,
    evaluate_mse,
    loss_and_gradients,
    read_history,
    train_autoencoder,
    write_history,
)

__all__ = [
    "abs_log_difference",
    "rmse",
    "CHANNELS",
    "ENCODER_SIZES",
    "LATENT_DIM",
    "AutoencoderModel",
    "build_autoencoder",
    "denormalize_channel",
    "fit_norm_stats",
    "load_model",
    "normalize_channel",
    "save_model",
    "MlpLayer",
    "init_layer",
    "network_backward",
    "network_forward",
    "PcaBasis",
    "pca_decode",
    "pca_encode",
    "pca_fit",
    "PosEncodingConfig",
    "positional_encoding",
    "Adam",
    "TrainConfig",
    "TrainingHistory",
    "evaluate_mse",
    "loss_and_gradients",
    "read_history",
    "train_autoencoder",
    "write_history",
]
