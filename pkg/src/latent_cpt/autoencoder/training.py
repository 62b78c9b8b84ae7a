"""Autoencoder training: MSE loss with hand-written backprop, Adam, early
stopping on validation MSE."""

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from ..errors import DivergedLoss, TooFewItems
from .model import ENCODER_SIZES, AutoencoderModel, build_autoencoder, fit_norm_stats
from .network import network_backward, network_forward
from .posenc import PosEncodingConfig


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-3
    batch_size: int = 32
    max_epochs: int = 500
    patience_epochs: int = 20
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    seed: int = 0

    def validate(self) -> None:
        if not self.learning_rate > 0:
            raise TooFewItems(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.batch_size < 1 or self.patience_epochs < 1 or self.max_epochs < 1:
            raise TooFewItems("batch_size, patience_epochs, max_epochs must be >= 1")


class Adam:
    """Adaptive-moment optimizer updating a fixed list of arrays in place."""

    def __init__(self, params: list[np.ndarray], lr: float, beta1: float = 0.9,
                 beta2: float = 0.999, epsilon: float = 1e-8):
        self.params = params
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, grads: list[np.ndarray]) -> None:
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        bias1 = 1.0 - b1**self.t
        bias2 = 1.0 - b2**self.t
        for p, g, m, v in zip(self.params, grads, self.m, self.v, strict=True):
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * g * g
            p -= self.lr * (m / bias1) / (np.sqrt(v / bias2) + self.epsilon)


def loss_and_gradients(model: AutoencoderModel, profiles: np.ndarray):
    """Mean squared reconstruction error in prepared space, plus gradients.

    The target is the prepared input itself (treated as constant); the mean
    runs over both the batch and the input entries, so duplicating the batch
    changes nothing. Gradients are returned in model.parameters() order.
    """
    target = model.prepare(profiles)
    latent, enc_caches = network_forward(model.encoder, target)
    output, dec_caches = network_forward(model.decoder, latent)
    residual = output - target
    mse = float(np.mean(residual**2))
    grad_out = (2.0 / residual.size) * residual
    grad_latent, dec_grads = network_backward(model.decoder, dec_caches, grad_out)
    _, enc_grads = network_backward(model.encoder, enc_caches, grad_latent)
    flat: list[np.ndarray] = []
    for grad_w, grad_b in enc_grads + dec_grads:
        flat.append(grad_w)
        flat.append(grad_b)
    return mse, flat


def evaluate_mse(model: AutoencoderModel, profiles: np.ndarray) -> float:
    target = model.prepare(profiles)
    latent, _ = network_forward(model.encoder, target)
    output, _ = network_forward(model.decoder, latent)
    return float(np.mean((output - target) ** 2))


@dataclass
class TrainingHistory:
    """Per-epoch MSE record. Row 0 is the initial-weights evaluation; rows
    1..n are training epochs. best_epoch indexes into these rows."""

    epochs: list[int] = field(default_factory=list)
    train_mse: list[float] = field(default_factory=list)
    val_mse: list[float] = field(default_factory=list)
    best_epoch: int = 0

    def append(self, epoch: int, train: float, val: float) -> None:
        self.epochs.append(epoch)
        self.train_mse.append(train)
        self.val_mse.append(val)

    @property
    def best_val_mse(self) -> float:
        return self.val_mse[self.best_epoch]


def train_autoencoder(
    train_profiles: np.ndarray,
    val_profiles: np.ndarray,
    channel: str,
    config: TrainConfig | None = None,
    pe: PosEncodingConfig | None = None,
    sizes: tuple[int, ...] = ENCODER_SIZES,
) -> tuple[AutoencoderModel, TrainingHistory]:
    """Train one channel's autoencoder; returns best-validation weights.

    Deterministic given config.seed: one child seed initializes weights, a
    second drives the per-epoch shuffles.
    """
    config = config or TrainConfig()
    config.validate()
    train_x = np.asarray(train_profiles, dtype=float)
    val_x = np.asarray(val_profiles, dtype=float)
    if train_x.ndim != 2 or train_x.shape[0] < 1 or val_x.ndim != 2 or val_x.shape[0] < 1:
        raise TooFewItems("train and val must both be non-empty (n, bins) arrays")

    init_seed, shuffle_seed = np.random.SeedSequence(config.seed).spawn(2)
    mean, std = fit_norm_stats(train_x)
    model = build_autoencoder(channel, mean, std, np.random.default_rng(init_seed),
                              pe=pe, sizes=sizes)
    shuffle_rng = np.random.default_rng(shuffle_seed)

    history = TrainingHistory()
    history.append(0, evaluate_mse(model, train_x), evaluate_mse(model, val_x))
    best_val = history.val_mse[0]
    best_weights = model.copy_weights()
    stale = 0

    adam = Adam(model.parameters(), config.learning_rate, config.beta1,
                config.beta2, config.epsilon)
    n = train_x.shape[0]
    for epoch in range(1, config.max_epochs + 1):
        order = shuffle_rng.permutation(n)
        for start in range(0, n, config.batch_size):
            batch = train_x[order[start : start + config.batch_size]]
            mse, grads = loss_and_gradients(model, batch)
            if not np.isfinite(mse):
                raise DivergedLoss(f"{channel}: non-finite loss at epoch {epoch}")
            adam.step(grads)

        train_mse = evaluate_mse(model, train_x)
        val_mse = evaluate_mse(model, val_x)
        if not (np.isfinite(train_mse) and np.isfinite(val_mse)):
            raise DivergedLoss(f"{channel}: non-finite loss at epoch {epoch}")
        history.append(epoch, train_mse, val_mse)

        if val_mse < best_val:
            best_val = val_mse
            best_weights = model.copy_weights()
            history.best_epoch = epoch
            stale = 0
        else:
            stale += 1
            if stale >= config.patience_epochs:
                break

    model.load_weights(best_weights)
    return model, history


def write_history(path, history: TrainingHistory, provenance: dict | None = None) -> None:
    from ..data.io import comment_lines, fmt_float

    with open(path, "w", newline="") as fh:
        for line in comment_lines(provenance):
            fh.write(line + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["epoch", "train_mse", "val_mse"])
        for e, t, v in zip(history.epochs, history.train_mse, history.val_mse):
            writer.writerow([e, fmt_float(t), fmt_float(v)])


def read_history(path) -> TrainingHistory:
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    rows = list(csv.reader(io.StringIO("".join(lines))))
    history = TrainingHistory()
    for row in rows[1:]:
        history.append(int(row[0]), float(row[1]), float(row[2]))
    history.best_epoch = int(np.argmin(history.val_mse))
    return history
