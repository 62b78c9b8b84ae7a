"""Sinusoidal positional encoding over profile rows.

Each of the ``rows`` one-meter segments of a profile matrix gets a
d-dimensional sinusoid whose frequencies fall geometrically with the column
pair index, so nearby rows receive similar codes and distant rows distinct
ones. Injecting the code before encoding gives the depth-blind dense layers
a handle on where each segment sits in the profile.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import LengthMismatch


@dataclass(frozen=True)
class PosEncodingConfig:
    d: int = 20
    base: float = 10000.0
    rows: int = 10

    def validate(self) -> None:
        if self.d <= 0 or self.d % 2 != 0:
            raise LengthMismatch(f"embedding dimension must be positive and even, got {self.d}")
        if self.rows < 1:
            raise LengthMismatch(f"rows must be >= 1, got {self.rows}")
        if not self.base > 1:
            raise LengthMismatch(f"base must be > 1, got {self.base}")

    @property
    def size(self) -> int:
        """Flattened length rows * d."""
        return self.rows * self.d


def positional_encoding(cfg: PosEncodingConfig) -> np.ndarray:
    """(rows, d) matrix with sin(pos / base^(2i/d)) in column 2i and
    cos of the same angle in column 2i + 1."""
    cfg.validate()
    pos = np.arange(cfg.rows, dtype=float)[:, None]
    two_i = 2.0 * np.arange(cfg.d // 2, dtype=float)[None, :]
    angle = pos / cfg.base ** (two_i / cfg.d)
    pe = np.empty((cfg.rows, cfg.d))
    pe[:, 0::2] = np.sin(angle)
    pe[:, 1::2] = np.cos(angle)
    return pe
