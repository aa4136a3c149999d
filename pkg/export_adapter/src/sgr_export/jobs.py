"""Export job description and validation."""

from __future__ import annotations

from dataclasses import dataclass

MODES = ("single-pass", "mc-dropout")
SPLITS = (None, "cal", "test")


class ExportError(ValueError):
    """Invalid job parameters or a failed model/dataset load."""


@dataclass(frozen=True)
class ExportJob:
    """One export run: which model, which data, which dump layout.

    ``model`` is either a TorchScript archive path or ``torchvision:<name>``
    (constructed without downloaded weights). ``data`` is an ``.npz`` file
    with ``images`` (N x C x H x W) and ``labels`` (N,), or an image folder
    with one subdirectory per class. ``split`` carves the dataset into two
    equal halves by a seeded permutation and exports the chosen half, so a
    calibration/test split replicates exactly.
    """

    model: str
    data: str
    output: str
    mode: str
    passes: int = 100
    batch_size: int = 32
    device: str = "cpu"
    seed: int = 0
    split: str | None = None
    split_seed: int = 0
    image_size: int = 224

    def __post_init__(self):
        if self.mode not in MODES:
            raise ExportError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode == "mc-dropout" and self.passes < 2:
            raise ExportError(
                f"mc-dropout needs at least 2 passes (T >= 2), got T={self.passes}"
            )
        if self.batch_size < 1:
            raise ExportError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.split not in SPLITS:
            raise ExportError(f"split must be one of {SPLITS}, got {self.split!r}")
        if self.image_size < 1:
            raise ExportError(f"image_size must be >= 1, got {self.image_size}")
