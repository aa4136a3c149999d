"""Dataset loading: .npz tensors or class-per-subdirectory image folders."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import torch

from .jobs import ExportError


class TensorSource:
    """Images already tensorized in an .npz (images: N x C x H x W, labels: N)."""

    def __init__(self, path: Path):
        try:
            archive = np.load(path)
            images = np.asarray(archive["images"], dtype=np.float32)
            labels = np.asarray(archive["labels"], dtype=np.int64)
        except Exception as exc:
            raise ExportError(f"cannot read npz dataset {path}: {exc}") from exc
        if images.ndim != 4 or labels.ndim != 1 or images.shape[0] != labels.shape[0]:
            raise ExportError(
                f"{path}: expected images (N, C, H, W) and labels (N,), got "
                f"{images.shape} and {labels.shape}"
            )
        if images.shape[0] == 0:
            raise ExportError(f"{path}: dataset is empty")
        self.images = torch.from_numpy(images)
        self.labels = labels
        width = max(5, len(str(len(labels) - 1)))
        self.ids = [f"rec-{i:0{width}d}" for i in range(len(labels))]

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    def get(self, i: int):
        return self.images[i], int(self.labels[i]), self.ids[i]


class FolderSource:
    """torchvision ImageFolder layout; images resized and scaled to [0, 1]."""

    def __init__(self, path: Path, image_size: int):
        from torchvision import transforms
        from torchvision.datasets import ImageFolder

        transform = transforms.Compose(
            [transforms.Resize((image_size, image_size)), transforms.ToTensor()]
        )
        try:
            self.folder = ImageFolder(str(path), transform=transform)
        except Exception as exc:
            raise ExportError(f"cannot read image folder {path}: {exc}") from exc
        if len(self.folder) == 0:
            raise ExportError(f"{path}: image folder is empty")
        root = Path(self.folder.root)
        self.ids = [
            Path(sample_path).relative_to(root).as_posix()
            for sample_path, _ in self.folder.samples
        ]

    def __len__(self) -> int:
        return len(self.folder)

    def get(self, i: int):
        image, label = self.folder[i]
        return image, int(label), self.ids[i]


def load_source(path: str, image_size: int):
    p = Path(path)
    if p.is_dir():
        return FolderSource(p, image_size)
    if p.suffix.lower() == ".npz":
        return TensorSource(p)
    raise ExportError(f"{path}: expected an .npz file or an image folder")


def split_indices(n: int, split: str | None, split_seed: int) -> np.ndarray:
    """Record indices to export, in dataset order.

    With a split, a PCG64(split_seed) permutation carves the dataset into
    two halves: 'cal' takes the first n // 2 permuted indices, 'test' the
    rest, so the two halves partition the data and replicate exactly.
    """
    if split is None:
        return np.arange(n)
    perm = np.random.Generator(np.random.PCG64(split_seed)).permutation(n)
    half = n // 2
    chosen = perm[:half] if split == "cal" else perm[half:]
    return np.sort(chosen)


def iter_batches(source, indices: np.ndarray, batch_size: int):
    """Yield (stacked images, labels, ids) batches in index order."""
    for start in range(0, len(indices), batch_size):
        chunk = indices[start : start + batch_size]
        items = [source.get(int(i)) for i in chunk]
        images = torch.stack([im for im, _, _ in items])
        labels = [lab for _, lab, _ in items]
        ids = [ident for _, _, ident in items]
        yield images, labels, ids
