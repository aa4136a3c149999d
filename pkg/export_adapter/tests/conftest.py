import numpy as np
import pytest
import torch
import torch.nn as nn

NUM_CLASSES = 4


class TinyClassifier(nn.Module):
    """Small conv net with dropout in the classifier head."""

    def __init__(self, num_classes: int = NUM_CLASSES):
        super().__init__()
        self.features = nn.Sequential(
            nn.Conv2d(3, 8, kernel_size=3, padding=1),
            nn.ReLU(),
            nn.AdaptiveAvgPool2d(2),
        )
        self.classifier = nn.Sequential(
            nn.Flatten(),
            nn.Linear(8 * 2 * 2, 16),
            nn.ReLU(),
            nn.Dropout(p=0.5),
            nn.Linear(16, num_classes),
        )

    def forward(self, x):
        return self.classifier(self.features(x))


class NoDropoutClassifier(nn.Module):
    def __init__(self, num_classes: int = NUM_CLASSES):
        super().__init__()
        self.pool = nn.AdaptiveAvgPool2d(2)
        self.head = nn.Sequential(nn.Flatten(), nn.Linear(3 * 2 * 2, num_classes))

    def forward(self, x):
        return self.head(self.pool(x))


@pytest.fixture(scope="session")
def model_path(tmp_path_factory):
    torch.manual_seed(7)
    model = TinyClassifier().eval()
    path = tmp_path_factory.mktemp("models") / "tiny.pt"
    torch.jit.script(model).save(str(path))
    return str(path)


@pytest.fixture(scope="session")
def plain_model_path(tmp_path_factory):
    torch.manual_seed(8)
    model = NoDropoutClassifier().eval()
    path = tmp_path_factory.mktemp("models") / "plain.pt"
    torch.jit.script(model).save(str(path))
    return str(path)


@pytest.fixture(scope="session")
def npz_path(tmp_path_factory):
    rng = np.random.default_rng(11)
    images = rng.normal(size=(10, 3, 16, 16)).astype(np.float32)
    labels = rng.integers(0, NUM_CLASSES, size=10).astype(np.int64)
    path = tmp_path_factory.mktemp("data") / "fixture.npz"
    np.savez(path, images=images, labels=labels)
    return str(path)
