"""Model loading and dropout control.

TorchScript archives are preferred (no class imports needed at load time);
``torchvision:<name>`` constructs an architecture without weights, which is
mainly useful with a checkpoint pipeline of your own or for smoke tests.

MC-dropout needs stochastic passes with dropout active only in the last
fully connected block, so ``enable_last_dropout`` flips just the final
dropout module (in module-tree order, which matches forward order for the
sequential classifier heads this targets) into training mode while the
rest of the network stays in eval.
"""

from __future__ import annotations

import torch

from .jobs import ExportError

DROPOUT_TYPE_NAMES = {
    "Dropout",
    "Dropout1d",
    "Dropout2d",
    "Dropout3d",
    "AlphaDropout",
    "FeatureAlphaDropout",
}


def load_model(spec: str, device: str = "cpu") -> torch.nn.Module:
    """Load a classifier from a TorchScript path or torchvision:<name>."""
    if spec.startswith("torchvision:"):
        name = spec.split(":", 1)[1]
        try:
            from torchvision.models import get_model

            model = get_model(name, weights=None)
        except Exception as exc:
            raise ExportError(f"cannot construct torchvision model {name!r}: {exc}") from exc
    else:
        try:
            model = torch.jit.load(spec, map_location=device)
        except Exception as exc:
            raise ExportError(f"cannot load TorchScript model {spec!r}: {exc}") from exc
    model = model.to(device)
    model.eval()
    return model


def _type_name(module: torch.nn.Module) -> str:
    # TorchScript wraps submodules; original_name preserves the source class
    return getattr(module, "original_name", type(module).__name__)


def dropout_modules(model: torch.nn.Module) -> list[torch.nn.Module]:
    return [m for m in model.modules() if _type_name(m) in DROPOUT_TYPE_NAMES]


def enable_last_dropout(model: torch.nn.Module) -> torch.nn.Module:
    """Put only the final dropout module into training mode.

    The rest of the model (batch norm in particular) stays in eval, so the
    only stochasticity across passes is that dropout's mask.
    """
    drops = dropout_modules(model)
    if not drops:
        raise ExportError(
            "model has no dropout module; mc-dropout export needs dropout "
            "in the classifier head"
        )
    model.eval()
    drops[-1].train()
    return drops[-1]
