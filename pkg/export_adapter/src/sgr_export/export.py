"""Run a model over a dataset and write selectrisk record files atomically."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import torch
import torch.nn.functional as F

from .datasets import iter_batches, load_source, split_indices
from .jobs import ExportError, ExportJob
from .models import enable_last_dropout, load_model


def _forward_probs(model, images: torch.Tensor) -> torch.Tensor:
    logits = model(images)
    if logits.ndim != 2 or logits.shape[1] < 2:
        raise ExportError(
            f"model output must be (batch, C >= 2) class scores, got {tuple(logits.shape)}"
        )
    return F.softmax(logits, dim=1)


def _header(job: ExportJob, count: int) -> str:
    parts = [
        f"mode={job.mode}",
        "responses=post-softmax",
        f"model={job.model}",
        f"records={count}",
    ]
    if job.mode == "mc-dropout":
        parts.append(f"passes={job.passes}")
        parts.append(f"seed={job.seed}")
    if job.split:
        parts.append(f"split={job.split}")
        parts.append(f"split_seed={job.split_seed}")
    return "# selectrisk dump: " + " ".join(parts)


def run_export(job: ExportJob) -> int:
    """Export the dataset as prediction or mc-dropout records.

    Records go out in dataset iteration order with stable unique ids, all
    responses post-softmax. The file is written to a temporary sibling and
    renamed into place, so a failed run leaves no partial output. Returns
    the number of records written.
    """
    model = load_model(job.model, job.device)
    source = load_source(job.data, job.image_size)
    indices = split_indices(len(source), job.split, job.split_seed)
    if len(indices) == 0:
        raise ExportError(f"{job.data}: nothing to export after the split")

    if job.mode == "mc-dropout":
        enable_last_dropout(model)
        torch.manual_seed(job.seed)

    out_path = Path(job.output)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(
        prefix=out_path.name + ".", suffix=".tmp", dir=out_path.parent
    )
    count = 0
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(_header(job, len(indices)) + "\n")
            with torch.no_grad():
                for images, labels, ids in iter_batches(source, indices, job.batch_size):
                    images = images.to(job.device)
                    if job.mode == "single-pass":
                        probs = _forward_probs(model, images)
                        for row, label, ident in zip(probs, labels, ids):
                            fh.write(json.dumps(
                                {"scores": row.tolist(), "label": label, "id": ident}
                            ) + "\n")
                            count += 1
                    else:
                        stack = torch.stack(
                            [_forward_probs(model, images) for _ in range(job.passes)]
                        )  # (T, B, C)
                        for b, (label, ident) in enumerate(zip(labels, ids)):
                            fh.write(json.dumps(
                                {"passes": stack[:, b, :].tolist(), "label": label, "id": ident}
                            ) + "\n")
                            count += 1
        os.replace(tmp_name, out_path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise
    return count
