"""Command-line entry point for the export adapter."""

from __future__ import annotations

import argparse
import sys

from .export import run_export
from .jobs import ExportError, ExportJob


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="selectrisk-export",
        description="Export selectrisk prediction dumps from a PyTorch image classifier.",
    )
    parser.add_argument("--model", required=True,
                        help="TorchScript archive path or torchvision:<name>")
    parser.add_argument("--data", required=True,
                        help=".npz (images, labels) or an image folder")
    parser.add_argument("--mode", required=True, choices=["single-pass", "mc-dropout"])
    parser.add_argument("--passes", type=int, default=100,
                        help="forward passes per record in mc-dropout mode (default 100)")
    parser.add_argument("--seed", type=int, default=0,
                        help="RNG seed for the dropout masks")
    parser.add_argument("--batch-size", type=int, default=32)
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--split", choices=["cal", "test"], default=None,
                        help="export one half of a seeded 50/50 split")
    parser.add_argument("--split-seed", type=int, default=0)
    parser.add_argument("--image-size", type=int, default=224,
                        help="resize edge for image-folder datasets (default 224)")
    parser.add_argument("--output", required=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        job = ExportJob(
            model=args.model,
            data=args.data,
            output=args.output,
            mode=args.mode,
            passes=args.passes,
            batch_size=args.batch_size,
            device=args.device,
            seed=args.seed,
            split=args.split,
            split_seed=args.split_seed,
            image_size=args.image_size,
        )
        count = run_export(job)
    except ExportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {count} {args.mode} records to {args.output}")
    return 0


def entrypoint() -> None:
    sys.exit(main())
