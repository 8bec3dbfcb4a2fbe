"""Command line entry point: ``xlign-export embeddings | attributions``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .export import ExportJob, export_attributions, export_layer_embeddings
from .ig import CompletenessError


def _add_job_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--model", required=True,
                     help='encoder id: "toy", "toy:<seed>", or a Hugging Face model id')
    sub.add_argument("--corpus", required=True, help="path to the triple corpus JSON")
    sub.add_argument("--max-length", type=int, default=48)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xlign-export",
        description="Export sentence embeddings and token attributions "
                    "in the xlign exchange formats.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    emb = sub.add_parser("embeddings", help="write per-layer pooled XEB1 matrices")
    _add_job_args(emb)
    emb.add_argument("--out", required=True, help="output directory")
    emb.add_argument("--layers", default="all",
                     help='"all" or comma-separated layer-output indices')
    emb.add_argument("--poolings", default="cls,mean",
                     help="comma-separated subset of: cls,mean")
    emb.add_argument("--batch-size", type=int, default=8)

    attr = sub.add_parser("attributions", help="write an integrated-gradients TSV")
    _add_job_args(attr)
    attr.add_argument("--out", required=True, help="output TSV path")
    attr.add_argument("--language", default="cm", choices=("en", "hi", "cm"))
    attr.add_argument("--steps", type=int, default=64)
    attr.add_argument("--tolerance", type=float, default=0.01)

    return parser


def _job(args: argparse.Namespace) -> ExportJob:
    kwargs = dict(
        model_id=args.model,
        corpus_path=Path(args.corpus),
        max_length=args.max_length,
    )
    if args.command == "embeddings":
        layers = None if args.layers == "all" else tuple(
            int(part) for part in args.layers.split(",")
        )
        return ExportJob(
            out_dir=Path(args.out),
            layers=layers,
            poolings=tuple(args.poolings.split(",")),
            batch_size=args.batch_size,
            **kwargs,
        )
    return ExportJob(
        out_dir=Path(args.out).parent,
        ig_steps=args.steps,
        ig_tolerance=args.tolerance,
        attribution_language=args.language,
        **kwargs,
    )


def main(argv: "list[str] | None" = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        job = _job(args)
        if args.command == "embeddings":
            index = export_layer_embeddings(job)
            print(f"wrote {len(index.embedding_paths)} embedding files to {index.out_dir}")
        else:
            path = export_attributions(job, args.out)
            print(f"wrote attributions to {path}")
    except (ValueError, OSError, CompletenessError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
