"""Command-line interface.

Subcommands: retrieve, repsim, entropy, saliency, clas, consistency,
align-demo, synth, report, tsne-export. Every command is deterministic for a
fixed seed and input files; outputs never embed timestamps.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .alignloss import optimize_embeddings
from .embedio import (
    Language,
    LayerEmbeddings,
    RetrievalConfig,
    SamplerKind,
    load_triple_index,
    read_embeddings,
    write_embeddings,
    write_triple_index,
)
from .infotheory import EntropyConfig, uncertainty_reduction
from .repsim import PairedRepresentations, linear_cka, svcca
from .retrieval import Direction, layer_curve
from .report import AnalysisError, emit_tsne_input, load_config, run
from .saliency import language_saliency, read_attributions
from .scores import PairAccuracies, clas, consistency
from .synthgen import PlantedModel, generate


def _common(parser: argparse.ArgumentParser, out_required: bool = True) -> None:
    parser.add_argument("--seed", type=int, default=0, help="run seed (default 0)")
    parser.add_argument("--out", required=out_required, help="output path")
    parser.add_argument("--threads", type=int, default=1, help="worker threads")


def _add_embedding_inputs(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--triples", required=True, help="triple manifest JSON aligning EN/HI/CM ids"
    )
    parser.add_argument(
        "--emb", nargs="+", required=True, metavar="XEB",
        help="XEB1 embedding files; language and layer come from their manifests",
    )


def _load_sets(paths) -> dict:
    sets: dict[Language, dict[int, LayerEmbeddings]] = {lang: {} for lang in Language}
    for p in paths:
        emb = read_embeddings(p)
        if emb.layer in sets[emb.language]:
            raise ValueError(f"{p}: duplicate layer {emb.layer} for {emb.language.value}")
        sets[emb.language][emb.layer] = emb
    return sets


def _select_layers(per_layer: dict, spec: str) -> dict:
    if spec == "all":
        return dict(per_layer)
    chosen = sorted({int(tok) for tok in spec.split(",")})
    missing = [l for l in chosen if l not in per_layer]
    if missing:
        raise ValueError(f"layers not present in inputs: {missing}")
    return {l: per_layer[l] for l in chosen}


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_lines(path: str, lines: list) -> None:
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _cmd_retrieve(args) -> int:
    index = load_triple_index(args.triples)
    sets = _load_sets(args.emb)
    direction = Direction(Language.parse(args.src), Language.parse(args.tgt))
    cfg = RetrievalConfig(
        num_negatives=args.negatives,
        percentile_window=args.window,
        sampler=SamplerKind(args.sampler),
        seed=args.seed,
        similarity_layer=args.similarity_layer,
    )
    src_set = _select_layers(sets[direction.source], args.layer)
    tgt_set = _select_layers(sets[direction.target], args.layer)
    curve, mean = layer_curve(src_set, tgt_set, direction, cfg, index, threads=args.threads)
    doc = {
        "direction": str(direction),
        "seed": args.seed,
        "curve": [[layer, acc] for layer, acc in curve],
        "last_layer": curve[-1][1],
        "layer_mean": mean,
    }
    _write_lines(args.out, [json.dumps(doc, indent=2, sort_keys=True)])
    if args.dump_queries:
        from .retrieval import directional_accuracy

        last = curve[-1][0]
        sim_emb = None
        if cfg.sampler is SamplerKind.SIM_WEIGHTED:
            sim_layer = cfg.similarity_layer if cfg.similarity_layer is not None else last
            sim_emb = tgt_set[sim_layer]
        _, outcomes = directional_accuracy(
            src_set[last], tgt_set[last], direction, cfg, index,
            sim_emb=sim_emb, threads=args.threads,
        )
        lines = [f"# seed={args.seed} layer={last}",
                 "query_id,success,positive_score,max_negative_score"]
        for o in outcomes:
            lines.append(
                f"{o.query_id},{int(o.success)},{_fmt(o.scores[0])},{_fmt(max(o.scores[1:]))}"
            )
        _write_lines(args.dump_queries, lines)
    print(f"{direction}: layer-mean accuracy {_fmt(mean)}")
    return 0


def _cmd_repsim(args) -> int:
    index = load_triple_index(args.triples)
    sets = _load_sets(args.emb)
    lang_a, lang_b = (Language.parse(tok) for tok in args.pair.split(":"))
    set_a = _select_layers(sets[lang_a], args.layers)
    set_b = _select_layers(sets[lang_b], args.layers)
    if set(set_a) != set(set_b):
        raise ValueError("pair languages expose different layer sets")
    lines = [f"# seed={args.seed} metric={args.metric} pair={args.pair}", "layer,value"]
    for layer in sorted(set_a):
        rows_a = [set_a[layer].row_of(s) for s in index.ids(lang_a)]
        rows_b = [set_b[layer].row_of(s) for s in index.ids(lang_b)]
        pair = PairedRepresentations(
            set_a[layer].matrix[rows_a].astype(np.float64),
            set_b[layer].matrix[rows_b].astype(np.float64),
        )
        if args.metric == "cka":
            value = linear_cka(pair)
        else:
            value, _ = svcca(pair)
        lines.append(f"{layer},{_fmt(value)}")
    _write_lines(args.out, lines)
    return 0


def _cmd_entropy(args) -> int:
    index = load_triple_index(args.triples)
    sets = _load_sets(args.emb)
    cfg = EntropyConfig(
        ridge_lambda=args.ridge_lambda,
        cov_epsilon_scale=args.eps_scale,
        pca_dim=args.pca_dim,
    )
    conditions = [tok.strip() for tok in args.condition.split(",") if tok.strip()]
    unknown = set(conditions) - {"en", "hi", "joint"}
    if unknown:
        raise ValueError(f"unknown conditions: {sorted(unknown)}")

    def aligned(lang):
        chosen = _select_layers(sets[lang], args.layers)
        out = {}
        for layer, emb in chosen.items():
            rows = [emb.row_of(s) for s in index.ids(lang)]
            out[layer] = LayerEmbeddings(
                emb.model_id, emb.language, emb.layer, emb.pooling,
                emb.matrix[rows], index.ids(lang),
            )
        return out

    table = uncertainty_reduction(
        aligned(Language.CM), aligned(Language.EN), aligned(Language.HI), cfg
    )
    lines = [f"# seed={args.seed}", "layer,condition,delta_h"]
    for layer in sorted(table):
        for condition in conditions:
            lines.append(f"{layer},{condition},{_fmt(table[layer][condition])}")
    _write_lines(args.out, lines)
    return 0


def _cmd_saliency(args) -> int:
    records = read_attributions(args.infile)
    means = language_saliency(records)
    doc = {tag.value: value for tag, value in means.items()}
    _write_lines(args.out, [json.dumps(doc, indent=2, sort_keys=True)])
    return 0


def _cmd_clas(args) -> int:
    values = [float(tok) for tok in args.acc.split(",")]
    if len(values) != 6:
        raise ValueError("--acc expects 6 comma-separated accuracies")
    breakdown = clas(PairAccuracies(*values))
    print(f"mean_acc  {breakdown.mean_acc:.4f}")
    print(f"dir_bias  {breakdown.dir_bias:.4f}")
    print(f"setup_std {breakdown.setup_std:.4f}")
    print(f"clas      {breakdown.clas:.4f}")
    if args.out:
        doc = {
            "mean_acc": breakdown.mean_acc,
            "dir_bias": breakdown.dir_bias,
            "setup_std": breakdown.setup_std,
            "clas": breakdown.clas,
        }
        _write_lines(args.out, [json.dumps(doc, indent=2, sort_keys=True)])
    return 0


def _cmd_consistency(args) -> int:
    values = [float(tok) for tok in args.scores.split(",")]
    if len(values) != 3:
        raise ValueError("--scores expects 3 comma-separated values")
    value = consistency(*values, population=args.population)
    print(f"consistency {value:.4f}")
    if args.out:
        doc = {"consistency": value, "population": bool(args.population)}
        _write_lines(args.out, [json.dumps(doc, indent=2, sort_keys=True)])
    return 0


def _cmd_align_demo(args) -> int:
    fixture = generate(PlantedModel(n=args.n, d=args.dim), seed=args.seed)
    result = optimize_embeddings(
        fixture.index, d=args.dim, steps=args.steps, lr=args.lr, seed=args.seed
    )
    lines = [f"# seed={args.seed} n={args.n} dim={args.dim} lr={_fmt(args.lr)}",
             "step,loss,cos_en_hi,cos_en_cm,cos_hi_cm"]
    for p in result.trajectory:
        lines.append(
            f"{p.step},{_fmt(p.loss)},{_fmt(p.cos_en_hi)},{_fmt(p.cos_en_cm)},{_fmt(p.cos_hi_cm)}"
        )
    _write_lines(args.out, lines)
    final = result.trajectory[-1]
    print(f"final loss {_fmt(final.loss)} mean cosine {_fmt(final.mean_cos)}")
    return 0


def _cmd_synth(args) -> int:
    layers = tuple(int(tok) for tok in args.layers.split(","))
    aligned = tuple(int(tok) for tok in args.aligned.split(",")) if args.aligned else layers
    model = PlantedModel(
        n=args.n, d=args.dim, w_en=args.w_en, w_hi=args.w_hi, sigma=args.sigma,
        layers=layers, aligned_layers=aligned,
    )
    fixture = generate(model, seed=args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_triple_index(fixture.index, out / "triples.json")
    for lang, per_layer in fixture.sets().items():
        for layer, emb in per_layer.items():
            write_embeddings(emb, out / f"{lang.value}.l{layer}.xeb")
    print(f"wrote fixtures for {len(fixture.index)} triples to {out}")
    return 0


def _cmd_report(args) -> int:
    config = load_config(args.config, out_dir=args.out)
    run(config)
    print(f"report written to {config.out_dir}")
    return 0


def _cmd_tsne_export(args) -> int:
    embeddings = [read_embeddings(p) for p in args.emb]
    emit_tsne_input(embeddings, sample_size=args.sample, seed=args.seed, path=args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xlign",
        description="cross-lingual representation alignment toolkit",
    )
    parser.add_argument("--version", action="version", version=f"xlign {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("retrieve", help="directional retrieval accuracy")
    _add_embedding_inputs(p)
    p.add_argument("--src", required=True, choices=["en", "hi", "cm"])
    p.add_argument("--tgt", required=True, choices=["en", "hi", "cm"])
    p.add_argument("--layer", default="all", help="'all' or comma-separated layer ids")
    p.add_argument("--negatives", type=int, default=10)
    p.add_argument("--window", type=float, default=5.0, help="percentile half-window")
    p.add_argument("--sampler", choices=["percentile", "sim_weighted"], default="percentile")
    p.add_argument("--similarity-layer", type=int, default=None)
    p.add_argument("--dump-queries", default=None, help="per-query CSV path")
    _common(p)
    p.set_defaults(fn=_cmd_retrieve)

    p = sub.add_parser("repsim", help="CKA / SVCCA similarity curves")
    _add_embedding_inputs(p)
    p.add_argument("--metric", choices=["cka", "svcca"], required=True)
    p.add_argument("--pair", required=True, help="language pair, e.g. en:hi")
    p.add_argument("--layers", default="all")
    _common(p)
    p.set_defaults(fn=_cmd_repsim)

    p = sub.add_parser("entropy", help="uncertainty reduction curves")
    _add_embedding_inputs(p)
    p.add_argument("--layers", default="all")
    p.add_argument("--condition", default="en,hi,joint")
    p.add_argument("--ridge-lambda", type=float, default=1.0)
    p.add_argument("--eps-scale", type=float, default=1e-6)
    p.add_argument("--pca-dim", type=int, default=None)
    _common(p)
    p.set_defaults(fn=_cmd_entropy)

    p = sub.add_parser("saliency", help="language-wise mean Rank-Inverse saliency")
    p.add_argument("--in", dest="infile", required=True, help="attribution TSV")
    _common(p)
    p.set_defaults(fn=_cmd_saliency)

    p = sub.add_parser("clas", help="CLAS breakdown from six accuracies")
    p.add_argument("--acc", required=True, help="6 comma-separated accuracies in [0,100]")
    _common(p, out_required=False)
    p.set_defaults(fn=_cmd_clas)

    p = sub.add_parser("consistency", help="mean minus std of three scores")
    p.add_argument("--scores", required=True, help="3 comma-separated scores in [0,1]")
    p.add_argument("--population", action="store_true", help="use the n divisor")
    _common(p, out_required=False)
    p.set_defaults(fn=_cmd_consistency)

    p = sub.add_parser("align-demo", help="free-embedding alignment optimizer demo")
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--dim", type=int, default=32)
    p.add_argument("--steps", type=int, default=500)
    p.add_argument("--lr", type=float, default=0.5)
    _common(p)
    p.set_defaults(fn=_cmd_align_demo)

    p = sub.add_parser("synth", help="generate planted synthetic fixtures")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--w-en", type=float, default=0.9)
    p.add_argument("--w-hi", type=float, default=0.1)
    p.add_argument("--sigma", type=float, default=0.1)
    p.add_argument("--layers", default="0")
    p.add_argument("--aligned", default=None)
    _common(p)
    p.set_defaults(fn=_cmd_synth)

    p = sub.add_parser("report", help="run configured analyses and assemble a report")
    p.add_argument("--config", required=True, help="JSON run config")
    _common(p, out_required=False)
    p.set_defaults(fn=_cmd_report)

    p = sub.add_parser("tsne-export", help="subsample embeddings for projection tools")
    p.add_argument("--emb", nargs="+", required=True)
    p.add_argument("--sample", type=int, required=True)
    _common(p)
    p.set_defaults(fn=_cmd_tsne_export)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except AnalysisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, KeyError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
