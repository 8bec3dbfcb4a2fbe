"""Run configuration, analysis orchestration, and report assembly.

A run is described by one JSON config file:

    {
      "seed": 7,
      "threads": 1,
      "out_dir": "out",
      "analyses": ["retrieval", "clas", "repsim", "entropy", "saliency"],
      "triples": "triples.json",
      "embeddings": {"en": ["en.l0.xeb"], "hi": ["..."], "cm": ["..."]},
      "retrieval": {"num_negatives": 10, "percentile_window": 5.0,
                    "sampler": "percentile", "similarity_layer": null},
      "repsim": {"variance_threshold": 0.99, "k_cap": null},
      "entropy": {"ridge_lambda": 1.0, "cov_epsilon_scale": 1e-6, "pca_dim": null},
      "saliency": {"attributions": "attrs.tsv"},
      "clas": {"accuracies": [54.75, 42.9, 74.87, 33.8, 26.3, 39.05]}
    }

Relative paths resolve against the config file's directory. Outputs are a
structured-text report, a JSON mirror, and one CSV per enabled analysis, all
byte-deterministic for a fixed config and inputs: no timestamps, sorted JSON
keys, repr-formatted floats, and the seed echoed into every file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .embedio import (
    Language,
    LayerEmbeddings,
    RetrievalConfig,
    SamplerKind,
    TripleIndex,
    load_triple_index,
    read_embeddings,
)
from .infotheory import EntropyConfig, uncertainty_reduction
from .repsim import PairedRepresentations, linear_cka, svcca
from .retrieval import Direction, layer_curve
from .saliency import language_saliency, read_attributions
from .scores import ClasBreakdown, PairAccuracies, clas

ANALYSES = ("retrieval", "clas", "repsim", "entropy", "saliency")

DIRECTIONS = (
    Direction(Language.EN, Language.CM),
    Direction(Language.CM, Language.EN),
    Direction(Language.EN, Language.HI),
    Direction(Language.HI, Language.EN),
    Direction(Language.HI, Language.CM),
    Direction(Language.CM, Language.HI),
)

PAIRS = (
    (Language.EN, Language.CM),
    (Language.EN, Language.HI),
    (Language.HI, Language.CM),
)


class AnalysisError(RuntimeError):
    """An enabled analysis failed; partial results were written."""


@dataclass
class RunConfig:
    """Validated run description; see the module docstring for the file form."""

    out_dir: Path
    analyses: tuple
    seed: int = 0
    threads: int = 1
    triples_path: Path | None = None
    embedding_paths: dict = field(default_factory=dict)
    retrieval_cfg: RetrievalConfig = field(default_factory=RetrievalConfig)
    variance_threshold: float = 0.99
    k_cap: int | None = None
    entropy_cfg: EntropyConfig = field(default_factory=EntropyConfig)
    attributions_path: Path | None = None
    literal_accuracies: PairAccuracies | None = None
    echo: dict = field(default_factory=dict)

    def __post_init__(self):
        self.analyses = tuple(self.analyses)
        unknown = set(self.analyses) - set(ANALYSES)
        if unknown:
            raise ValueError(f"unknown analyses: {sorted(unknown)}")
        if not self.analyses:
            raise ValueError("no analyses enabled")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        needs_embeddings = {"retrieval", "repsim", "entropy"} & set(self.analyses)
        if needs_embeddings:
            if self.triples_path is None:
                raise ValueError(f"analyses {sorted(needs_embeddings)} require 'triples'")
            missing = [l for l in Language if l not in self.embedding_paths]
            if missing:
                raise ValueError(
                    f"missing embeddings for languages: {[l.value for l in missing]}"
                )
        if "clas" in self.analyses and "retrieval" not in self.analyses:
            if self.literal_accuracies is None:
                raise ValueError(
                    "clas without retrieval requires literal accuracies in the config"
                )
        if "saliency" in self.analyses and self.attributions_path is None:
            raise ValueError("saliency requires 'saliency.attributions'")
        for path in self._referenced_files():
            if not path.exists():
                raise FileNotFoundError(f"referenced file does not exist: {path}")

    def _referenced_files(self):
        if self.triples_path is not None:
            yield self.triples_path
        for paths in self.embedding_paths.values():
            yield from paths
        if self.attributions_path is not None:
            yield self.attributions_path


def load_config(path, out_dir: "str | Path | None" = None) -> RunConfig:
    """Parse and validate a JSON run config; ``out_dir`` overrides the file's."""
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    base = path.parent

    def resolve(p):
        return (base / p).expanduser()

    retrieval_raw = dict(raw.get("retrieval", {}))
    sampler = SamplerKind(retrieval_raw.pop("sampler", "percentile"))
    retrieval_cfg = RetrievalConfig(
        num_negatives=int(retrieval_raw.pop("num_negatives", 10)),
        percentile_window=float(retrieval_raw.pop("percentile_window", 5.0)),
        sampler=sampler,
        seed=int(raw.get("seed", 0)),
        similarity_layer=retrieval_raw.pop("similarity_layer", None),
    )
    if retrieval_raw:
        raise ValueError(f"unknown retrieval options: {sorted(retrieval_raw)}")

    entropy_raw = dict(raw.get("entropy", {}))
    entropy_cfg = EntropyConfig(
        ridge_lambda=float(entropy_raw.pop("ridge_lambda", 1.0)),
        cov_epsilon_scale=float(entropy_raw.pop("cov_epsilon_scale", 1e-6)),
        pca_dim=entropy_raw.pop("pca_dim", None),
    )
    if entropy_raw:
        raise ValueError(f"unknown entropy options: {sorted(entropy_raw)}")

    repsim_raw = dict(raw.get("repsim", {}))
    variance_threshold = float(repsim_raw.pop("variance_threshold", 0.99))
    k_cap = repsim_raw.pop("k_cap", None)
    if repsim_raw:
        raise ValueError(f"unknown repsim options: {sorted(repsim_raw)}")

    literal = None
    if "clas" in raw and "accuracies" in raw["clas"]:
        acc = raw["clas"]["accuracies"]
        if len(acc) != 6:
            raise ValueError("clas.accuracies must list exactly 6 values")
        literal = PairAccuracies(*[float(a) for a in acc])

    embedding_paths = {}
    for lang_key, paths in raw.get("embeddings", {}).items():
        embedding_paths[Language.parse(lang_key)] = [resolve(p) for p in paths]

    out = Path(out_dir) if out_dir is not None else resolve(raw.get("out_dir", "out"))
    return RunConfig(
        out_dir=out,
        analyses=tuple(raw.get("analyses", [])),
        seed=int(raw.get("seed", 0)),
        threads=int(raw.get("threads", 1)),
        triples_path=resolve(raw["triples"]) if "triples" in raw else None,
        embedding_paths=embedding_paths,
        retrieval_cfg=retrieval_cfg,
        variance_threshold=variance_threshold,
        k_cap=k_cap,
        entropy_cfg=entropy_cfg,
        attributions_path=(
            resolve(raw["saliency"]["attributions"]) if "saliency" in raw else None
        ),
        literal_accuracies=literal,
        echo=raw,
    )


@dataclass
class AlignmentReport:
    """Everything one run produced, keyed so each number traces back to
    (analysis, layer/direction, seed)."""

    version: str
    seed: int
    config_echo: dict
    retrieval: dict | None = None         # direction -> {curve, last_layer, layer_mean}
    clas_breakdowns: dict | None = None   # source label -> ClasBreakdown
    repsim: dict | None = None            # pair -> [(layer, cka, svcca)]
    delta_h: dict | None = None           # layer -> {en, hi, joint}
    saliency: dict | None = None          # language value -> mean RI

    def to_json_dict(self) -> dict:
        out = {
            "version": self.version,
            "seed": self.seed,
            "config": self.config_echo,
            "analyses": {},
        }
        if self.retrieval is not None:
            out["analyses"]["retrieval"] = {
                d: {
                    "curve": [[layer, acc] for layer, acc in r["curve"]],
                    "last_layer": r["last_layer"],
                    "layer_mean": r["layer_mean"],
                }
                for d, r in self.retrieval.items()
            }
        if self.clas_breakdowns is not None:
            out["analyses"]["clas"] = {
                label: {
                    "mean_acc": b.mean_acc,
                    "dir_bias": b.dir_bias,
                    "setup_std": b.setup_std,
                    "clas": b.clas,
                }
                for label, b in self.clas_breakdowns.items()
            }
        if self.repsim is not None:
            out["analyses"]["repsim"] = {
                pair: [[layer, cka, sv] for layer, cka, sv in rows]
                for pair, rows in self.repsim.items()
            }
        if self.delta_h is not None:
            out["analyses"]["entropy"] = {
                str(layer): conds for layer, conds in self.delta_h.items()
            }
        if self.saliency is not None:
            out["analyses"]["saliency"] = dict(self.saliency)
        return out


REPORT_SCHEMA = {
    "required": ("version", "seed", "config", "analyses"),
    "retrieval_keys": ("curve", "last_layer", "layer_mean"),
    "clas_keys": ("mean_acc", "dir_bias", "setup_std", "clas"),
    "entropy_conditions": ("en", "hi", "joint"),
}


def validate_report(doc: dict) -> None:
    """Check a report JSON document against the published key schema."""
    for key in REPORT_SCHEMA["required"]:
        if key not in doc:
            raise ValueError(f"report lacks key {key!r}")
    analyses = doc["analyses"]
    for direction_result in analyses.get("retrieval", {}).values():
        for key in REPORT_SCHEMA["retrieval_keys"]:
            if key not in direction_result:
                raise ValueError(f"retrieval entry lacks key {key!r}")
    for breakdown in analyses.get("clas", {}).values():
        for key in REPORT_SCHEMA["clas_keys"]:
            if key not in breakdown:
                raise ValueError(f"clas entry lacks key {key!r}")
    for conds in analyses.get("entropy", {}).values():
        for key in REPORT_SCHEMA["entropy_conditions"]:
            if key not in conds:
                raise ValueError(f"entropy entry lacks condition {key!r}")


def _load_embedding_sets(config: RunConfig) -> dict:
    sets: dict[Language, dict[int, LayerEmbeddings]] = {}
    for lang, paths in config.embedding_paths.items():
        per_layer: dict[int, LayerEmbeddings] = {}
        for p in paths:
            emb = read_embeddings(p)
            if emb.language != lang:
                raise ValueError(
                    f"{p}: manifest says {emb.language.value}, config slot is {lang.value}"
                )
            if emb.layer in per_layer:
                raise ValueError(f"{p}: duplicate layer {emb.layer} for {lang.value}")
            per_layer[emb.layer] = emb
        sets[lang] = per_layer
    layer_sets = {lang: frozenset(v) for lang, v in sets.items()}
    if len(set(layer_sets.values())) > 1:
        raise ValueError("languages expose different layer sets")
    return sets


def _aligned_f64(emb: LayerEmbeddings, index: TripleIndex, lang: Language) -> np.ndarray:
    rows = [emb.row_of(sid) for sid in index.ids(lang)]
    return emb.matrix[rows].astype(np.float64)


def _run_retrieval(config: RunConfig, sets: dict, index: TripleIndex) -> dict:
    result = {}
    for direction in DIRECTIONS:
        curve, mean = layer_curve(
            sets[direction.source],
            sets[direction.target],
            direction,
            config.retrieval_cfg,
            index,
            threads=config.threads,
        )
        result[str(direction)] = {
            "curve": curve,
            "last_layer": curve[-1][1],
            "layer_mean": mean,
        }
    return result


def _run_clas(config: RunConfig, retrieval: dict | None) -> dict:
    out = {}
    if config.literal_accuracies is not None:
        out["literal"] = clas(config.literal_accuracies)
    if retrieval is not None:
        acc = PairAccuracies(
            *[100.0 * retrieval[str(d)]["last_layer"] for d in DIRECTIONS]
        )
        out["retrieval-last-layer"] = clas(acc)
    if not out:
        raise AnalysisError("clas enabled but no accuracy source available")
    return out


def _run_repsim(config: RunConfig, sets: dict, index: TripleIndex) -> dict:
    out = {}
    layers = sorted(next(iter(sets.values())))
    for lang_a, lang_b in PAIRS:
        rows = []
        for layer in layers:
            pair = PairedRepresentations(
                _aligned_f64(sets[lang_a][layer], index, lang_a),
                _aligned_f64(sets[lang_b][layer], index, lang_b),
            )
            cka = linear_cka(pair)
            rho_mean, _ = svcca(
                pair, variance_threshold=config.variance_threshold, k_cap=config.k_cap
            )
            rows.append((layer, cka, rho_mean))
        out[f"{lang_a.value}-{lang_b.value}"] = rows
    return out


def _run_entropy(config: RunConfig, sets: dict, index: TripleIndex) -> dict:
    def aligned_set(lang):
        return {
            layer: LayerEmbeddings(
                model_id=emb.model_id,
                language=emb.language,
                layer=emb.layer,
                pooling=emb.pooling,
                matrix=_aligned_f64(emb, index, lang),
                sentence_ids=index.ids(lang),
            )
            for layer, emb in sets[lang].items()
        }

    return uncertainty_reduction(
        aligned_set(Language.CM),
        aligned_set(Language.EN),
        aligned_set(Language.HI),
        config.entropy_cfg,
    )


def _run_saliency(config: RunConfig) -> dict:
    records = read_attributions(config.attributions_path)
    means = language_saliency(records)
    return {tag.value: value for tag, value in means.items()}


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_csv(path: Path, seed: int, header: list, rows: list) -> None:
    lines = [f"# seed={seed} toolkit={__version__}", ",".join(header)]
    for row in rows:
        lines.append(",".join(str(c) if not isinstance(c, float) else _fmt(c) for c in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_outputs(report: AlignmentReport, config: RunConfig) -> None:
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    if report.retrieval is not None:
        rows = []
        for direction in DIRECTIONS:
            r = report.retrieval[str(direction)]
            for layer, acc in r["curve"]:
                rows.append([str(direction), layer, acc])
            rows.append([str(direction), "mean", r["layer_mean"]])
        _write_csv(out / "retrieval.csv", config.seed, ["direction", "layer", "accuracy"], rows)
    if report.clas_breakdowns is not None:
        rows = [
            [label, b.mean_acc, b.dir_bias, b.setup_std, b.clas]
            for label, b in report.clas_breakdowns.items()
        ]
        _write_csv(
            out / "clas.csv", config.seed,
            ["source", "mean_acc", "dir_bias", "setup_std", "clas"], rows,
        )
    if report.repsim is not None:
        rows = []
        for pair, pair_rows in report.repsim.items():
            for layer, cka, sv in pair_rows:
                rows.append([pair, layer, cka, sv])
        _write_csv(out / "repsim.csv", config.seed, ["pair", "layer", "cka", "svcca"], rows)
    if report.delta_h is not None:
        rows = []
        for layer in sorted(report.delta_h):
            for condition in ("en", "hi", "joint"):
                rows.append([layer, condition, report.delta_h[layer][condition]])
        _write_csv(out / "entropy.csv", config.seed, ["layer", "condition", "delta_h"], rows)
    if report.saliency is not None:
        rows = [[lang, value] for lang, value in sorted(report.saliency.items())]
        _write_csv(out / "saliency.csv", config.seed, ["language", "mean_ri"], rows)
    doc = report.to_json_dict()
    (out / "report.json").write_text(
        json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    (out / "report.txt").write_text(render_text(report), encoding="utf-8")


def render_text(report: AlignmentReport, partial_error: str | None = None) -> str:
    lines = [
        "alignment report",
        "================",
        f"toolkit version: {report.version}",
        f"seed: {report.seed}",
        "",
        "config",
        "------",
        json.dumps(report.config_echo, indent=2, sort_keys=True),
        "",
    ]
    if partial_error is not None:
        lines += ["PARTIAL RESULTS", "---------------", partial_error, ""]
    if report.retrieval is not None:
        lines += ["retrieval", "---------"]
        for direction in DIRECTIONS:
            r = report.retrieval[str(direction)]
            lines.append(
                f"{direction}: last-layer {_fmt(r['last_layer'])}, "
                f"layer-mean {_fmt(r['layer_mean'])}"
            )
        lines.append("")
    if report.clas_breakdowns is not None:
        lines += ["clas", "----"]
        for label, b in report.clas_breakdowns.items():
            lines.append(
                f"{label}: mean_acc {_fmt(b.mean_acc)} dir_bias {_fmt(b.dir_bias)} "
                f"setup_std {_fmt(b.setup_std)} clas {_fmt(b.clas)}"
            )
        lines.append("")
    if report.repsim is not None:
        lines += ["representation similarity", "-------------------------"]
        for pair, rows in report.repsim.items():
            for layer, cka, sv in rows:
                lines.append(f"{pair} layer {layer}: cka {_fmt(cka)} svcca {_fmt(sv)}")
        lines.append("")
    if report.delta_h is not None:
        lines += ["uncertainty reduction", "---------------------"]
        for layer in sorted(report.delta_h):
            conds = report.delta_h[layer]
            lines.append(
                f"layer {layer}: dh_en {_fmt(conds['en'])} dh_hi {_fmt(conds['hi'])} "
                f"dh_joint {_fmt(conds['joint'])}"
            )
        lines.append("")
    if report.saliency is not None:
        lines += ["saliency", "--------"]
        for lang, value in sorted(report.saliency.items()):
            lines.append(f"{lang}: mean RI {_fmt(value)}")
        lines.append("")
    return "\n".join(lines)


def run(config: RunConfig) -> AlignmentReport:
    """Execute the enabled analyses in dependency order and write all outputs.

    On a sub-analysis failure, whatever completed is still written together
    with a PARTIAL RESULTS marker, then AnalysisError propagates so callers
    can exit nonzero.
    """
    report = AlignmentReport(
        version=__version__, seed=config.seed, config_echo=config.echo
    )
    enabled = set(config.analyses)
    sets = index = None
    current = "setup"
    try:
        if {"retrieval", "repsim", "entropy"} & enabled:
            sets = _load_embedding_sets(config)
            index = load_triple_index(config.triples_path)
        if "retrieval" in enabled:
            current = "retrieval"
            report.retrieval = _run_retrieval(config, sets, index)
        if "clas" in enabled:
            current = "clas"
            report.clas_breakdowns = _run_clas(config, report.retrieval)
        if "repsim" in enabled:
            current = "repsim"
            report.repsim = _run_repsim(config, sets, index)
        if "entropy" in enabled:
            current = "entropy"
            report.delta_h = _run_entropy(config, sets, index)
        if "saliency" in enabled:
            current = "saliency"
            report.saliency = _run_saliency(config)
    except Exception as exc:
        config.out_dir.mkdir(parents=True, exist_ok=True)
        marker = f"analysis {current!r} failed: {exc}"
        (config.out_dir / "report.txt").write_text(
            render_text(report, partial_error=marker), encoding="utf-8"
        )
        raise AnalysisError(marker) from exc
    _write_outputs(report, config)
    return report


def emit_tsne_input(embeddings, sample_size: int, seed: int, path) -> None:
    """Deterministically subsample rows from each language's embeddings and
    write one CSV of (language, sentence_id, x0..x{d-1}) rows for external
    projection tools."""
    embeddings = list(embeddings)
    if not embeddings:
        raise ValueError("no embedding sets given")
    dims = {emb.dim for emb in embeddings}
    if len(dims) != 1:
        raise ValueError("embedding sets must share one dimension")
    if sample_size < 1:
        raise ValueError("sample_size must be >= 1")
    rng = np.random.default_rng(seed)
    d = dims.pop()
    lines = [f"# seed={seed} toolkit={__version__}"]
    lines.append(",".join(["language", "sentence_id"] + [f"x{j}" for j in range(d)]))
    for emb in embeddings:
        if sample_size > emb.n:
            raise ValueError(
                f"sample_size {sample_size} exceeds n={emb.n} for {emb.language.value}"
            )
        chosen = np.sort(rng.choice(emb.n, size=sample_size, replace=False))
        for i in chosen:
            coords = [_fmt(v) for v in emb.matrix[i].astype(np.float64)]
            lines.append(",".join([emb.language.value, emb.sentence_ids[i]] + coords))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
