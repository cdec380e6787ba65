"""Command-line front end.

Subcommands: analyze, cluster, split, eval, report. Flags override values
from an optional JSON config file (--config); the fully resolved config is
echoed into every artifact, and none of the outputs embed timestamps, so
re-running a command with the same inputs yields byte-identical files.

Exit codes: 0 success, 1 internal error, 2 invalid input or parameters.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import traceback
from pathlib import Path

from . import __version__
from .corpus import TaskKind, corpus_stats, load_corpus
from .distribution import (
    ComplexityRange,
    default_complexity_scenarios,
    element_coverage,
    suggest_syntax_scenarios,
)
from .elements import SYNTAX_PRESETS, kind_from_name
from .errors import ValidationError
from .evaluation import (
    aggregate_reports,
    evaluate_scenario,
    load_predictions,
)
from .rng import SplitMix64
from .semantics import ClusterModel, elbow_select, fit_pca, kmeans_fit, load_embeddings
from .splitter import ScenarioSpec, SplitManifest, build_split, emit_training_files


def _add_common(p: argparse.ArgumentParser, corpus: bool = True):
    p.add_argument("--config", help="JSON file with default parameter values")
    if corpus:
        p.add_argument("--corpus", help="line-delimited JSON corpus file")
        p.add_argument("--task", choices=[t.value for t in TaskKind])
        p.add_argument("--basis", choices=["input", "target"],
                       help="override which text side carries the properties")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="codeshift",
        description="Build property-masked splits of code datasets and score predictions",
    )
    parser.add_argument("--version", action="version", version=f"codeshift {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="corpus statistics and scenario suggestions")
    _add_common(p)
    p.add_argument("--coverage", type=float, help="target train coverage (default 0.03)")
    p.add_argument("--tol", type=float, help="coverage tolerance (default 0.01)")
    p.add_argument("--out", help="write the stats JSON here (default stdout)")

    p = sub.add_parser("cluster", help="PCA + k-means over an embeddings file")
    _add_common(p)
    p.add_argument("--embeddings", help="line-delimited {id, vec} file")
    p.add_argument("--pca-dim", type=int, help="PCA target dimension (default 50)")
    p.add_argument("--pca-fit", choices=["all", "train"],
                   help="fit PCA on all embedded samples or train only (default all)")
    p.add_argument("--k", help="cluster count, or 'auto' for elbow search")
    p.add_argument("--k-max", type=int, help="upper K for --k auto")
    p.add_argument("--n-init", type=int, help="k-means restarts, best kept (default 10)")
    p.add_argument("--seed", type=int, help="generator seed (default 0)")
    p.add_argument("--out", help="cluster model JSON path (default cluster_model.json)")

    p = sub.add_parser("split", help="build a property-masked split")
    _add_common(p)
    p.add_argument("--dimension", choices=["complexity", "syntax", "semantics"])
    p.add_argument("--range", help="percentile range lo:hi (complexity)")
    p.add_argument("--elements", help="comma-separated element kinds (syntax)")
    p.add_argument("--clusters", help="comma-separated cluster ids (semantics)")
    p.add_argument("--cluster-model", help="model JSON from the cluster command")
    p.add_argument("--preset", action="store_true",
                   help="run the stock five scenarios of the dimension")
    p.add_argument("--mask-fraction", type=float, help="fraction of candidates to mask (default 1.0)")
    p.add_argument("--seed", type=int, help="mask-selection seed (default 0)")
    p.add_argument("--name", help="scenario name (default derived)")
    p.add_argument("--out", help="output directory (default splits/)")
    p.add_argument("--sizes", help="JSONL {id, size} with externally computed token sizes")
    p.add_argument("--strict-lex", action="store_true",
                   help="error on unlexable basis texts instead of flagging them")
    p.add_argument("--filter-valid", action="store_true",
                   help="also drop property-matching valid samples")

    p = sub.add_parser("eval", help="score a predictions file against a manifest")
    _add_common(p)
    p.add_argument("--manifest", help="manifest JSON from the split command")
    p.add_argument("--predictions", help="line-delimited predictions file")
    p.add_argument("--baseline-predictions",
                   help="same-model predictions trained on the full data")
    p.add_argument("--bins", type=int, help="NLL histogram bins (default 30)")
    p.add_argument("--total-nll", action="store_true",
                   help="use total instead of length-normalized NLL")
    p.add_argument("--per-sample-elements", action="store_true",
                   help="count each element at most once per sample in frequency ratios")
    p.add_argument("--out", help="report JSON path (default report.json)")
    p.add_argument("--csv", help="also write flat metric rows here")

    p = sub.add_parser("report", help="aggregate eval reports across scenarios")
    p.add_argument("--config", help="JSON file with default parameter values")
    p.add_argument("reports", nargs="+", help="report JSON files from eval")
    p.add_argument("--out", help="summary JSON path (default stdout)")
    p.add_argument("--csv", help="flat scenario x metric rows")

    return parser


class _Config:
    """Flag values with config-file fallback; records what was resolved."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.file_values = {}
        if getattr(args, "config", None):
            path = Path(args.config)
            if not path.exists():
                raise ValidationError(f"config file not found: {path}")
            try:
                self.file_values = json.loads(path.read_text(encoding="utf-8"))
            except json.JSONDecodeError as e:
                raise ValidationError(f"{path}: JSON parse error: {e.msg}") from e
            if not isinstance(self.file_values, dict):
                raise ValidationError(f"{path}: config must be a JSON object")
        self.resolved: dict = {"command": args.command, "version": __version__}

    def get(self, key: str, default=None, required: bool = False):
        value = getattr(self.args, key.replace("-", "_"), None)
        if value is None or value is False:
            value = self.file_values.get(key, value)
        if value is None:
            value = default
        if required and value in (None, ""):
            raise ValidationError(f"missing required parameter --{key}")
        self.resolved[key] = value
        return value


def _load_corpus(cfg: _Config):
    path = cfg.get("corpus", required=True)
    task = cfg.get("task", required=True)
    return load_corpus(path, task)


def _write_or_print(text: str, out: str | None):
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, encoding="utf-8")
        print(out)
    else:
        print(text, end="")


def cmd_analyze(cfg: _Config) -> int:
    corpus = _load_corpus(cfg)
    basis = cfg.get("basis")
    coverage_target = cfg.get("coverage", 0.03)
    tol = cfg.get("tol", 0.01)
    stats = corpus_stats(corpus, override=basis)
    suggestions = suggest_syntax_scenarios(corpus, target=coverage_target, tol=tol,
                                           override=basis)
    coverage = element_coverage(corpus, override=basis)
    payload = {
        "format_version": 1,
        "config": dict(sorted(cfg.resolved.items())),
        **stats,
        "suggested_syntax_scenarios": [
            {"kind": k.value, "sample_fraction": coverage.sample_fraction[k]}
            for k in suggestions
        ],
        "default_complexity_scenarios": [
            {"range": str(r), "lo_pct": r.lo_pct, "hi_pct": r.hi_pct, "label": r.label}
            for r in default_complexity_scenarios()
        ],
    }
    _write_or_print(json.dumps(payload, ensure_ascii=False, indent=2) + "\n",
                    cfg.get("out"))
    return 0


def cmd_cluster(cfg: _Config) -> int:
    corpus = _load_corpus(cfg)
    embeddings = load_embeddings(cfg.get("embeddings", required=True), corpus)
    pca_dim = int(cfg.get("pca-dim", 50))
    seed = int(cfg.get("seed", 0))
    k_raw = cfg.get("k", required=True)

    n_init = int(cfg.get("n-init", 10))
    pca_fit_on = cfg.get("pca-fit", "all")
    if pca_fit_on == "train":
        train_ids = [sid for sid in embeddings.ids if corpus[sid].partition == "train"]
        pca = fit_pca(embeddings.rows_for(train_ids), target_dim=pca_dim)
    else:
        pca = fit_pca(embeddings, target_dim=pca_dim)
    reduced = pca.transform(embeddings.vectors)

    curve = None
    if str(k_raw) == "auto":
        k_max = cfg.get("k-max")
        if k_max is None:
            raise ValidationError("--k auto requires --k-max")
        k, curve = elbow_select(reduced, k_max=int(k_max), seed=seed, n_init=n_init)
    else:
        try:
            k = int(k_raw)
        except ValueError:
            raise ValidationError(f"--k must be an integer or 'auto', got {k_raw!r}") from None

    model = kmeans_fit(reduced, k, seed=seed, ids=embeddings.ids, n_init=n_init)
    model.inertia_curve = curve
    out = cfg.get("out", "cluster_model.json")
    config_echo = dict(sorted(cfg.resolved.items()))
    config_echo["pca_cumulative_explained_variance"] = pca.cumulative_explained
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    Path(out).write_text(model.to_json(config=config_echo), encoding="utf-8")
    print(f"{out}: K={model.k} inertia={model.inertia:.6g} "
          f"pca_explained={pca.cumulative_explained:.3f}")
    return 0


def _parse_specs(cfg: _Config, corpus, cluster_model) -> list[ScenarioSpec]:
    dimension = cfg.get("dimension", required=True)
    mask_fraction = float(cfg.get("mask-fraction", 1.0))
    seed = int(cfg.get("seed", 0))
    preset = cfg.get("preset", False)

    if preset:
        if dimension == "complexity":
            return [
                ScenarioSpec("complexity", r, mask_fraction=mask_fraction, seed=seed)
                for r in default_complexity_scenarios()
            ]
        if dimension == "syntax":
            kinds = SYNTAX_PRESETS[corpus.task.value]
            return [
                ScenarioSpec("syntax", {k}, mask_fraction=mask_fraction, seed=seed)
                for k in kinds
            ]
        if cluster_model is None:
            raise ValidationError("semantics preset requires --cluster-model")
        if cluster_model.k < 5:
            raise ValidationError(
                f"semantics preset draws 5 distinct clusters but the model has K={cluster_model.k}"
            )
        rng = SplitMix64(seed)
        chosen = rng.sample_without_replacement(cluster_model.k, 5)
        return [
            ScenarioSpec("semantics", {c}, mask_fraction=mask_fraction, seed=seed)
            for c in chosen
        ]

    name = cfg.get("name", "")
    if dimension == "complexity":
        raw = cfg.get("range", required=True)
        try:
            lo, hi = raw.split(":")
            params: ComplexityRange | set = ComplexityRange(float(lo), float(hi))
        except ValueError as e:
            raise ValidationError(f"--range must look like lo:hi, got {raw!r}") from e
    elif dimension == "syntax":
        raw = cfg.get("elements", required=True)
        try:
            params = {kind_from_name(x.strip()) for x in raw.split(",") if x.strip()}
        except ValueError as e:
            raise ValidationError(str(e)) from e
    else:
        raw = cfg.get("clusters", required=True)
        try:
            params = {int(x) for x in raw.split(",") if x.strip()}
        except ValueError as e:
            raise ValidationError(f"--clusters must be comma-separated integers, got {raw!r}") from e
    return [
        ScenarioSpec(dimension, params, mask_fraction=mask_fraction, seed=seed,
                     name=name, basis=cfg.get("basis"))
    ]


def _load_external_sizes(path: str | None) -> dict[str, int] | None:
    if not path:
        return None
    sizes = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            record = json.loads(line)
            sizes[record["id"]] = int(record["size"])
    return sizes


def cmd_split(cfg: _Config) -> int:
    corpus = _load_corpus(cfg)
    cluster_model = None
    model_path = cfg.get("cluster-model")
    if model_path:
        cluster_model = ClusterModel.from_json(Path(model_path).read_text(encoding="utf-8"))
    specs = _parse_specs(cfg, corpus, cluster_model)
    out_dir = Path(cfg.get("out", "splits"))
    strict = bool(cfg.get("strict-lex", False))
    filter_valid = bool(cfg.get("filter-valid", False))
    external = _load_external_sizes(cfg.get("sizes"))
    config_echo = dict(sorted(cfg.resolved.items()))

    multi = len(specs) > 1
    for spec in specs:
        manifest = build_split(corpus, spec, cluster_model=cluster_model,
                               strict=strict, external_sizes=external)
        # scenario names keep the stable element strings (">=", "||"); the
        # directory name swaps in shell-safe spellings
        dir_name = (spec.name.replace(">=", "ge").replace("||", "or")
                    .replace(":", "-"))
        target = out_dir / dir_name if multi else out_dir
        paths = emit_training_files(manifest, corpus, target, config=config_echo,
                                    filter_valid=filter_valid, cluster_model=cluster_model,
                                    external_sizes=external)
        stats = manifest.stats
        line = (
            f"{paths['manifest']}: train {len(manifest.train_ids)} "
            f"(masked {stats['n_masked']}/{stats['n_candidates']} candidates, "
            f"{stats['rejected_train_fraction']:.2%} of train) "
            f"ood_test {stats['n_ood_test']}"
        )
        if stats.get("vacuous"):
            line += " [warning: no train sample matches the property]"
        print(line)
    return 0


def _write_csv(rows, path: str):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["scenario", "dimension", "metric", "value"])
        for scenario, dimension, metric, value in rows:
            writer.writerow([scenario, dimension, metric,
                             "" if value is None else repr(float(value))])


def cmd_eval(cfg: _Config) -> int:
    corpus = _load_corpus(cfg)
    manifest_path = cfg.get("manifest", required=True)
    manifest = SplitManifest.from_json(Path(manifest_path).read_text(encoding="utf-8"))
    predictions = load_predictions(cfg.get("predictions", required=True))
    baseline_path = cfg.get("baseline-predictions")
    baseline = load_predictions(baseline_path) if baseline_path else None

    report = evaluate_scenario(
        manifest,
        corpus,
        predictions,
        baseline_predictions=baseline,
        bins=int(cfg.get("bins", 30)),
        normalize_nll=not cfg.get("total-nll", False),
        per_sample_elements=bool(cfg.get("per-sample-elements", False)),
    )
    payload = report.to_dict()
    payload["config"] = dict(sorted(cfg.resolved.items()))
    out = cfg.get("out", "report.json")
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    Path(out).write_text(json.dumps(payload, ensure_ascii=False, indent=2) + "\n",
                         encoding="utf-8")
    csv_path = cfg.get("csv")
    if csv_path:
        _write_csv(report.metric_rows(), csv_path)
    rel = f" relative_em={report.relative_em:.4f}" if report.relative_em is not None else ""
    print(f"{out}: n={report.n_evaluated} em={report.em:.4f} bleu={report.bleu:.4f}{rel}")
    return 0


def cmd_report(cfg: _Config) -> int:
    reports = []
    for path in cfg.args.reports:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        reports.append(payload)
    aggregates = aggregate_reports(reports)
    summary = {
        "format_version": 1,
        "config": dict(sorted(cfg.resolved.items())),
        "n_reports": len(reports),
        "aggregates": aggregates,
    }
    _write_or_print(json.dumps(summary, ensure_ascii=False, indent=2) + "\n",
                    cfg.get("out"))
    csv_path = cfg.get("csv")
    if csv_path:
        rows = []
        for r in reports:
            rows.append((r["scenario"], r["dimension"], "em", r["em"]))
            rows.append((r["scenario"], r["dimension"], "bleu", r["bleu"]))
            rows.append((r["scenario"], r["dimension"], "relative_em", r["relative_em"]))
            for kind, info in r.get("per_element_frequency", {}).items():
                rows.append((r["scenario"], r["dimension"],
                             f"element_ratio:{kind}", info["ratio"]))
        _write_csv(rows, csv_path)
    return 0


_COMMANDS = {
    "analyze": cmd_analyze,
    "cluster": cmd_cluster,
    "split": cmd_split,
    "eval": cmd_eval,
    "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _Config(args)
        return _COMMANDS[args.command](cfg)
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (FileNotFoundError, IsADirectoryError, PermissionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
