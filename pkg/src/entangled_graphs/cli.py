"""Command-line surface.

One subcommand per pipeline stage plus ``train``/``eval``/``ablate``
orchestration. Every command exits nonzero on failure and honors the
ENTANGLED_GRAPHS_LOG environment variable (error|warn|info|debug).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .community import louvain, partition_to_json
from .config import ExperimentConfig, load_config
from .encoder import encode, load_encoder
from .entanglement import (entanglement_report, mode_from_name,
                           node_entanglement_approx, node_entanglement_exact,
                           report_to_json)
from .graphs import load_graph, load_timeseries_csv, pearson_graph, save_graph
from .model import GraphBundle, accuracy, classify, heatmap_csv, load_model
from .pipeline import build_dataset, run_pipeline, setup_logging
from .evaluation import evaluate, report_to_json as eval_report_to_json

log = logging.getLogger("entangled_graphs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entangled-graphs",
        description="Spectral node-entanglement graph pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, path_arg=None, path_help=""):
        if path_arg:
            p.add_argument(path_arg, help=path_help)
        p.add_argument("--config", metavar="PATH", default=None,
                       help="key = value config file")
        p.add_argument("--preset", choices=("paper", "desk"), default=None)
        p.add_argument("--seed", metavar="N", type=int, default=None)
        p.add_argument("--out", metavar="DIR", default=".",
                       help="output directory (default: current)")
        p.add_argument("--threshold", metavar="X", type=float, default=None)
        p.add_argument("--gamma", metavar="X", type=float, default=None)
        p.add_argument("--mode", choices=("ground", "isolate", "attach"),
                       default=None)
        p.add_argument("--drop-fraction", metavar="X", type=float, default=None)
        p.add_argument("--ablate", choices=("ne", "fm-attn", "none"),
                       default=None)
        p.add_argument("--workers", metavar="N", type=int, default=None)
        return p

    common(sub.add_parser("ingest", help="time-series CSV -> graph JSON"),
           path_arg="csv", path_help="CSV with an ROI-name header row")
    common(sub.add_parser("synth", help="generate a labeled synthetic dataset"))
    common(sub.add_parser("entangle", help="node-entanglement report for one graph"),
           path_arg="graph", path_help="graph JSON file")
    common(sub.add_parser("metrics", help="centrality CSV for one graph"),
           path_arg="graph", path_help="graph JSON file")
    common(sub.add_parser("modules", help="Louvain partition for one graph"),
           path_arg="graph", path_help="graph JSON file")
    common(sub.add_parser("augment", help="write two augmented views of a graph"),
           path_arg="graph", path_help="graph JSON file")
    common(sub.add_parser("train", help="run the full training pipeline"))
    common(sub.add_parser("eval", help="re-evaluate a finished run directory"),
           path_arg="run_dir", path_help="directory produced by train")
    common(sub.add_parser("heatmap", help="attention heatmaps for a finished run"),
           path_arg="run_dir", path_help="directory produced by train")
    common(sub.add_parser("ablate", help="train full model and both ablations"))
    return parser


def _config_from_args(args) -> ExperimentConfig:
    overrides = {}
    for flag, key in (("seed", "seed"), ("threshold", "threshold"),
                      ("gamma", "gamma"), ("mode", "mode"),
                      ("drop_fraction", "drop_fraction"),
                      ("ablate", "ablate"), ("workers", "workers")):
        value = getattr(args, flag, None)
        if value is not None:
            overrides[key] = value
    return load_config(path=args.config, preset=args.preset, overrides=overrides)


def _mode_from_config(cfg: ExperimentConfig):
    return mode_from_name(cfg.mode, delta=cfg.mode_delta, weight=cfg.mode_weight)


def _cmd_ingest(args) -> int:
    cfg = _config_from_args(args)
    ts = load_timeseries_csv(args.csv)
    g = pearson_graph(ts, cfg.threshold)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    dest = out / (Path(args.csv).stem + ".graph.json")
    save_graph(g, dest)
    print(f"wrote {dest} (n={g.n}, m={g.m}, threshold={cfg.threshold})")
    return 0


def _cmd_synth(args) -> int:
    cfg = _config_from_args(args)
    ds = build_dataset(cfg)
    out = Path(args.out)
    graphs_dir = out / "graphs"
    graphs_dir.mkdir(parents=True, exist_ok=True)
    for i, g in enumerate(ds.graphs):
        save_graph(g, graphs_dir / f"graph_{i:04d}.json")
    (out / "splits.json").write_text(json.dumps(
        {"train": list(ds.train_idx), "val": list(ds.val_idx),
         "test": list(ds.test_idx), "labels": list(ds.labels)},
        indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {len(ds.graphs)} graphs to {graphs_dir} "
          f"(family={cfg.synth_family}, seed={cfg.seed})")
    return 0


def _cmd_entangle(args) -> int:
    cfg = _config_from_args(args)
    g = load_graph(args.graph)
    report = entanglement_report(g, cfg.gamma, _mode_from_config(cfg))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    dest = out / (Path(args.graph).stem + ".entanglement.json")
    dest.write_text(json.dumps(report_to_json(report), indent=2, sort_keys=True)
                    + "\n", encoding="utf-8")
    rho = report.rank_correlation
    print(f"wrote {dest} (gamma={cfg.gamma}, mode={cfg.mode}, "
          f"spearman={rho:.4f}{' ties' if report.ties else ''})")
    return 0


def _cmd_metrics(args) -> int:
    cfg = _config_from_args(args)
    from .centrality import centrality_csv
    g = load_graph(args.graph)
    mode = _mode_from_config(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    dest = out / (Path(args.graph).stem + ".centrality.csv")
    centrality_csv(g, dest,
                   ne_exact=node_entanglement_exact(g, cfg.gamma, mode),
                   ne_approx=node_entanglement_approx(g, cfg.gamma, mode))
    print(f"wrote {dest}")
    return 0


def _cmd_modules(args) -> int:
    cfg = _config_from_args(args)
    g = load_graph(args.graph)
    p = louvain(g, seed=cfg.seed, resolution=cfg.resolution)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    dest = out / (Path(args.graph).stem + ".partition.json")
    dest.write_text(json.dumps(partition_to_json(p), indent=2, sort_keys=True)
                    + "\n", encoding="utf-8")
    print(f"wrote {dest} (k={p.k}, Q={p.Q:.4f})")
    return 0


def _cmd_augment(args) -> int:
    cfg = _config_from_args(args)
    from .augmentation import make_views
    g = load_graph(args.graph)
    p = louvain(g, seed=cfg.seed, resolution=cfg.resolution)
    pair = make_views(g, p, drop_fraction=cfg.drop_fraction, seed=cfg.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = Path(args.graph).stem
    save_graph(pair.view1, out / f"{stem}.view1.json")
    save_graph(pair.view2, out / f"{stem}.view2.json")
    (out / f"{stem}.dropped.json").write_text(json.dumps(
        {"view1": [list(e) for e in pair.dropped1],
         "view2": [list(e) for e in pair.dropped2]},
        indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {stem}.view1.json / {stem}.view2.json "
          f"(dropped {len(pair.dropped1)} + {len(pair.dropped2)} edges)")
    return 0


def _cmd_train(args) -> int:
    cfg = _config_from_args(args)
    metrics = run_pipeline(cfg, args.out)
    rep = metrics["report"]
    auc = "n/a" if rep["AUC"] is None else f"{rep['AUC']:.4f}"
    print(f"test ACC {metrics['test_accuracy']:.4f}  AUC {auc}  -> {args.out}")
    return 0


def _rebuild_run(run_dir: Path):
    cfg = load_config(path=run_dir / "config.txt")
    ds = build_dataset(cfg)
    params = load_model(run_dir / "model.json")
    if params.config.ablate_fm:
        embeddings = [np.zeros((g.n, cfg.extractor_hidden)) for g in ds.graphs]
    else:
        enc = load_encoder(run_dir / "extractor.json")
        embeddings = [encode(g, enc) for g in ds.graphs]
    mode = _mode_from_config(cfg)
    ne_fn = node_entanglement_exact if cfg.ne_method == "exact" \
        else node_entanglement_approx
    bundles = [GraphBundle(features=g.features, ne=ne_fn(g, cfg.gamma, mode),
                           h=embeddings[i], label=ds.labels[i])
               for i, g in enumerate(ds.graphs)]
    return cfg, ds, params, bundles, embeddings


def _cmd_eval(args) -> int:
    run_dir = Path(args.run_dir)
    cfg, ds, params, bundles, _ = _rebuild_run(run_dir)
    probs = np.array([classify(bundles[i].features, bundles[i].ne,
                               bundles[i].h, params).data[0]
                      for i in ds.test_idx])
    report = evaluate(probs, [ds.labels[i] for i in ds.test_idx],
                      max(ds.labels) + 1)
    obj = {"report": eval_report_to_json(report),
           "test_accuracy": accuracy(params, bundles, ds.test_idx)}
    dest = run_dir / "eval.json"
    dest.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")
    auc = obj["report"]["AUC"]
    print(f"test ACC {obj['test_accuracy']:.4f}  "
          f"AUC {'n/a' if auc is None else f'{auc:.4f}'}  -> {dest}")
    return 0


def _cmd_heatmap(args) -> int:
    run_dir = Path(args.run_dir)
    cfg, ds, params, _, embeddings = _rebuild_run(run_dir)
    if params.config.ablate_fm:
        print("run was trained with plain attention; no module-aware heatmaps",
              file=sys.stderr)
        return 1
    out = Path(args.out) if args.out != "." else run_dir
    out.mkdir(parents=True, exist_ok=True)
    picked = ds.test_idx[:3]
    for rank, gi in enumerate(picked):
        heatmap_csv(embeddings[gi], params, out / f"heatmap_{rank}.csv")
    print(f"wrote {len(picked)} heatmap CSVs to {out}")
    return 0


def _cmd_ablate(args) -> int:
    cfg = _config_from_args(args)
    out = Path(args.out)
    results = {}
    for arm, name in (("none", "full"), ("ne", "no_ne"), ("fm-attn", "no_fm_attn")):
        arm_cfg = load_config(path=args.config, preset=args.preset,
                              overrides={**{k: getattr(cfg, k) for k in
                                            ("seed", "workers")},
                                         "ablate": arm})
        metrics = run_pipeline(arm_cfg, out / name)
        results[name] = {"ACC": metrics["test_accuracy"],
                         "AUC": metrics["report"]["AUC"]}
        print(f"{name}: ACC {metrics['test_accuracy']:.4f}")
    (out / "ablation.json").write_text(
        json.dumps(results, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    full = results["full"]["ACC"]
    worst = max(results["no_ne"]["ACC"], results["no_fm_attn"]["ACC"])
    print(f"full {full:.4f} vs best ablation {worst:.4f} -> ablation.json")
    return 0


_COMMANDS = {"ingest": _cmd_ingest, "synth": _cmd_synth,
             "entangle": _cmd_entangle, "metrics": _cmd_metrics,
             "modules": _cmd_modules, "augment": _cmd_augment,
             "train": _cmd_train, "eval": _cmd_eval,
             "heatmap": _cmd_heatmap, "ablate": _cmd_ablate}


def main(argv=None) -> int:
    setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except Exception as exc:
        log.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
