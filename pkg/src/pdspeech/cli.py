"""Command-line front door for the pipeline.

Subcommands: ``synth`` (generate a synthetic corpus), ``extract``
(MFCC summary features to CSV), ``rank`` (feature rankings to CSV),
``evaluate`` (leave-one-subject-out run to a JSON report), ``sweep``
(AUC versus feature-subset size).

Every subcommand accepts ``--config FILE``, a JSON object whose keys
are option names (``{"method": "fisher", "m": 40}``).  Values use JSON
types.  Precedence is explicit flag, then config file, then built-in
default.

Exit status is 0 only when the output artifact was fully written.
Failures print one stage-tagged line to stderr and exit 1.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from .corpus import (Group, SyntheticConfig, generate_synthetic_corpus,
                     load_manifest, load_segment)
from .deepnet import TrainConfig
from .dsp import DspConfig, mfcc
from .eval import (PipelineConfig, PipelineError, run_pipeline, run_sweep,
                   write_report, write_roc_csv, write_segment_csv)
from .features import apply_standardizer, build_feature_vector, fit_standardizer
from .selection import METHODS, compute_ranking, write_ranking_csv


def _init_threads():
    # best effort: BLAS pools read OMP_NUM_THREADS lazily, so setting it
    # here covers pools that have not spun up yet
    n = os.environ.get("PDSPEECH_THREADS")
    if n and not os.environ.get("OMP_NUM_THREADS"):
        os.environ["OMP_NUM_THREADS"] = n


def _gamma_value(text):
    """RBF width flag: the literal 'scale' or a positive float."""
    if text == "scale":
        return text
    return float(text)


def parse_m_values(spec) -> list[int]:
    """Parse a subset-size spec into a list of ints.

    Accepts a single count ('40'), a comma list ('5,10,20'), or an
    inclusive range 'lo:hi' with an optional ':step'.  A JSON config
    may supply an int or a list directly.
    """
    if isinstance(spec, int):
        return [spec]
    if isinstance(spec, (list, tuple)):
        return [int(v) for v in spec]
    values = []
    for part in str(spec).split(","):
        part = part.strip()
        if ":" in part:
            pieces = part.split(":")
            if len(pieces) not in (2, 3) or not all(pieces):
                raise ValueError(f"bad m range {part!r}")
            nums = [int(p) for p in pieces]
            step = nums[2] if len(nums) == 3 else 1
            if step < 1:
                raise ValueError(f"m range step must be positive: {part!r}")
            if nums[1] < nums[0]:
                raise ValueError(f"empty m range {part!r}")
            values.extend(range(nums[0], nums[1] + 1, step))
        elif part:
            values.append(int(part))
        else:
            raise ValueError(f"empty item in m spec {spec!r}")
    if not values:
        raise ValueError("m spec is empty")
    return values


def _require(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise PipelineError(
                args.command, f"--{name} is required (flag or config file)")


def _filtered_entries(manifest, task):
    entries = [e for e in manifest.entries
               if task is None or e.task.value == task]
    if not entries:
        raise ValueError(f"no segments left after task filter {task}")
    return entries


def _train_config(args):
    return TrainConfig(
        learning_rate=getattr(args, "learning_rate", 1e-3),
        batch_size=getattr(args, "batch_size", 64),
        max_epochs=getattr(args, "epochs", 100),
        val_fraction=getattr(args, "val_fraction", 0.2),
        seed=args.seed,
    )


def _pipeline_config(args, branch, m):
    return PipelineConfig(
        manifest=args.manifest,
        task=args.task,
        branch=branch,
        method=args.method,
        m=m,
        classifier=args.classifier,
        kernel=args.kernel,
        C=args.C,
        gamma=args.gamma,
        degree=args.degree,
        k=args.k,
        n_trees=args.n_trees,
        grid=args.grid,
        trim=getattr(args, "trim", 0.3),
        train=_train_config(args),
        seed=args.seed,
    )


def _cmd_synth(args):
    _require(args, "out")
    cfg = SyntheticConfig(subjects_per_group=args.subjects,
                          segments_per_subject=args.segments,
                          duration_sec=args.duration,
                          separation=args.separation,
                          seed=args.seed)
    manifest = generate_synthetic_corpus(cfg, args.out)
    print(f"wrote {len(manifest.entries)} segments to "
          f"{Path(args.out) / 'manifest.csv'}")


def _cmd_extract(args):
    _require(args, "manifest", "out")
    manifest = load_manifest(args.manifest)
    entries = _filtered_entries(manifest, args.task)
    dsp = DspConfig(window_len=args.window_len, hop=args.hop)

    rows = []
    for i, e in enumerate(entries):
        seg = load_segment(manifest, e)
        vec = build_feature_vector(mfcc(seg.samples, seg.sample_rate, dsp))
        rows.append((i, e, vec))

    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["segment", "subject", "task", "label"]
                   + [f"f{j:03d}" for j in range(len(rows[0][2]))])
        for i, e, vec in rows:
            w.writerow([i, e.subject, e.task.value,
                        int(e.group is Group.PD)]
                       + [repr(float(v)) for v in vec])
    print(f"wrote {len(rows)} feature rows to {args.out}")


def _cmd_rank(args):
    _require(args, "manifest", "out")
    manifest = load_manifest(args.manifest)
    manifest.require_both_groups()
    entries = _filtered_entries(manifest, args.task)

    X = np.array([build_feature_vector(
        mfcc(s.samples, s.sample_rate))
        for s in (load_segment(manifest, e) for e in entries)])
    y = np.array([1 if e.group is Group.PD else 0 for e in entries])
    Xs = apply_standardizer(fit_standardizer(X), X)
    ranking = compute_ranking(Xs, y, args.method)

    write_ranking_csv(ranking, args.out)
    print(f"wrote {args.method} ranking to {args.out}")


def _cmd_evaluate(args):
    _require(args, "manifest", "out")
    report = run_pipeline(_pipeline_config(args, args.branch, args.m))

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_report(report, out / "report.json")
    for name, block in report["branches"].items():
        write_segment_csv(block["per_segment"], out / f"segments_{name}.csv")
        write_roc_csv(block["roc"], out / f"roc_{name}.csv")
        print(f"{name}: accuracy={block['accuracy']:.3f} "
              f"auc={block['auc']:.3f}")
    print(f"report: {out / 'report.json'}")


def _cmd_sweep(args):
    _require(args, "manifest", "out")
    m_values = parse_m_values(args.m)
    # config.m is unused by the sweep itself; each point sets its own size
    report = run_sweep(_pipeline_config(args, "classical", max(m_values)),
                       m_values)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_report(report, out / "report.json")
    s = report["sweep"]
    print(f"best m={s['best_m']} auc={s['best_auc']:.3f} "
          f"over {len(s['points'])} sizes")
    print(f"report: {out / 'report.json'}")


_HANDLERS = {
    "synth": _cmd_synth,
    "extract": _cmd_extract,
    "rank": _cmd_rank,
    "evaluate": _cmd_evaluate,
    "sweep": _cmd_sweep,
}


def _add_corpus_flags(p):
    p.add_argument("--manifest", metavar="FILE", help="corpus manifest CSV")
    p.add_argument("--task", type=int, choices=(1, 2, 3), default=None,
                   help="restrict to one speech task")


def _add_classifier_flags(p):
    p.add_argument("--classifier", choices=("svm", "knn", "forest"),
                   default="svm", help="segment classifier")
    p.add_argument("--kernel", choices=("linear", "poly", "rbf"),
                   default="rbf", help="SVM kernel")
    p.add_argument("--C", type=float, default=4.0, help="SVM box constraint")
    p.add_argument("--gamma", type=_gamma_value, default="scale",
                   help="RBF width, or 'scale'")
    p.add_argument("--degree", type=int, default=3,
                   help="polynomial kernel degree")
    p.add_argument("--k", type=int, default=5, help="kNN neighbour count")
    p.add_argument("--n-trees", type=int, default=100,
                   help="random forest size")
    p.add_argument("--grid", action="store_true",
                   help="grid-search hyperparameters inside each fold")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="pdspeech",
        description="Speech-based PD/HC classification pipeline.")
    sub = parser.add_subparsers(dest="command", required=True,
                                metavar="command")

    def command(name, help_text):
        p = sub.add_parser(
            name, help=help_text, description=help_text,
            formatter_class=argparse.ArgumentDefaultsHelpFormatter)
        p.add_argument("--config", metavar="FILE",
                       help="JSON file of option values; flags override it")
        return p

    p = command("synth", "generate a synthetic PD/HC corpus")
    p.add_argument("--subjects", type=int, default=10,
                   help="subjects per group")
    p.add_argument("--segments", type=int, default=8,
                   help="segments per subject")
    p.add_argument("--duration", type=float, default=1.0,
                   help="segment length in seconds")
    p.add_argument("--separation", type=float, default=1.0,
                   help="group separation in [0, 1]")
    p.add_argument("--seed", type=int, default=0, help="generator seed")
    p.add_argument("--out", metavar="DIR", help="output corpus directory")

    p = command("extract", "write MFCC summary features to CSV")
    _add_corpus_flags(p)
    p.add_argument("--window-len", type=int, default=2048,
                   help="analysis window length in samples")
    p.add_argument("--hop", type=int, default=512,
                   help="hop between frames in samples")
    p.add_argument("--out", metavar="FILE", help="output CSV path")

    p = command("rank", "rank features on the full corpus")
    _add_corpus_flags(p)
    p.add_argument("--method", choices=METHODS, default="ls_l21",
                   help="ranking method")
    p.add_argument("--out", metavar="FILE", help="output CSV path")

    p = command("evaluate",
                "run leave-one-subject-out evaluation and write a report")
    _add_corpus_flags(p)
    p.add_argument("--branch", choices=("classical", "cnn", "both"),
                   default="classical", help="pipeline branch")
    p.add_argument("--method", choices=METHODS, default="ls_l21",
                   help="ranking method")
    p.add_argument("--m", type=int, default=100,
                   help="number of top-ranked features")
    _add_classifier_flags(p)
    p.add_argument("--trim", type=float, default=0.3,
                   help="trim fraction for window-score aggregation")
    p.add_argument("--learning-rate", type=float, default=1e-3,
                   help="CNN optimizer step size")
    p.add_argument("--batch-size", type=int, default=64,
                   help="CNN minibatch size")
    p.add_argument("--epochs", type=int, default=100,
                   help="CNN epoch cap")
    p.add_argument("--val-fraction", type=float, default=0.2,
                   help="fraction of training segments held out")
    p.add_argument("--seed", type=int, default=0, help="run seed")
    p.add_argument("--out", metavar="DIR", help="output report directory")

    p = command("sweep", "evaluate AUC at several feature-subset sizes")
    _add_corpus_flags(p)
    p.add_argument("--method", choices=METHODS, default="ls_l21",
                   help="ranking method")
    p.add_argument("--m", default="20:480:20",
                   help="sizes: '40', '5,10,20', or lo:hi[:step] inclusive")
    _add_classifier_flags(p)
    p.add_argument("--seed", type=int, default=0, help="run seed")
    p.add_argument("--out", metavar="DIR", help="output report directory")

    return parser, sub


def _reparse_with_config(parser, sub, args, argv):
    path = Path(args.config)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise PipelineError("config", str(exc)) from exc
    try:
        values = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PipelineError("config", f"{path}: {exc}") from exc
    if not isinstance(values, dict):
        raise PipelineError("config", f"{path}: expected a JSON object")

    known = set(vars(args)) - {"command", "config"}
    for key in values:
        if key not in known:
            raise PipelineError(
                "config", f"{path}: unknown key {key!r} for {args.command}")

    # file values become the subcommand's defaults, so flags given on
    # the command line still win on the second parse
    sub.choices[args.command].set_defaults(**values)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    _init_threads()
    parser, sub = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.config:
            args = _reparse_with_config(parser, sub, args, argv)
        _HANDLERS[args.command](args)
    except PipelineError as exc:
        print(f"error {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error [{args.command}] {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
