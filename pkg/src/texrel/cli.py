"""Command-line surface: generate, validate, stats, export-ppm,
oracle-eval, metrics.

Exit codes: 0 success, 1 validation or metric failure, 2 usage error,
3 I/O or corrupt file.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import kernels
from .builder import dataset_stats, export_ppm, generate_to_path
from .datafile import DatasetConfig, DatasetFormatError, read_dataset
from .metrics import evaluate_language
from .oracles import build_language_sample, language_by_name, run_referential_eval
from .sampling import SamplingError, SplitKind

EXIT_OK = 0
EXIT_FAILED_CHECK = 1
EXIT_USAGE = 2
EXIT_IO = 3


def _write_report(report: dict, path: str | None) -> None:
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_generate(args) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        cfg = DatasetConfig.from_json_dict(json.load(fh))
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)
    generate_to_path(cfg, args.out, threads=args.threads)
    print(f"wrote {args.out} ({cfg.total_examples} examples, kernels: {kernels.IMPLEMENTATION})")
    return EXIT_OK


def _cmd_validate(args) -> int:
    ds = read_dataset(args.path)
    report = dataset_stats(ds)
    worst = min(s.soundness_rate for s in report.per_split.values())
    for label, s in report.per_split.items():
        print(
            f"{label}: examples {s.examples} soundness {s.soundness_rate:.4f} "
            f"hygiene {s.hygiene_rate:.4f} neutrality {s.neutrality_rate:.4f} "
            f"balance {s.label_balance:.4f}"
        )
    print(f"soundness {worst:.4f}")
    return EXIT_OK if report.clean else EXIT_FAILED_CHECK


def _cmd_stats(args) -> int:
    ds = read_dataset(args.path)
    report = dataset_stats(ds)
    _write_report(report.to_json_dict(), args.report)
    return EXIT_OK


def _cmd_export_ppm(args) -> int:
    ds = read_dataset(args.path)
    files = export_ppm(ds, args.example, args.out)
    print(f"wrote {len(files)} files to {args.out}")
    return EXIT_OK


def _cmd_oracle_eval(args) -> int:
    ds = read_dataset(args.path)
    lang = language_by_name(args.language, ds)
    report = run_referential_eval(ds, lang)
    for label, acc in report.accuracies.items():
        print(f"{label}: accuracy {acc:.4f}")
    _write_report(report.to_json_dict(), args.report)
    return EXIT_OK


def _cmd_metrics(args) -> int:
    ds = read_dataset(args.path)
    lang = language_by_name(args.language, ds)
    split = SplitKind.from_label(args.split)
    sample = build_language_sample(ds, lang, split, max_n=args.max_n)
    report = evaluate_language(sample)
    eval_report = run_referential_eval(ds, lang)
    report.generalization_error = (
        eval_report.accuracies["test_same"] - eval_report.accuracies["test_new"]
    )
    _write_report(report.to_json_dict(), args.report)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="texrel", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="build a dataset from a JSON config")
    p.add_argument("--config", required=True, help="JSON config path")
    p.add_argument("--out", required=True, help="output .txr path")
    p.add_argument("--seed", type=int, default=None, help="override config master_seed")
    p.add_argument("--threads", type=int, default=1, help="worker processes")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("validate", help="re-verify labels, hygiene, and balance")
    p.add_argument("path")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("stats", help="verification statistics as JSON")
    p.add_argument("path")
    p.add_argument("--report", default=None, help="write JSON here instead of stdout")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("export-ppm", help="render one example to P6 pixmaps")
    p.add_argument("path")
    p.add_argument("--example", type=int, required=True, help="global example index")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_export_ppm)

    p = sub.add_parser("oracle-eval", help="referential accuracy of an oracle language")
    p.add_argument("path")
    p.add_argument("--language", required=True,
                   help="compositional | holistic | constant | noisy:<p>")
    p.add_argument("--report", default=None)
    p.set_defaults(func=_cmd_oracle_eval)

    p = sub.add_parser("metrics", help="language metrics over one split")
    p.add_argument("path")
    p.add_argument("--language", required=True)
    p.add_argument("--split", default="test_same")
    p.add_argument("--report", default=None)
    p.add_argument("--max-n", type=int, default=500, help="sample size cap")
    p.set_defaults(func=_cmd_metrics)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DatasetFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (SamplingError, ValueError, IndexError) as exc:
        # infeasible configurations surface as usage errors
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
