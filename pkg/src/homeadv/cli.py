"""Command-line entry point: ``homeadv {ingest,rank,fit,simulate,recover}``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from homeadv.config import load_config
from homeadv.errors import DataError, NumericalError, UsageError
from homeadv.ingest import GAZETTEER_FILE, exclude_neutral, load_dataset_dir, write_dataset
from homeadv.geo import load_gazetteer
from homeadv.metrics import build_rankings, quality_table
from homeadv.pipeline import FORMATS, render_report, render_rankings, run_study
from homeadv.recovery import recovery_experiment
from homeadv.synth import generate_season

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERICAL = 0, 1, 2, 3

log = logging.getLogger("homeadv")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(docs: dict[str, str], out: str | None) -> None:
    if out:
        d = Path(out)
        d.mkdir(parents=True, exist_ok=True)
        for name, text in docs.items():
            (d / name).write_text(text, encoding="utf-8")
            print(f"wrote {d / name}")
        return
    many = len(docs) > 1
    for name, text in docs.items():
        if many:
            sys.stdout.write(f"# {name}\n")
        sys.stdout.write(text)


def _cmd_ingest(args, cfg) -> int:
    ds, report = load_dataset_dir(args.data)
    if args.format == "json":
        docs = {"ingest_report.json": report.to_json()}
    elif args.format == "csv":
        lines = ["row,reason"] + [f'{r},"{why}"' for r, why in report.warnings]
        docs = {"ingest_rejections.csv": "\n".join(lines) + "\n"}
    else:
        text = (
            f"teams: {len(ds.teams)}\nstadiums: {len(ds.stadiums)}\n"
            f"seasons: {', '.join(map(str, ds.seasons())) or '-'}\n"
            f"rows read: {report.rows_read}\nrows accepted: {report.rows_accepted}\n"
            f"rows rejected: {report.rows_rejected}\nneutral venue fixtures: {report.neutral_excluded}\n"
            f"analyzable after neutral exclusion: {report.rows_accepted - report.neutral_excluded}\n"
        )
        text += "".join(f"  row {r}: {why}\n" for r, why in report.warnings)
        docs = {"ingest.txt": text}
    _emit(docs, args.out)
    return EXIT_OK


def _cmd_rank(args, cfg) -> int:
    ds, _ = load_dataset_dir(args.data)
    q = quality_table(ds, cfg.study.quality_window)
    rankings = build_rankings(exclude_neutral(ds), q)
    _emit(render_rankings(rankings, args.format), args.out)
    return EXIT_OK


def _cmd_fit(args, cfg) -> int:
    ds, _ = load_dataset_dir(args.data)
    gaz = load_gazetteer(args.gazetteer or Path(args.data) / GAZETTEER_FILE)
    study = run_study(ds, gaz, cfg.study)
    _emit(render_report(study, args.format), args.out)
    if study.numerical_failure:
        failed = [r.stratum for r in study.reports if r.numerical_failure]
        log.error("numerical failure in stratum/strata: %s", ", ".join(failed))
        return EXIT_NUMERICAL
    return EXIT_OK


def _sim_params(args, cfg):
    params = cfg.simulation
    if args.seed is not None:
        params = dataclasses.replace(params, seed=args.seed)
    return params


def _cmd_simulate(args, cfg) -> int:
    if not args.out:
        raise UsageError("simulate needs --out DIR for the generated CSV files")
    params = _sim_params(args, cfg)
    ds, gaz = generate_season(params)
    write_dataset(ds, args.out, gaz)
    summary = {
        "seed": params.seed,
        "teams": len(ds.teams),
        "seasons": params.seasons,
        "matches": len(ds.matches),
        "files": ["matches.csv", "teams.csv", "stadiums.csv", "gazetteer.csv"],
    }
    if args.format == "json":
        print(json.dumps(summary, indent=2))
    else:
        print(f"wrote {summary['matches']} matches ({summary['teams']} teams, "
              f"{summary['seasons']} seasons, seed {summary['seed']}) to {args.out}")  # fmt: skip
    return EXIT_OK


def _cmd_recover(args, cfg) -> int:
    params = _sim_params(args, cfg)
    reps = args.replications if args.replications is not None else cfg.replications
    if reps < 1:
        raise UsageError("--replications must be >= 1")
    result = recovery_experiment(params, reps, cfg.study)
    if args.format == "json":
        docs = {"recovery.json": result.to_json()}
    elif args.format == "csv":
        docs = {"recovery.csv": result.to_csv()}
    else:
        docs = {"recovery.txt": result.to_text()}
    _emit(docs, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="INI configuration file")
    common.add_argument("--format", choices=FORMATS, default="text")
    common.add_argument("--out", metavar="DIR", help="write documents here instead of stdout")
    common.add_argument("--seed", type=int, metavar="N", help="base random seed (simulate, recover)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="homeadv", description="Home-advantage analysis for league football.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", parents=[common], help="validate and summarize a data directory")
    p.add_argument("data", metavar="DATA_DIR")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("rank", parents=[common], help="HA and quality rankings")
    p.add_argument("data", metavar="DATA_DIR")
    p.set_defaults(func=_cmd_rank)

    p = sub.add_parser("fit", parents=[common], help="four-stratum logistic study")
    p.add_argument("data", metavar="DATA_DIR")
    p.add_argument("--gazetteer", metavar="PATH", help="defaults to DATA_DIR/gazetteer.csv")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("simulate", parents=[common], help="write synthetic seasons as CSV")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("recover", parents=[common], help="Monte Carlo estimator recovery")
    p.add_argument("--replications", type=int, metavar="N")
    p.set_defaults(func=_cmd_recover)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg)
    except UsageError as exc:
        print(f"homeadv: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"homeadv: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"homeadv: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
