"""Command-line entry point.

Exit codes: 0 success (alerts are output, not failures), 1 input data or
golden-check failure, 2 invalid profile/config or usage error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from . import ingest_io
from .activity import MS_PER_HOUR
from .ambient import AmbientBand, evaluate_ambient
from .golden import golden_check
from .monitor import Alert, MonitorRules, SessionSummary
from .pipeline import Engine, WindowResult
from .sensor_model import ActivityLevel, Channel, EngineConfig, SensorDataError
from .synth import ProfileError, generate

log = logging.getLogger("eirc_monitor")

FEATURES_NAME = "features.csv"
SUMMARY_NAME = "summary.json"


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _load_config(path: Optional[str]):
    if path is None:
        return EngineConfig(), MonitorRules()
    return ingest_io.load_config(path)


def _human_value(v) -> str:
    if isinstance(v, tuple):
        return "+".join(v)
    if isinstance(v, float):
        return f"{v:.1f}"
    return str(v)


def _alert_line(alert: Alert, human: bool) -> str:
    if human:
        ctx = ", ".join(f"{k}={_human_value(v)}" for k, v in alert.context)
        secs = alert.t_ms / 1000.0
        return f"[{secs:9.1f} s] {alert.kind.value}: window {alert.window_index} ({alert.level.label}) {ctx}"
    return json.dumps(alert.to_dict())


def _run_engine(args, records, on_alert=None):
    config, rules = _load_config(args.config)
    engine = Engine(config, rules)
    results: List[WindowResult] = []

    def take(batch):
        for res in batch:
            results.append(res)
            if on_alert is not None:
                for alert in res.alerts:
                    on_alert(alert)

    for rec in records:
        take(engine.process(rec))
    take(engine.flush())
    return engine, results


def cmd_gen(args) -> int:
    config, _ = _load_config(args.config)
    profile = ingest_io.load_profile(args.profile)
    session = generate(profile, config, seed=args.seed)
    out = Path(args.out)
    truth = Path(args.truth) if args.truth else out.with_name(out.stem + ".truth.csv")
    ingest_io.write_records(session.records, out)
    ingest_io.write_truth(session.truth, truth)
    print(f"wrote {len(session.records)} records to {out} sha256={_sha256(out)}")
    print(f"wrote {len(session.truth)} window labels to {truth}")
    return 0


def cmd_replay(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = ingest_io.read_session(args.input)
    engine, results = _run_engine(
        args, records, on_alert=lambda a: print(_alert_line(a, args.human), flush=True)
    )
    ingest_io.write_features(results, out_dir / FEATURES_NAME)
    ingest_io.write_summary(engine.summary(FEATURES_NAME), out_dir / SUMMARY_NAME)
    log.info("%d windows, %d alerts", len(results), len(engine.session.alerts))
    return 0


def render_summary(summary: SessionSummary) -> List[str]:
    lines = [f"windows: {summary.windows}  current level: {summary.current_activity_level or '-'}"]
    lines.append(f"{'level':<10} {'windows':>8} {'duration':>10}")
    for label, row in summary.levels.items():
        lines.append(f"{label:<10} {row['count']:>8} {row['duration']:>10}")
    if summary.hourly:
        lines.append("hourly windows (hour: " + "/".join(lvl.label for lvl in ActivityLevel) + ")")
        for hour, counts in summary.hourly.items():
            lines.append(f"  {hour:>3}: " + "/".join(str(c) for c in counts.values()))
    lines.append(
        "posture: " + ", ".join(f"{k} {v}" for k, v in summary.posture_occupancy.items())
    )
    lines.append(f"ambient episodes: {len(summary.ambient_episodes)}")
    for ep in summary.ambient_episodes:
        lines.append(f"  {ep['start_ms']}-{ep['end_ms']} ms {'+'.join(ep['violations'])}")
    lines.append(f"alerts: {len(summary.alerts)}")
    for a in summary.alerts:
        lines.append(f"  {a['t_ms']} ms {a['kind']} (window {a['window']})")
    return lines


def cmd_summarize(args) -> int:
    summary = ingest_io.read_summary(args.summary)
    if args.json:
        sys.stdout.write(ingest_io.summary_text(summary))
    else:
        print("\n".join(render_summary(summary)))
    return 0


def cmd_export_plot(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = ingest_io.read_session(args.input)
    engine, results = _run_engine(args, records)
    band_records = [r for r in records if r.channel is Channel.AMBIENT]
    band = AmbientBand.from_config(engine.config)
    with open(out_dir / "ambient.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ingest_io.PLOT_AMBIENT_COLUMNS)
        for rec in band_records:
            temp_f, rh = rec.values
            verdict = evaluate_ambient(temp_f, rh, band, rec.t_ms)
            w.writerow([rec.t_ms, repr(temp_f), repr(rh), "true" if verdict.in_band else "false"])

    ingest_io.write_features(results, out_dir / "activity.csv")

    agg = {}
    for res in results:
        f = res.features
        key = (f.start_ms // MS_PER_HOUR, f.level)
        n, s = agg.get(key, (0, 0.0))
        agg[key] = (n + 1, s + f.sma)
    with open(out_dir / "hourly.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ingest_io.PLOT_HOURLY_COLUMNS)
        for (hour, level), (n, s) in sorted(agg.items()):
            w.writerow([hour, level.label, n, n * engine.config.window_ms, repr(s)])
    print(f"wrote ambient.csv, activity.csv, hourly.csv to {out_dir}")
    return 0


def cmd_golden_check(args) -> int:
    report = golden_check()
    print("\n".join(report.lines()))
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="eirc-monitor",
        description="Activity level, posture and ambient monitoring from phone sensor logs.",
    )
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a labelled synthetic session")
    g.add_argument("--profile", required=True, help="JSON activity profile")
    g.add_argument("--out", required=True, help="record file to write")
    g.add_argument("--truth", help="ground-truth sidecar (default: <out>.truth.csv)")
    g.add_argument("--seed", type=int, help="override the profile's seed")
    g.add_argument("--config", help="key = value engine config")
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("replay", help="process a record file; alerts go to stdout")
    r.add_argument("--input", required=True)
    r.add_argument("--out-dir", required=True)
    r.add_argument("--config")
    r.add_argument("--human", action="store_true", help="human-readable alert lines")
    r.set_defaults(func=cmd_replay)

    s = sub.add_parser("summarize", help="print a summary file")
    s.add_argument("summary")
    s.add_argument("--json", action="store_true", help="echo the normalised JSON instead")
    s.set_defaults(func=cmd_summarize)

    e = sub.add_parser("export-plot", help="write plot-ready ambient, activity and hourly tables")
    e.add_argument("--input", required=True)
    e.add_argument("--out-dir", required=True)
    e.add_argument("--config")
    e.set_defaults(func=cmd_export_plot)

    c = sub.add_parser("golden-check", help="verify against the embedded published sample table")
    c.set_defaults(func=cmd_golden_check)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (ProfileError, ingest_io.ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SensorDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
