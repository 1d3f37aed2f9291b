"""Command-line entry point.

Exit codes: 0 on success, 1 when a feasibility solve has no solution,
2 on invalid input.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import sys
from pathlib import Path

from hapqkd import budget, qkd
from hapqkd.catalog import PLATFORM_CLASSES, catalog
from hapqkd.errors import MissingEntryError
from hapqkd.harness import FIGURES, SweepSpec, run_point, run_sweep
from hapqkd.output import format_number, table_to_csv, table_to_json, to_json
from hapqkd.scenario import Scenario, load_scenario

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_INPUT = 2


def _scenario(args) -> Scenario:
    scenario = load_scenario(args.scenario) if args.scenario else Scenario()
    method = getattr(args, "method", None)
    if method:
        scenario = dataclasses.replace(scenario, method=method)
    return scenario


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _fmt_row(label: str, value: float, unit: str = "") -> str:
    return f"{label:<28}{format_number(value):>14} {unit}".rstrip() + "\n"


def cmd_budget(args) -> int:
    scenario = _scenario(args)
    result = run_point(scenario)
    if args.json:
        _emit(to_json(result.as_dict()), args.out)
        return EXIT_OK
    b = result.selected(scenario.method)
    buf = io.StringIO()
    buf.write(f"method: {b.method}\n")
    buf.write(_fmt_row("line of sight", result.los, "m"))
    buf.write(_fmt_row("geometric", b.geometric, "dB"))
    buf.write(_fmt_row("pointing", b.pointing, "dB"))
    buf.write(_fmt_row("molecular", b.molecular, "dB"))
    buf.write(_fmt_row("weather", b.weather, "dB"))
    buf.write(_fmt_row("fixed atmospheric", b.fixed_atmospheric, "dB"))
    buf.write(_fmt_row("channel total", b.channel_total, "dB"))
    buf.write(_fmt_row("receiver", b.receiver, "dB"))
    buf.write(_fmt_row("system total", b.system_total, "dB"))
    dv, cv = result.dv, result.cv
    buf.write(_fmt_row("DV signal counts", dv.signal_counts, "1/s"))
    buf.write(_fmt_row("DV noise counts", dv.noise_counts, "1/s"))
    buf.write(_fmt_row("DV QBER", dv.qber))
    buf.write(_fmt_row("DV margin", dv.margin_db, "dB"))
    buf.write(f"{'DV feasible':<28}{str(dv.feasible):>14}\n")
    buf.write(_fmt_row("CV SNR", cv.snr))
    buf.write(_fmt_row("CV margin", cv.margin_db, "dB"))
    buf.write(f"{'CV feasible':<28}{str(cv.feasible):>14}\n")
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    scenario = _scenario(args)
    methods = tuple(args.methods) if args.methods else budget.METHODS
    if args.figure:
        spec = SweepSpec(preset=args.figure, methods=methods, sky_presets=args.sky)
    else:
        spec = SweepSpec(
            variable=args.var,
            min=args.min,
            max=args.max,
            points=args.points,
            scale="log" if args.log else "linear",
            methods=methods,
        )
    table = run_sweep(spec, scenario, workers=args.workers)
    text = table_to_json(table) if args.json else table_to_csv(table)
    _emit(text, args.out)
    return EXIT_OK


def cmd_feasibility(args) -> int:
    scenario = _scenario(args)
    protocol = args.protocol
    channel = budget.total_loss(scenario).channel_total
    doc = {"protocol": protocol, "method": scenario.method, "solve": args.solve,
           "channel_loss_db": channel}
    status = EXIT_OK
    if args.solve == "max-loss":
        limit = qkd.limit_loss_db(scenario, protocol)
        doc["max_loss_db"] = limit
        doc["margin_db"] = limit - channel
        if not limit > 0:
            status = EXIT_INFEASIBLE
    else:
        theta = qkd.max_feasible_divergence(scenario, protocol)
        doc["max_divergence_rad"] = theta
        if theta is None:
            status = EXIT_INFEASIBLE
    doc["solved"] = status == EXIT_OK
    if args.json:
        _emit(to_json(doc), args.out)
    else:
        lines = []
        for k, v in doc.items():
            if isinstance(v, float):
                v = format_number(v)
            elif v is None:
                v = "no solution"
            lines.append(f"{k}: {v}")
        _emit("\n".join(lines) + "\n", args.out)
    return status


def cmd_catalog(args) -> int:
    records = catalog(platform_class=args.platform_class, min_payload=args.min_payload,
                      name=args.name)
    rows = [dataclasses.asdict(r) for r in records]
    if args.json:
        _emit(to_json(rows), args.out)
        return EXIT_OK
    buf = io.StringIO()
    fields = [f.name for f in dataclasses.fields(records[0])] if records else ["name"]
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if v is None else (format_number(v) if isinstance(v, float) else v))
                         for k, v in row.items()})
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hapqkd",
        description="Link budget and QKD feasibility for platform-to-ground optical links.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, method=True):
        p.add_argument("--scenario", help="scenario JSON file (defaults apply when omitted)")
        if method:
            p.add_argument("--method", choices=budget.METHODS)
        p.add_argument("--out", help="write output to this file instead of stdout")
        p.add_argument("--json", action="store_true", help="emit JSON")

    p = sub.add_parser("budget", help="loss breakdown and feasibility at one operating point")
    common(p)
    p.set_defaults(func=cmd_budget)

    p = sub.add_parser("sweep", help="figure preset or custom one-variable sweep")
    common(p, method=False)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--figure", choices=FIGURES)
    group.add_argument("--var", help="dotted scenario path, e.g. geometry.elevation_deg")
    p.add_argument("--min", type=float)
    p.add_argument("--max", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--log", action="store_true", help="logarithmic spacing")
    p.add_argument("--methods", nargs="+", choices=budget.METHODS)
    p.add_argument("--sky", nargs="+", help="sky presets for fig6")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("feasibility", help="solve for the loss or divergence limit")
    common(p)
    p.add_argument("--solve", choices=("max-loss", "max-divergence"), default="max-loss")
    p.add_argument("--protocol", choices=qkd.PROTOCOLS, default="dv")
    p.set_defaults(func=cmd_feasibility)

    p = sub.add_parser("catalog", help="list platforms from the embedded catalog")
    p.add_argument("--class", dest="platform_class", choices=PLATFORM_CLASSES)
    p.add_argument("--min-payload", type=float, help="minimum payload in kg")
    p.add_argument("--name")
    p.add_argument("--out")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_catalog)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "sweep" and args.var and None in (args.min, args.max, args.points):
        parser.error("--var needs --min, --max and --points")
    try:
        return args.func(args)
    except (ValueError, MissingEntryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
