"""Command-line front end.

Option precedence: command-line flags, then the ``--config`` file, then the
built-in defaults. Errors go to stderr as ``CODE: message`` and set the exit
status listed in ``EXIT_CODES``.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import tempfile
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

from . import __version__, xfmr
from .errors import HarmonicDeratingError
from .io import (
    CONFIG_SCHEMA,
    Config,
    default_config_dict,
    load_json,
    read_waveform_csv,
    rectifier_params_from_dict,
    spectrum_from_dict,
    write_waveform_csv,
)
from .loadsim import RectifierParams, run_rectifier
from .report import ReportDocument, digest
from .scenario import format_table, run_all
from .signal import synthesize
from .spectral import analyze

EXIT_CODES = {
    "E_GENERIC": 1,
    "E_USAGE": 2,
    "E_CSV": 3,
    "E_NYQUIST": 4,
    "E_CONFIG": 5,
    "E_IO": 6,
    "E_SOLVER": 7,
    "E_VALUE": 8,
    "E_RESOLUTION": 8,
    "E_UNDEFINED": 8,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _global_options(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--config", metavar="PATH", default=d, help="JSON configuration file")
    p.add_argument("--out", metavar="PATH", default=d, help="output file or directory")
    p.add_argument("--h-max", type=int, metavar="N", default=d, help="highest harmonic order")
    p.add_argument("--pec-r", type=float, metavar="F", default=d, help="winding eddy-loss factor P_EC-R")
    p.add_argument("--fundamental", type=float, metavar="HZ", default=d, help="fundamental frequency")
    p.add_argument(
        "--seed-docs",
        action="store_true",
        default=argparse.SUPPRESS if suppress else False,
        help="export-defaults: also write the config JSON schema and example input files",
    )
    p.add_argument(
        "--timestamp",
        action="store_true",
        default=argparse.SUPPRESS if suppress else False,
        help="embed a generation timestamp in JSON reports",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="harmonic-derating",
        description=(
            "Harmonic analysis and transformer derating for residential load currents. "
            "Precedence: flags > --config file > built-ins."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _global_options(parser, suppress=False)
    common = _Parser(add_help=False)
    _global_options(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", parents=[common], help="harmonic table and derating for a waveform CSV")
    p.add_argument("csv", help="waveform CSV with header time_s,current_a")

    sub.add_parser("scenarios", parents=[common], help="run the five PV-penetration scenarios")

    p = sub.add_parser("synth", parents=[common], help="write a waveform CSV from a spectrum JSON")
    p.add_argument("spectrum", help="spectrum JSON")
    p.add_argument("out_csv", help="output CSV")
    p.add_argument("--duration", type=float, help="seconds (default: file value or 1.0)")
    p.add_argument("--sample-rate", type=float, help="Hz (default: file value or 20000)")

    p = sub.add_parser("rectifier", parents=[common], help="simulate a diode bridge with DC-link capacitor")
    p.add_argument("params", help="rectifier parameter JSON")
    p.add_argument("out_csv", help="output CSV; diagnostics go to a .json sidecar")

    sub.add_parser("export-defaults", parents=[common], help="write the built-in configuration")
    return parser


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _settings(args):
    cfg = Config.load(args.config)
    spectral = cfg.spectral
    transformer = cfg.transformer
    if args.h_max is not None:
        spectral = replace(spectral, h_max=args.h_max)
    if args.pec_r is not None:
        transformer = replace(transformer, p_ec_r=args.pec_r)
    fundamental = args.fundamental if args.fundamental is not None else cfg.fundamental
    return cfg, spectral, transformer, fundamental


def _input_bytes(*paths) -> list[bytes]:
    return [Path(p).read_bytes() if p else b"<builtin>" for p in paths]


def _overrides(args) -> bytes:
    return json.dumps(
        {"h_max": args.h_max, "pec_r": args.pec_r, "fundamental": args.fundamental}, sort_keys=True
    ).encode()


def _report(args, command, chunks, metrics, plots) -> ReportDocument:
    stamp = datetime.now(timezone.utc).isoformat() if args.timestamp else None
    return ReportDocument(__version__, command, digest(chunks), metrics, plots, generated_at=stamp)


def _spectrum_rows(s) -> list[dict]:
    i1 = s.magnitude(1)
    return [
        {
            "h": h,
            "frequency_hz": h * s.fundamental,
            "rms_a": m,
            "pct_of_fundamental": 100 * m / i1 if i1 > 0 else None,
        }
        for h, m in s.magnitudes().items()
    ]


def cmd_analyze(args, out) -> int:
    _, spectral, transformer, fundamental = _settings(args)
    wf = read_waveform_csv(args.csv, fundamental)
    spec = analyze(wf, spectral)
    rep = xfmr.assess(spec, transformer)
    rows = _spectrum_rows(spec)
    print(f"{'h':>4} {'freq Hz':>9} {'I_h A rms':>12} {'% of I1':>9}", file=out)
    for r in rows:
        print(f"{r['h']:>4} {_fmt(r['frequency_hz']):>9} {_fmt(r['rms_a']):>12} {_fmt(r['pct_of_fundamental']):>9}", file=out)
    print(f"THD         {_fmt(100 * rep.thd)} %", file=out)
    print(f"F_HL        {_fmt(rep.f_hl)}", file=out)
    print(f"eddy loss   {_fmt(rep.eddy_loss_w)} W ({_fmt(100 * rep.eddy_loss_pu)} %)", file=out)
    print(f"total loss  {_fmt(rep.total_loss)} W", file=out)
    print(f"temp rise   {_fmt(rep.theta_final)} K", file=out)
    print(f"derating    {_fmt(100 * rep.derating)} %", file=out)
    if args.out:
        doc = _report(
            args,
            "analyze",
            _input_bytes(args.csv, args.config) + [_overrides(args)],
            [{"id": Path(args.csv).name, "sample_rate_hz": wf.sample_rate, "samples": len(wf), **rep.to_dict()}],
            {"spectrum": {Path(args.csv).name: rows}},
        )
        Path(args.out).write_text(doc.to_json())
    return 0


def _check_writable(directory: Path) -> None:
    try:
        directory.mkdir(parents=True, exist_ok=True)
        with tempfile.TemporaryFile(dir=directory):
            pass
    except OSError as exc:
        raise OSError(f"output directory {directory} is not writable: {exc.strerror or exc}") from None


def cmd_scenarios(args, out) -> int:
    out_dir = Path(args.out) if args.out else None
    if out_dir is not None:
        _check_writable(out_dir)
    cfg, spectral, transformer, _ = _settings(args)
    if not cfg.scenarios:
        print("W_EMPTY: configuration defines no scenarios", file=sys.stderr)
    results, rows = run_all(transformer, spectral, cfg.scenarios, cfg.signatures)
    print(format_table(rows), file=out)
    if out_dir is None:
        return 0
    metrics = [
        {**row.to_dict(), **res.report.to_dict()} for row, res in zip(rows, results)
    ]
    plots = {
        "spectrum": {r.id: _spectrum_rows(r.spectrum) for r in results},
        "thd_eddy": [
            {"id": r.id, "thd_pct": r.thd_pct, "tr_ec_pct": r.tr_ec_pct, "derating_pct": r.derating_pct}
            for r in rows
        ],
        "normalized_h3_h5": [{"id": r.id, "h3_pct": r.h3_pct, "h5_pct": r.h5_pct} for r in rows],
    }
    doc = _report(args, "scenarios", _input_bytes(args.config) + [_overrides(args)], metrics, plots)
    (out_dir / "report.json").write_text(doc.to_json())
    for r in results:
        with open(out_dir / f"spectrum_scenario_{r.id}.csv", "w", newline="") as fh:
            w = csv.DictWriter(fh, ["h", "frequency_hz", "rms_a", "pct_of_fundamental"], lineterminator="\n")
            w.writeheader()
            w.writerows(_spectrum_rows(r.spectrum))
    with open(out_dir / "thd_eddy_summary.csv", "w", newline="") as fh:
        w = csv.DictWriter(
            fh, ["id", "thd_pct", "tr_ec_pct", "derating_pct", "h3_pct", "h5_pct"], lineterminator="\n"
        )
        w.writeheader()
        for r in rows:
            w.writerow({k: getattr(r, k) for k in w.fieldnames})
    return 0


def cmd_synth(args, out) -> int:
    doc = load_json(args.spectrum)
    if args.fundamental is not None:
        doc["fundamental_hz"] = args.fundamental
    duration = args.duration if args.duration is not None else doc.get("duration_s", 1.0)
    rate = args.sample_rate if args.sample_rate is not None else doc.get("sample_rate_hz", 20_000.0)
    if not duration > 0:
        raise UsageError(f"duration must be positive, got {duration}")
    if not rate > 0:
        raise UsageError(f"sample rate must be positive, got {rate}")
    spec = spectrum_from_dict(doc)
    wf = synthesize(spec, duration, rate)
    write_waveform_csv(wf, args.out_csv)
    print(f"wrote {len(wf)} samples to {args.out_csv}", file=out)
    return 0


def cmd_rectifier(args, out) -> int:
    doc = load_json(args.params)
    params = rectifier_params_from_dict(doc)
    try:
        result = run_rectifier(params)
    except HarmonicDeratingError as exc:
        sidecar = Path(args.out_csv).with_suffix(".json")
        sidecar.write_text(json.dumps({"error": str(exc), "params": doc}, indent=2) + "\n")
        raise
    write_waveform_csv(result.waveform, args.out_csv)
    sidecar = Path(args.out_csv).with_suffix(".json")
    sidecar.write_text(json.dumps(result.diagnostics(), indent=2, sort_keys=True) + "\n")
    print(f"wrote {len(result.waveform)} samples to {args.out_csv}; diagnostics in {sidecar}", file=out)
    return 0


def cmd_export_defaults(args, out) -> int:
    text = json.dumps(default_config_dict(), indent=2) + "\n"
    if args.seed_docs:
        if not args.out:
            raise UsageError("--seed-docs needs --out DIR")
        d = Path(args.out)
        d.mkdir(parents=True, exist_ok=True)
        (d / "config.json").write_text(text)
        (d / "config.schema.json").write_text(json.dumps(CONFIG_SCHEMA, indent=2) + "\n")
        example_spec = {
            "fundamental_hz": 60.0,
            "duration_s": 1.0,
            "sample_rate_hz": 20000.0,
            "harmonics": {"1": {"rms_a": 1.0, "phase_rad": 0.0}, "3": 0.3, "5": 0.4},
        }
        (d / "spectrum.example.json").write_text(json.dumps(example_spec, indent=2) + "\n")
        (d / "rectifier.example.json").write_text(
            json.dumps(RectifierParams().__dict__, indent=2) + "\n"
        )
        print(f"wrote config.json, config.schema.json and example inputs to {d}", file=out)
    elif args.out:
        Path(args.out).write_text(text)
    else:
        out.write(text)
    return 0


COMMANDS = {
    "analyze": cmd_analyze,
    "scenarios": cmd_scenarios,
    "synth": cmd_synth,
    "rectifier": cmd_rectifier,
    "export-defaults": cmd_export_defaults,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"E_USAGE: {exc}", file=sys.stderr)
        return EXIT_CODES["E_USAGE"]
    except HarmonicDeratingError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return exc.exit_status
    except OSError as exc:
        print(f"E_IO: {exc}", file=sys.stderr)
        return EXIT_CODES["E_IO"]


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
