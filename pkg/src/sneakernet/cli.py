"""Command-line front end: ``sneakernet <command> [options]``.

Every command prints its result to stdout in the chosen ``--format`` and
writes the same artifact plus a run manifest into ``--out-dir`` (default
from ``SNEAKERNET_OUT_DIR``, else ``./sneakernet-out``). Exit status is 0 on
success, 1 on domain errors and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .catalog import load_catalog
from .codemodel import DAY, FailureFit, LinkTarget, memory_time, memory_time_grid, select_distance
from .errors import DomainError
from .logistics import ShipSpec, build_table1, format_si
from .output import OutputDir, RunManifest, to_csv, to_json, to_text

OUT_ENV = "SNEAKERNET_OUT_DIR"
MAX_SIM_DISTANCE = 9
MAX_TRIALS = 10_000_000
MIN_SIM_P = 5e-4


class UsageError(Exception):
    pass


def _emit(args, out: OutputDir, stem: str, rows: list[dict], columns: list[str], document: dict) -> None:
    """Print and store a result in the requested format."""
    if args.format == "machine":
        text, ext = to_json(document), "json"
    elif args.format == "text":
        text, ext = to_text(rows, columns), "txt"
    else:
        text, ext = to_csv(rows, columns), "csv"
    out.write(f"{stem}.{ext}", text)
    sys.stdout.write(text)


def _fit(args) -> FailureFit:
    return FailureFit(args.alpha, args.beta)


def _target(args) -> LinkTarget:
    return LinkTarget(args.p_link, args.storage_days * DAY)


def _platforms(args):
    plats = load_catalog(args.catalog)
    if getattr(args, "platform", None):
        plats = [p for p in plats if p.name == args.platform]
        if not plats:
            raise DomainError(f"platform {args.platform!r} not found in catalog")
    return plats


# -- commands ---------------------------------------------------------------


def cmd_table1(args, out: OutputDir) -> dict:
    ship = ShipSpec(args.teu, args.volume, args.one_way_days * DAY)
    rows = []
    for r in build_table1(load_catalog(args.catalog), _target(args), ship, _fit(args)):
        ref = r.reference
        mismatched = [k for k, ok in r.matches.items() if not ok]
        rows.append({
            "name": r.name,
            "d": r.memory.distance if r.memory else None,
            "N": r.memory.qubit_count if r.memory else None,
            "capacity_per_m3": r.capacity if r.memory else None,
            "capacity": r.capacity_label,
            "bandwidth_hz": r.bandwidth if r.memory else None,
            "reference_dN": f"({ref.distance},{ref.qubit_count})" if ref else "",
            "reference_capacity": ref.capacity_label if ref else "",
            "reference_bandwidth_hz": ref.bandwidth if ref else None,
            "match": "" if not r.matches else ("yes" if not mismatched else "MISMATCH:" + "+".join(mismatched)),
            "error": r.error or "",
        })
    cols = ["name", "d", "N", "capacity_per_m3", "capacity", "bandwidth_hz", "reference_dN",
            "reference_capacity", "reference_bandwidth_hz", "match", "error"]
    _emit(args, out, "table1", rows, cols, {"rows": rows})
    return {"ship": {"teu": args.teu, "volume": args.volume, "one_way_days": args.one_way_days}}


def cmd_select_distance(args, out: OutputDir) -> dict:
    rows = []
    for plat in _platforms(args):
        try:
            m = select_distance(plat, _target(args), _fit(args), args.d_max)
            prev = memory_time(plat.error_rate, m.distance - 1, plat.gate_time, args.p_link, _fit(args))
            rows.append({"name": plat.name, "d": m.distance, "N": m.qubit_count, "cycle_time_s": m.cycle_time,
                         "p_l": m.per_cycle_failure, "memory_time_days": m.memory_time / DAY,
                         "previous_d_days": prev / DAY, "reliable_fit": _fit(args).reliable(plat.error_rate),
                         "error": ""})
        except DomainError as exc:
            rows.append({"name": plat.name, "error": str(exc)})
    cols = ["name", "d", "N", "cycle_time_s", "p_l", "memory_time_days", "previous_d_days", "reliable_fit", "error"]
    _emit(args, out, "select-distance", rows, cols, {"rows": rows})
    if all(r["error"] for r in rows):
        raise DomainError("no platform reaches the storage target")
    return {}


def cmd_memory_time(args, out: OutputDir) -> dict:
    if args.platform:
        plat = _platforms(args)[0]
        t, p = plat.gate_time, plat.error_rate
    else:
        t, p = args.gate_time, args.p
    if t is None or p is None:
        raise UsageError("give --platform or both --gate-time and --p")
    n_values = args.n or [(2 * d - 1) ** 2 for d in range(3, 41, 2)]
    p_links = args.p_link_grid or [args.p_link]
    grid = memory_time_grid(n_values, p_links, t, p, _fit(args), snap=args.snap, level=args.level_days * DAY)
    rows = []
    for i, n in enumerate(grid.qubit_counts):
        for j, pl in enumerate(grid.link_infidelities):
            sec = float(grid.seconds[i, j])
            rows.append({"N": n, "d": grid.distances[i], "p_link": pl, "memory_time_s": sec,
                         "memory_time_days": sec / DAY})
    contour = [{"N": n, "p_link": pl} for n, pl in grid.contour]
    out.write("memory-time-contour.csv", to_csv(contour, ["N", "p_link"]))
    doc = {"gate_time_s": t, "p": p, "rows": rows, "contour": contour, "skipped_N": grid.skipped,
           "level_days": args.level_days}
    _emit(args, out, "memory-time", rows, ["N", "d", "p_link", "memory_time_s", "memory_time_days"], doc)
    if grid.skipped:
        sys.stderr.write(f"skipped N values with no integer distance: {grid.skipped}\n")
    return {"gate_time_s": t, "p": p}


def _check_envelope(ds, ps, trials) -> None:
    if trials < 1:
        raise DomainError("trials must be at least 1")
    if trials > MAX_TRIALS:
        raise DomainError(f"trials {trials} exceed the desk-scale limit of {MAX_TRIALS}")
    big = [d for d in ds if d > MAX_SIM_DISTANCE]
    if big:
        raise DomainError(f"distances {big} exceed the desk-scale limit d <= {MAX_SIM_DISTANCE}; "
                          "use the closed-form model for larger codes")
    if any(d < 2 for d in ds):
        raise DomainError("distances must be at least 2")
    if any(not 0 <= p < 1 for p in ps):
        raise DomainError("error rates must lie in [0, 1)")


def _stats_rows(stats) -> list[dict]:
    rows = []
    for s in stats:
        row = s.as_row()
        row["upper_bound_only"] = s.upper_bound_only
        rows.append(row)
    return rows


STATS_COLUMNS = ["d", "p", "trials", "failures", "p_l", "ci_low", "ci_high", "upper_bound_only"]


def cmd_threshold(args, out: OutputDir) -> dict:
    from .surface.montecarlo import crossing_point, estimate_failure

    ds = args.d or [3, 5]
    ps = args.p or [0.004, 0.005, 0.006, 0.007, 0.008, 0.009, 0.01]
    trials = args.trials if args.trials is not None else 10_000
    _check_envelope(ds, ps, trials)
    if min(ps) < MIN_SIM_P:
        sys.stderr.write(f"note: p below {MIN_SIM_P} will mostly yield upper bounds\n")
    stats = {d: [estimate_failure(d, p, trials, args.seed, args.workers) for p in ps] for d in ds}
    rows = _stats_rows([s for d in ds for s in stats[d]])
    crossings = []
    for lo, hi in zip(ds, ds[1:]):
        crossings.append({"d_low": lo, "d_high": hi, "p_cross": crossing_point(stats[lo], stats[hi])})
    out.write("threshold-crossing.csv", to_csv(crossings, ["d_low", "d_high", "p_cross"]))
    _emit(args, out, "threshold", rows, STATS_COLUMNS, {"rows": rows, "crossings": crossings})
    return {"d": ds, "p": ps, "trials": trials}


def cmd_fit(args, out: OutputDir) -> dict:
    from .surface.fitting import fit_failure_model
    from .surface.montecarlo import TrialStats, estimate_failure

    if args.input:
        stats = _read_stats(Path(args.input))
    else:
        ds = args.d or [3, 5, 7]
        ps = args.p or [1e-3, 2e-3]
        trials = args.trials if args.trials is not None else 200_000
        _check_envelope(ds, ps, trials)
        stats = [estimate_failure(d, p, trials, args.seed, args.workers) for d in ds for p in ps]
    result = fit_failure_model(stats, args.valid_p_max)
    doc = {"alpha": result.alpha, "beta": result.beta, "points": result.points, "rms_log_residual": result.rms,
           "valid_p_max": result.fit.valid_p_max, "data": _stats_rows(stats)}
    rows = [{"alpha": result.alpha, "beta": result.beta, "points": result.points, "rms_log_residual": result.rms}]
    out.write("fit-data.csv", to_csv(_stats_rows(stats), STATS_COLUMNS))
    _emit(args, out, "fit", rows, ["alpha", "beta", "points", "rms_log_residual"], doc)
    return {"input": args.input}


def _read_stats(path: Path):
    import csv

    from .surface.montecarlo import TrialStats

    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise DomainError(f"{path}: {exc.strerror}") from None
    reader = csv.DictReader(lines)
    stats = []
    for lineno, row in enumerate(reader, start=2):
        try:
            stats.append(TrialStats(int(row["d"]), float(row["p"]), int(row["trials"]), int(row["failures"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"{path}:{lineno}: bad stats row ({exc})") from None
    return stats


def cmd_surgery_check(args, out: OutputDir) -> dict:
    from .surgery import verify_bell

    seeds = range(args.seed, args.seed + args.seeds)
    inputs = tuple(args.inputs) if args.inputs else ("+", "+") if args.kind == "ZZ" else ("0", "0")
    if len(inputs) != 2 or any(c not in "0+" for c in inputs):
        raise UsageError("--inputs takes two characters from '0' and '+', e.g. ++")
    report = verify_bell(tuple(args.d or [2, 3]), args.kind, inputs, seeds)
    rows = [{"kind": report["kind"], "inputs": report["inputs"], "cases": report["cases"],
             "passed": report["passed"], "all_passed": report["all_passed"]}]
    _emit(args, out, "surgery-check", rows, ["kind", "inputs", "cases", "passed", "all_passed"], report)
    if not report["all_passed"]:
        raise DomainError(f"Bell verification failed in {report['cases'] - report['passed']} of {report['cases']} cases")
    return {"kind": args.kind, "inputs": "".join(inputs), "d": args.d or [2, 3], "seeds": args.seeds}


def _scenario(args):
    from .netsim import ScenarioConfig

    data = {}
    if args.scenario:
        try:
            data = json.loads(Path(args.scenario).read_text())
        except OSError as exc:
            raise DomainError(f"{args.scenario}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise DomainError(f"{args.scenario}:{exc.lineno}: {exc.msg}") from None
        if not isinstance(data, dict):
            raise DomainError(f"{args.scenario}: scenario must be a JSON object")
    config = ScenarioConfig.from_dict(data)
    if args.seed is not None and "seed" not in data:
        config = replace(config, seed=args.seed)
    if getattr(args, "cold_start", False):
        config = replace(config, warm_start=False)
    return config


def cmd_netsim(args, out: OutputDir) -> dict:
    from .netsim import init_fleet, log_csv, run

    config = _scenario(args)
    report = run(init_fleet(config), keep_log=True)
    out.write("netsim-events.csv", log_csv(report.log))
    doc = report.summary()
    rows = [{k: v for k, v in doc.items() if not isinstance(v, (dict, list))}]
    _emit(args, out, "netsim", rows, list(rows[0]), doc)
    if report.deadlock:
        raise DomainError(f"protocol deadlock: {report.deadlock}")
    return config.to_dict()


def cmd_sweep(args, out: OutputDir) -> dict:
    from .netsim import max_sustainable_slowdown, required_online, slack_ratio, sweep_interface

    config = _scenario(args)
    slowdowns = args.slowdown or [1, 2, 4, 8, 9, 9.5, 10, 12, 16]
    result = sweep_interface(config, slowdowns, args.width or [1], args.online or [config.online], args.workers)
    rows = []
    for i, o in enumerate(result.onlines):
        for j, w in enumerate(result.widths):
            for k, s in enumerate(result.slowdowns):
                rows.append({"online": o, "width": w, "slowdown": s, "bandwidth_hz": float(result.bandwidth[i, j, k]),
                             "fraction": float(result.fraction[i, j, k])})
    doc = {
        "rows": rows,
        "analytic_bandwidth_hz": result.analytic,
        "slack_ratio": slack_ratio(replace(config, online=1)),
        "max_full_slowdown_grid": result.max_full_slowdown(),
        "monotone": result.monotone(),
    }
    if args.bisect:
        doc["max_full_slowdown_bisect"] = {o: max_sustainable_slowdown(replace(config, online=o))
                                           for o in result.onlines}
    if args.target_slowdown:
        doc["required_online"] = {"slowdown": args.target_slowdown,
                                  "online": required_online(config, args.target_slowdown)}
    out.write("sweep-summary.json", to_json({k: v for k, v in doc.items() if k != "rows"}))
    _emit(args, out, "sweep", rows, ["online", "width", "slowdown", "bandwidth_hz", "fraction"], doc)
    return config.to_dict()


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--catalog", help="platform catalog CSV (default: bundled six platforms)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int)
    common.add_argument("--out-dir", default=None, help=f"output directory (default ${OUT_ENV} or ./sneakernet-out)")
    common.add_argument("--format", choices=("csv", "text", "machine"), default="csv")

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--alpha", type=float, default=0.3)
    model.add_argument("--beta", type=float, default=70.0)
    model.add_argument("--p-link", type=float, default=1e-10)
    model.add_argument("--storage-days", type=float, default=40.0)

    parser = argparse.ArgumentParser(prog="sneakernet", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("table1", parents=[common, model], help="distance, capacity and bandwidth per platform")
    p.add_argument("--teu", type=int, default=10_000)
    p.add_argument("--volume", type=float, default=1.0, help="quantum memory volume per container (m^3)")
    p.add_argument("--one-way-days", type=float, default=20.0)

    p = sub.add_parser("select-distance", parents=[common, model], help="minimal code distance per platform")
    p.add_argument("--platform")
    p.add_argument("--d-max", type=int, default=1000)

    p = sub.add_parser("memory-time", parents=[common, model], help="memory time grid and contour")
    p.add_argument("--platform")
    p.add_argument("--gate-time", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--n", type=int, nargs="+", help="qubit counts N (rows)")
    p.add_argument("--p-link-grid", type=float, nargs="+", help="link infidelities (columns)")
    p.add_argument("--snap", action="store_true", help="move invalid N to the nearest (2d-1)^2")
    p.add_argument("--level-days", type=float, default=365.0)

    p = sub.add_parser("threshold", parents=[common], help="Monte Carlo logical failure curves")
    p.add_argument("--d", type=int, nargs="+")
    p.add_argument("--p", type=float, nargs="+")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("fit", parents=[common], help="fit alpha and beta to failure data")
    p.add_argument("--d", type=int, nargs="+")
    p.add_argument("--p", type=float, nargs="+")
    p.add_argument("--input", help="CSV of d,p,trials,failures instead of sampling")
    p.add_argument("--valid-p-max", type=float)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("surgery-check", parents=[common], help="verify lattice-surgery Bell pair creation")
    p.add_argument("--d", type=int, nargs="+")
    p.add_argument("--kind", choices=("ZZ", "XX"), default="ZZ")
    p.add_argument("--inputs", help="input states of the two patches, e.g. ++ or +0")
    p.add_argument("--seeds", type=int, default=100)

    p = sub.add_parser("netsim", parents=[common], help="run the shipping protocol simulation")
    p.add_argument("--scenario", help="scenario JSON file")
    p.add_argument("--cold-start", action="store_true")

    p = sub.add_parser("sweep", parents=[common], help="interface slowdown sweep")
    p.add_argument("--scenario")
    p.add_argument("--slowdown", type=float, nargs="+")
    p.add_argument("--width", type=int, nargs="+")
    p.add_argument("--online", type=int, nargs="+")
    p.add_argument("--bisect", action="store_true")
    p.add_argument("--target-slowdown", type=float)
    p.add_argument("--workers", type=int, default=1)
    return parser


COMMANDS = {
    "table1": cmd_table1,
    "select-distance": cmd_select_distance,
    "memory-time": cmd_memory_time,
    "threshold": cmd_threshold,
    "fit": cmd_fit,
    "surgery-check": cmd_surgery_check,
    "netsim": cmd_netsim,
    "sweep": cmd_sweep,
}


def _strip_out_dir(argv: list[str]) -> list[str]:
    kept, skip = [], False
    for a in argv:
        if skip:
            skip = False
        elif a == "--out-dir":
            skip = True
        elif not a.startswith("--out-dir="):
            kept.append(a)
    return kept


def replay(manifest_path: str | Path, out_dir: str | Path | None = None) -> int:
    """Re-run the command recorded in a manifest, optionally into another directory."""
    try:
        manifest = json.loads(Path(manifest_path).read_text())
        argv = list(manifest["argv"])
    except (OSError, ValueError, KeyError) as exc:
        sys.stderr.write(f"sneakernet replay: cannot read manifest {manifest_path}: {exc}\n")
        return 2
    if out_dir is not None:
        argv += ["--out-dir", str(out_dir)]
    return main(argv)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv[:1] == ["replay"]:
        if len(argv) not in (2, 3):
            sys.stderr.write("usage: sneakernet replay MANIFEST [OUT_DIR]\n")
            return 2
        return replay(*argv[1:])
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out = OutputDir(args.out_dir or os.environ.get(OUT_ENV) or "sneakernet-out")
    config: dict = {}
    status = 0
    try:
        config = COMMANDS[args.command](args, out) or {}
    except UsageError as exc:
        sys.stderr.write(f"sneakernet {args.command}: {exc}\n")
        return 2
    except DomainError as exc:
        sys.stderr.write(f"sneakernet {args.command}: error: {exc}\n")
        status = 1
    opts = {k: v for k, v in sorted(vars(args).items()) if k not in ("command", "out_dir")}
    manifest = RunManifest(args.command, _strip_out_dir(argv), {"options": opts, **config}, args.seed)
    if out.written:
        out.finish(manifest)
    return status


if __name__ == "__main__":
    sys.exit(main())
