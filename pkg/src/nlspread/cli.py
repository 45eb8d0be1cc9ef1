"""Command-line entry point.

Exit codes: 0 success, 1 oracle failure (``validate``), 2 configuration
error, 3 math-domain error, 4 simulation abort.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import re
import shutil
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import config as config_mod
from .critical import kappa_index, sigma_star
from .dispersion import locate_speeds
from .errors import (
    BoundaryContamination,
    BoxViolation,
    ConfigError,
    NLSpreadError,
    NoCriticalValue,
)

EXIT_OK, EXIT_ORACLE, EXIT_CONFIG, EXIT_MATH, EXIT_ABORT = 0, 1, 2, 3, 4

SPEED_HEADER = ["lambda_l", "lambda_r", "c_l", "c_r", "class"]
CLASS_HEADER = ["class", "lambda_lo", "lambda_hi"]
KAPPA_HEADER = ["kappa"]
SIGMA_HEADER = ["kappa", "sigma_star"]
SUMMARY_HEADER = [
    "c_left_fit", "c_right_fit", "r2_left", "r2_right",
    "c_l_star", "c_r_star", "rel_err_left", "rel_err_right",
]


def exit_code(exc: BaseException) -> int:
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, (BoundaryContamination, BoxViolation)):
        return EXIT_ABORT
    return EXIT_MATH


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(row.get(h)) for h in header])
    return buf.getvalue()


# -- analysis commands ------------------------------------------------------


def speeds_row(cfg, **_):
    k1, k2 = cfg.kernels()
    return locate_speeds(cfg.params(), k1, k2).as_row()


def classify_row(cfg, **_):
    k1, k2 = cfg.kernels()
    prof = locate_speeds(cfg.params(), k1, k2)
    iv = prof.lambda_interval
    return {
        "class": str(prof.classification),
        "lambda_lo": None if iv is None else iv.lo,
        "lambda_hi": None if iv is None else iv.hi,
    }


def kappa_row(cfg, **_):
    k1, _k2 = cfg.kernels()
    return {"kappa": kappa_index(cfg.params(), k1)}


def _family(cfg):
    fam = cfg.kernel_v.family
    if fam is None:
        raise ConfigError("kernel.v must be a centred normal or symmetric uniform kernel for sigma-star")
    return fam


def sigma_row(cfg, unproven=False, **_):
    k1, _k2 = cfg.kernels()
    params = cfg.params()
    kappa = kappa_index(params, k1)
    try:
        s = sigma_star(params, k1, _family(cfg), unproven=unproven)
    except NoCriticalValue:
        return {"kappa": kappa, "sigma_star": None}
    return {"kappa": kappa, "sigma_star": s}


# -- simulation -------------------------------------------------------------


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_run(report, directory: Path):
    res = report.result
    x = [repr(float(v)) for v in res.x]
    snaps = []
    for k, t in enumerate(res.times):
        tt = repr(float(t))
        for xi, ui, vi in zip(x, res.u[k].tolist(), res.v[k].tolist()):
            snaps.append((tt, xi, repr(ui), repr(vi)))
    _write_csv(directory / "snapshots.csv", ["t", "x", "u", "v"], snaps)
    t, xl, xr = res.trace.arrays()
    _write_csv(directory / "fronts.csv", ["t", "x_left", "x_right"],
               [(repr(float(a)), repr(float(b)), repr(float(c))) for a, b, c in zip(t, xl, xr)])
    row = report.summary_row()
    _write_csv(directory / "summary.csv", SUMMARY_HEADER, [[_cell(row[h]) for h in SUMMARY_HEADER]])
    meta = report.plan.scenario.dumps()
    meta += "# tags = " + (",".join(report.tags) if report.tags else "none") + "\n"
    (directory / "scenario.txt").write_text(meta)


def simulate_row(cfg, out=".", **_):
    from .scenario import run

    report = run(cfg)
    root = Path(out)
    root.mkdir(parents=True, exist_ok=True)
    final = root / cfg.digest()
    # stage privately, then move into place so concurrent writers never interleave
    staging = Path(tempfile.mkdtemp(prefix=".staging-", dir=root))
    try:
        write_run(report, staging)
        if final.exists():
            shutil.rmtree(final)
        os.replace(staging, final)
    finally:
        if staging.exists():
            shutil.rmtree(staging)
    row = report.summary_row()
    row["outdir"] = str(final)
    row["tags"] = ";".join(report.tags)
    return row


COMMANDS = {
    "speeds": (speeds_row, SPEED_HEADER),
    "classify": (classify_row, CLASS_HEADER),
    "kappa": (kappa_row, KAPPA_HEADER),
    "sigma-star": (sigma_row, SIGMA_HEADER),
    "simulate": (simulate_row, SUMMARY_HEADER + ["outdir", "tags"]),
}


# -- sweep ------------------------------------------------------------------

_TOKEN = re.compile(r"^\s*([-+0-9.eE]+)?\s*\*?\s*(sigma_star|lambda_star)?\s*$")


def resolve_values(cfg, text, unproven=False):
    """Parse ``0.5*sigma_star, 1.0, lambda_star`` style lists into floats."""
    cache = {}

    def anchor(name):
        if name not in cache:
            if name == "sigma_star":
                k1, _ = cfg.kernels()
                cache[name] = sigma_star(cfg.params(), k1, _family(cfg), unproven=unproven)
            else:
                k1, k2 = cfg.kernels()
                cache[name] = locate_speeds(cfg.params(), k1, k2).lambda_r_star
        return cache[name]

    values = []
    for tok in text.split(","):
        m = _TOKEN.match(tok)
        if not m or (m.group(1) is None and m.group(2) is None):
            raise ConfigError(f"cannot parse sweep value {tok.strip()!r}")
        try:
            factor = float(m.group(1)) if m.group(1) else 1.0
        except ValueError:
            raise ConfigError(f"cannot parse sweep value {tok.strip()!r}") from None
        values.append(factor * anchor(m.group(2)) if m.group(2) else factor)
    return sorted(set(values))


def _sweep_job(args):
    text, base_dir, axis, value, command, opts = args
    cfg = config_mod.loads(text, base_dir=base_dir).with_value(axis, value)
    fn, _ = COMMANDS[command]
    try:
        return fn(cfg, **opts), "", EXIT_OK
    except NLSpreadError as exc:
        return {}, f"{type(exc).__name__}: {exc}", exit_code(exc)


def sweep(cfg, axis, values, command, jobs=1, **opts):
    cfg.with_value(axis, values[0])  # reject unknown axes before dispatching
    text = cfg.dumps()
    tasks = [(text, cfg.base_dir, axis, v, command, opts) for v in values]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
            results = list(pool.map(_sweep_job, tasks))
    else:
        results = [_sweep_job(t) for t in tasks]
    rows = []
    for v, (row, err, _code) in zip(values, results):
        rows.append({"axis": axis, "value": v, **row, "error": err or None})
    codes = [c for _r, _e, c in results]
    return rows, codes


# -- entry point --------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="scenario file")
    common.add_argument("--out", default=None, help="output directory")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a scenario key (repeatable)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    common.add_argument("--unproven", action="store_true",
                        help="allow sigma-star for kernels outside the normal/uniform families")

    parser = argparse.ArgumentParser(prog="nlspread", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("speeds", "spreading speeds and their minimizers"),
        ("classify", "propagation direction and the lambda set"),
        ("kappa", "asymmetry index of kernel.u"),
        ("sigma-star", "critical mobility of kernel.v"),
        ("simulate", "time-domain run with front tracking"),
        ("validate", "run the oracle suite"),
    ):
        sub.add_parser(name, parents=[common], help=help_)
    sw = sub.add_parser("sweep", parents=[common], help="repeat a command over one parameter")
    sw.add_argument("--axis", required=True, help="scenario key, or kernel.u.<arg> / kernel.v.<arg>")
    sw.add_argument("--values", required=True,
                    help="comma list; entries may scale sigma_star or lambda_star, e.g. 0.5*sigma_star")
    sw.add_argument("--run", default="speeds", choices=sorted(COMMANDS), help="command to repeat")
    return parser


def _emit(text, args, name):
    sys.stdout.write(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.jobs < 1:
        print("error: --jobs must be at least 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = config_mod.load(args.config, args.set)
        if args.command == "validate":
            from .validation import run_checks

            checks = run_checks(cfg)
            for c in checks:
                print(c.line())
            failed = [c for c in checks if c.status == "FAIL"]
            print(f"{len(checks) - len(failed)}/{len(checks)} checks passed or skipped")
            return EXIT_ORACLE if failed else EXIT_OK
        if args.command == "sweep":
            values = resolve_values(cfg, args.values, args.unproven)
            rows, codes = sweep(cfg, args.axis, values, args.run, args.jobs,
                                unproven=args.unproven, out=args.out or "runs")
            header = ["axis", "value"] + COMMANDS[args.run][1] + ["error"]
            _emit(csv_text(header, rows), args, "sweep.csv")
            if any(c == EXIT_OK for c in codes):
                return EXIT_OK
            return codes[0]
        fn, header = COMMANDS[args.command]
        opts = {"unproven": args.unproven}
        if args.command == "simulate":
            opts["out"] = args.out or "runs"
            row = fn(cfg, **opts)
            sys.stdout.write(csv_text(header, [row]))
            return EXIT_OK
        _emit(csv_text(header, [fn(cfg, **opts)]), args, f"{args.command}.csv")
        return EXIT_OK
    except NLSpreadError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
