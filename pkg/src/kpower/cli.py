"""``kpower`` command line: fringe curves, width sweeps, resolvability, noise, figure data.

Every run writes its data file(s) plus a JSON manifest holding the
parameters needed to regenerate them byte for byte. Files are staged under
temporary names and renamed into place only after all computation is done.

Exit codes: 0 success, 1 computation error, 2 usage or validation error.
"""
from __future__ import annotations

import argparse
import hashlib
import io
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from ._backend import BACKEND
from .errors import KPowerError
from .fringe_model import DEFAULT_GRID, FringeParams, PhaseGrid, normalized_array, sample_curve
from .kpower_metrics import MAX_ORDER, KPowerSpec, fwhm_exact, kth_power, power_values, snl_fit, sweep_fwhm
from .resolvability import SpectralPair, dip_resolvable, line_centers, resolvable
from .shot_noise import NOISE_GRID, NoiseConfig, ensemble_fringe

SCHEMA_VERSION = "1.0"
OUT_DIR_ENV = "KPOWER_OUT_DIR"
FIGURES = ("fig3a", "fig3b", "fig3c", "fig3d", "fig4", "fig5")
DELAY_NOTE = (
    "arm delay assumed to be one optical period (delta_t = 1/f0); "
    "under this choice f'''=0.99 f0 at N=100 already "
    "resolves at K=1, so only the ten-fold K=100/K=1 spacing ratio is reproduced"
)


class UsageError(Exception):
    pass


# --- argument types --------------------------------------------------------

def _int_in(lo, hi=None):
    def parse(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
        if v < lo or (hi is not None and v > hi):
            bound = f">= {lo}" if hi is None else f"in [{lo}, {hi}]"
            raise argparse.ArgumentTypeError(f"{v} must be {bound}")
        return v
    return parse


def _float_ge(lo, strict=False):
    def parse(text):
        try:
            v = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}")
        if not math.isfinite(v) or v < lo or (strict and v == lo):
            raise argparse.ArgumentTypeError(f"{text} must be finite and {'>' if strict else '>='} {lo}")
        return v
    return parse


def _finite(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"{text} must be finite")
    return v


def parse_int_list(text, lo=1, hi=None):
    """Parse ``2,10,100``, ``1..100`` or ``2..200:2`` (inclusive ranges)."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            raise argparse.ArgumentTypeError(f"empty item in list {text!r}")
        try:
            if ".." in part:
                a, rest = part.split("..", 1)
                b, step = rest.split(":", 1) if ":" in rest else (rest, "1")
                a, b, step = int(a), int(b), int(step)
                if step < 1 or b < a:
                    raise ValueError
                out.extend(range(a, b + 1, step))
            else:
                out.append(int(part))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad list or range syntax: {part!r}")
    for v in out:
        if v < lo or (hi is not None and v > hi):
            raise argparse.ArgumentTypeError(f"value {v} out of range in {text!r}")
    return out


def _n_list(text):
    return parse_int_list(text, 1)


def _k_list(text):
    return parse_int_list(text, 1, MAX_ORDER)


# --- output helpers ---------------------------------------------------------

def fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return f"{float(x):.9g}"


def csv_text(header, columns) -> str:
    buf = io.StringIO(newline="")
    buf.write(",".join(header) + "\n")
    for row in zip(*columns):
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _sha256(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def write_atomic(files: dict[Path, str]) -> None:
    """Stage every file under a temp name, then rename all into place.

    Data files are renamed before the trailing manifest, so a manifest on
    disk always describes complete outputs. Leftover temp files are removed
    on any failure.
    """
    staged = []
    try:
        for path, text in files.items():
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
            staged.append((tmp, path))
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        for tmp, path in staged:
            os.replace(tmp, path)
    except BaseException:
        for tmp, _ in staged:
            if os.path.exists(tmp):
                os.unlink(tmp)
        raise


def manifest(command, parameters, outputs: dict[Path, str], seed=None, notes=None, extra=None) -> str:
    body = {
        "tool": "kpower",
        "tool_version": __version__,
        "spec_version": SCHEMA_VERSION,
        "backend": BACKEND,
        "command": command,
        "parameters": parameters,
        "seed": seed,
        "outputs": {p.name: _sha256(t) for p, t in outputs.items()},
        "notes": notes or [],
    }
    if extra:
        body.update(extra)
    return json_text(body)


def manifest_path(out: Path) -> Path:
    return out.with_name(out.stem + ".manifest.json")


def _out_dir(args) -> Path:
    if args.out_dir:
        return Path(args.out_dir)
    return Path(os.environ.get(OUT_DIR_ENV, "."))


def _resolve_out(args, default_name: str) -> Path:
    if args.out:
        return Path(args.out)
    return _out_dir(args) / default_name


def _grid(args, default: PhaseGrid) -> PhaseGrid:
    start = default.start if args.start is None else args.start
    end = default.end if args.end is None else args.end
    points = default.n_points if args.points is None else args.points
    if not start < end:
        raise UsageError(f"--start ({start}) must be below --end ({end})")
    return PhaseGrid(start, end, points)


def _grid_params(grid: PhaseGrid) -> dict:
    return {"start": grid.start, "end": grid.end, "points": grid.n_points}


def _check_envelope(n, r):
    if n > 1 and r >= n:
        raise UsageError(f"--r must stay below --n (first envelope zero inside pi/N): r={r}, n={n}")


def _emit(args, command, data_path: Path, data_text: str, parameters, seed=None, notes=None) -> int:
    files = {data_path: data_text}
    files[manifest_path(data_path)] = manifest(command, parameters, {data_path: data_text}, seed, notes)
    write_atomic(files)
    print(str(data_path))
    return 0


# --- subcommands --------------------------------------------------------------

def cmd_fringe(args) -> int:
    grid = _grid(args, DEFAULT_GRID)
    params = FringeParams(args.n, args.r)
    curve = kth_power(sample_curve(params, grid, normalized=True), KPowerSpec(args.k))
    out = _resolve_out(args, f"fringe_n{args.n}_k{args.k}.{args.format}")
    if args.format == "csv":
        text = csv_text(["phase", "intensity"], [curve.phases, curve.values])
    else:
        text = json_text({
            "phase": [float(fmt(v)) for v in curve.phases],
            "intensity": [float(fmt(v)) for v in curve.values],
        })
    parameters = {"n": args.n, "k": args.k, "r": args.r, "grid": _grid_params(grid), "format": args.format}
    return _emit(args, "fringe", out, text, parameters)


def sweep_table(n_list, k_list, r):
    rows = sweep_fwhm(n_list, k_list, r)
    base = {n: fwhm_exact(FringeParams(n, r), KPowerSpec(1)).fwhm for n in dict.fromkeys(n_list)}
    n_col = [row.n for row in rows]
    k_col = [row.k for row in rows]
    w_col = [row.fwhm for row in rows]
    snl_col = [row.fwhm / (base[row.n] / math.sqrt(row.k)) for row in rows]
    return ["n", "k", "fwhm_rad", "fwhm_over_snl"], [n_col, k_col, w_col, snl_col]


def _table_json(header, columns):
    return [dict(zip(header, (float(fmt(v)) if isinstance(v, float) else int(v) for v in row)))
            for row in zip(*columns)]


def cmd_sweep(args) -> int:
    for n in args.n:
        _check_envelope(n, args.r)
    header, columns = sweep_table(args.n, args.k, args.r)
    out = _resolve_out(args, f"sweep.{args.format}")
    if args.format == "csv":
        text = csv_text(header, columns)
    else:
        text = json_text(_table_json(header, columns))
    parameters = {"n": args.n, "k": args.k, "r": args.r, "format": args.format}
    return _emit(args, "sweep", out, text, parameters)


def cmd_resolve(args) -> int:
    _check_envelope(args.n, args.r)
    f0 = args.f0_hz
    delta_t = args.delta_t if args.delta_t is not None else 1.0 / f0
    pair = SpectralPair(f0, args.f1_ratio * f0, delta_t)
    params = FringeParams(args.n, args.r)
    spec = KPowerSpec(args.k)
    report = resolvable(pair, params, spec)
    try:
        dip = dip_resolvable(pair, params, spec)
    except KPowerError:
        dip = None
    body = {
        "n": args.n,
        "k": args.k,
        "r": args.r,
        "f0_hz": f0,
        "f1_hz": pair.f1,
        "delta_t_s": delta_t,
        "dip_resolvable": dip,
        "min_resolvable_df_over_f0": report.min_resolvable_df / f0,
    }
    body.update(report.to_dict())
    text = json_text(body)
    out = _resolve_out(args, "resolve.json")
    parameters = {"n": args.n, "k": args.k, "r": args.r, "f0_hz": f0,
                  "f1_ratio": args.f1_ratio, "delta_t_s": delta_t}
    files = {out: text, manifest_path(out): manifest("resolve", parameters, {out: text})}
    write_atomic(files)
    sys.stdout.write(text)
    return 0


def cmd_noise(args) -> int:
    grid = _grid(args, NOISE_GRID)
    _check_envelope(args.n, args.r)
    params = FringeParams(args.n, args.r)
    cfg = NoiseConfig(args.mean, args.trials, args.seed, args.k)
    res = ensemble_fringe(params, grid, cfg)
    phases = grid.points()
    expected = power_values(np.clip(normalized_array(params, phases), 0.0, 1.0), args.k)
    out = _resolve_out(args, f"noise_n{args.n}_k{args.k}_seed{args.seed}.{args.format}")
    header = ["phase", "mean", "stderr", "expected"]
    columns = [phases, res.mean_curve, res.stderr_curve, expected]
    if args.format == "csv":
        text = csv_text(header, columns)
    else:
        text = json_text({h: [float(fmt(v)) for v in c] for h, c in zip(header, columns)})
    parameters = {"n": args.n, "k": args.k, "r": args.r, "mean_photons": args.mean,
                  "trials": args.trials, "grid": _grid_params(grid), "format": args.format}
    return _emit(args, "noise", out, text, parameters, seed=args.seed)


# --- figure reproduction ----------------------------------------------------

FIG3_ORDERS = (1, 2, 5, 10, 20, 50, 100)
FIG3_N = list(range(2, 201, 2))


def _kpower_panel(n, r, orders, grid):
    base = sample_curve(FringeParams(n, r), grid, normalized=True)
    cols = [base.phases] + [kth_power(base, KPowerSpec(k)).values for k in orders]
    return csv_text(["phase"] + [f"k{k}" for k in orders], cols), {"n": n, "r": r, "k": list(orders)}


def _lines_panel(n, r, ratios, orders, grid, f0=1.0):
    """Per-line K-th power fringes plus their incoherent sum, per order."""
    delta_t = 1.0 / f0
    params = FringeParams(n, r)
    phases = grid.points()
    header, cols = ["phase"], [phases]
    for k in orders:
        total = np.zeros(grid.n_points)
        for ratio in ratios:
            c = line_centers(SpectralPair(f0, ratio * f0, delta_t))[1]
            v = power_values(normalized_array(params, phases - c), k)
            header.append(f"f{ratio:g}_k{k}")
            cols.append(v)
            total = total + v
        header.append(f"sum_k{k}")
        cols.append(total)
    verdicts = {}
    for ratio in ratios:
        if ratio == 1.0:
            continue
        for k in orders:
            rep = resolvable(SpectralPair(f0, ratio * f0, delta_t), params, KPowerSpec(k))
            verdicts[f"f{ratio:g}_k{k}"] = {"margin": rep.margin, "resolvable": rep.resolvable}
    meta = {"n": n, "r": r, "k": list(orders), "f_over_f0": list(ratios), "delta_t_f0": 1.0,
            "resolvability_vs_f0": verdicts}
    return csv_text(header, cols), meta


def repro_panels(fig: str) -> tuple[dict[str, str], dict, list[str]]:
    """Return ({file name: csv text}, per-panel parameters, notes)."""
    grid = DEFAULT_GRID
    panels, meta, notes = {}, {}, []
    if fig == "fig3a":
        panels["fig3a.csv"], meta["fig3a"] = _kpower_panel(2, 0.0, FIG3_ORDERS, grid)
    elif fig == "fig3b":
        panels["fig3b.csv"], meta["fig3b"] = _kpower_panel(10, 0.0, FIG3_ORDERS, grid)
        panels["fig3b_inset.csv"], meta["fig3b_inset"] = _kpower_panel(100, 0.0, FIG3_ORDERS, grid)
    elif fig == "fig3c":
        k_list = list(range(1, 101))
        header, cols = sweep_table(FIG3_N, k_list, 0.0)
        panels["fig3c.csv"] = csv_text(header, cols)
        fits = {}
        for n in (2, 10, 100):
            widths = [w for nn, w in zip(cols[0], cols[2]) if nn == n]
            fit = snl_fit(k_list, widths)
            fits[str(n)] = {"amplitude": fit.amplitude, "exponent": fit.exponent,
                            "max_relative_deviation": fit.max_relative_deviation}
        meta["fig3c"] = {"n": "2..200:2", "k": "1..100", "r": 0.0, "snl_fit": fits}
    elif fig == "fig3d":
        header, cols = sweep_table(FIG3_N, [100], 0.0)
        panels["fig3d.csv"] = csv_text(header, cols)
        meta["fig3d"] = {"n": "2..200:2", "k": [100], "r": 0.0}
    elif fig == "fig4":
        panels["fig4a.csv"], meta["fig4a"] = _lines_panel(2, 0.0, (0.8, 0.9, 1.0, 1.1, 1.2), (1,), grid)
        for name, k in (("fig4b", 1), ("fig4c", 10), ("fig4d", 100)):
            panels[f"{name}.csv"], meta[name] = _lines_panel(2, 0.0, (1.0, 0.8), (k,), grid)
        notes.append("envelope ratio r=0 assumed (no single-slit envelope)")
        notes.append(DELAY_NOTE)
    elif fig == "fig5":
        lines = (0.8, 0.9, 1.0)
        panels["fig5a.csv"], meta["fig5a"] = _lines_panel(10, 6.0, lines, (1,), grid)
        panels["fig5b.csv"], meta["fig5b"] = _lines_panel(100, 6.0, lines, (1,), grid)
        panels["fig5c.csv"], meta["fig5c"] = _lines_panel(100, 6.0, lines, (1, 10, 100), grid)
        panels["fig5d.csv"], meta["fig5d"] = _lines_panel(100, 6.0, (1.0, 0.99), (10, 100), grid)
        notes.append("envelope ratio r = beta/alpha = 6 taken as a pure ratio")
        notes.append(DELAY_NOTE)
    else:
        raise UsageError(f"unknown figure id {fig!r}")
    return panels, meta, notes


def cmd_repro(args) -> int:
    panels, meta, notes = repro_panels(args.figure)
    target = Path(args.out) if args.out else _out_dir(args) / args.figure
    files = {target / name: text for name, text in panels.items()}
    man = manifest("repro", {"figure": args.figure, "panels": meta}, files, notes=notes)
    files[target / "manifest.json"] = man
    write_atomic(files)
    print(str(target))
    return 0


# --- parser -------------------------------------------------------------------

def _add_out(p, fmt_choice=True):
    p.add_argument("--out", help="output file (default: derived name inside the output directory)")
    p.add_argument("--out-dir", help=f"output directory (default: ${OUT_DIR_ENV} or cwd)")
    if fmt_choice:
        p.add_argument("--format", choices=("csv", "json"), default="csv")


def _add_grid(p, default: PhaseGrid):
    p.add_argument("--start", type=_finite, help=f"first phase, rad (default {default.start:.6g})")
    p.add_argument("--end", type=_finite, help=f"last phase, rad (default {default.end:.6g})")
    p.add_argument("--points", type=_int_in(2), help=f"grid points (default {default.n_points})")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kpower", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"kpower {__version__} ({BACKEND})")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fringe", help="normalized K-th power N-slit fringe on a phase grid")
    p.add_argument("--n", type=_int_in(1), required=True, help="slit count N")
    p.add_argument("--k", type=_int_in(1, MAX_ORDER), default=1, help="intensity-product order K")
    p.add_argument("--r", type=_float_ge(0), default=0.0, help="envelope ratio b/a (0: no envelope)")
    _add_grid(p, DEFAULT_GRID)
    _add_out(p)
    p.set_defaults(func=cmd_fringe)

    p = sub.add_parser("sweep", help="exact FWHM table over N and K lists")
    p.add_argument("--n", type=_n_list, required=True, help="N list: 2,10 or 2..200:2")
    p.add_argument("--k", type=_k_list, required=True, help="K list: 1..100 or 1,10,100")
    p.add_argument("--r", type=_float_ge(0), default=0.0)
    _add_out(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("resolve", help="resolvability of two frequencies (JSON report)")
    p.add_argument("--f1-ratio", type=_float_ge(0, strict=True), required=True, help="f1 / f0")
    p.add_argument("--f0-hz", type=_float_ge(0, strict=True), default=1.0, help="reference frequency, Hz")
    p.add_argument("--delta-t", type=_float_ge(0, strict=True), help="arm delay, s (default 1/f0)")
    p.add_argument("--n", type=_int_in(1), required=True)
    p.add_argument("--k", type=_int_in(1, MAX_ORDER), default=1)
    p.add_argument("--r", type=_float_ge(0), default=0.0)
    _add_out(p, fmt_choice=False)
    p.set_defaults(func=cmd_resolve)

    p = sub.add_parser("noise", help="Poisson K-port product ensemble fringe")
    p.add_argument("--n", type=_int_in(1), required=True)
    p.add_argument("--k", type=_int_in(1, MAX_ORDER), default=2)
    p.add_argument("--r", type=_float_ge(0), default=0.0)
    p.add_argument("--mean", type=_float_ge(0, strict=True), default=1e5, help="mean photons per undivided sample")
    p.add_argument("--trials", type=_int_in(1), default=1000)
    p.add_argument("--seed", type=_int_in(0, 2**64 - 1), default=0)
    _add_grid(p, NOISE_GRID)
    _add_out(p)
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("repro", help="datasets for one figure panel set")
    p.add_argument("figure", choices=FIGURES)
    _add_out(p, fmt_choice=False)
    p.set_defaults(func=cmd_repro)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.exit(2, f"kpower {args.command}: error: {exc}\n")
    except KPowerError as exc:
        print(f"kpower {args.command}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"kpower {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
