"""Command-line front end: ``mzscatter {derive,carpet,fringe,visibility,check}``."""

from __future__ import annotations

import argparse
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__, analytic
from .interferometer import Interferometer, density_carpet, signed_visibility
from .outputs import RunManifest, Timer, write_csv, write_matrix_csv, write_pgm
from .propagation import WrapAroundError, WrapAroundWarning
from .scattering import make_distribution
from .scenario import (ConfigError, InvalidParameterError, classify_region, derive, dp_from_y12prime,
                       dp_ratio_to_y12prime, fig1_setup, load_config)
from .wavefield import Grid1D, default_grid

DISTRIBUTIONS = ("point", "uniform", "mw", "gauss", "table")


class UsageError(ValueError):
    pass


def _range(text: str, count_kind=int):
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected start:stop:count, got {text!r}")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), count_kind(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}") from None
    if count < 1:
        raise argparse.ArgumentTypeError("count must be >= 1")
    return start, stop, count


def _span(text: str):
    parts = text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected start:stop, got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad span {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON config (SI units); default: reference sodium setup")
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")
    common.add_argument("--no-figures", action="store_true", help="skip the matplotlib PNGs")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--grid-n", type=int, help="grid points (power of two)")
    grid.add_argument("--grid-width", type=float, help="grid width in m")

    law = argparse.ArgumentParser(add_help=False)
    law.add_argument("--distribution", choices=DISTRIBUTIONS, default="point")
    law.add_argument("--N", type=float, default=1.0, help="Gaussian width in units of k_i")
    law.add_argument("--dkx-over-ki", type=float, default=0.0, help="kick for the point law, in units of k_i")
    law.add_argument("--table", type=Path, help="CSV 'dkx_over_ki,density' for --distribution table")
    law.add_argument("--nodes", type=int, default=64, help="quadrature nodes")
    law.add_argument("--scan-samples", type=int, default=16, help="grating-3 positions per period")

    ratio = argparse.ArgumentParser(add_help=False)
    g = ratio.add_mutually_exclusive_group()
    g.add_argument("--ratio", type=float, help="d_p / lambda_i")
    g.add_argument("--ratios", type=_range, help="start:stop:count of d_p / lambda_i")

    p = argparse.ArgumentParser(prog="mzscatter", description=__doc__)
    p.add_argument("--version", action="version", version=f"mzscatter {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("derive", parents=[common, ratio], help="print derived lengths")

    c = sub.add_parser("carpet", parents=[common, grid, ratio], help="density map |psi(x, y)|^2")
    c.add_argument("--y-range", type=_span, help="start:stop in m (default 0 to 3 event distances)")
    c.add_argument("--y-steps", type=int, default=200)
    c.add_argument("--dkx-over-ki", type=float, default=0.0)
    c.add_argument("--x-window", type=float, default=None, help="half-width of the written x range in m")
    c.add_argument("--columns", type=int, default=512, help="maximum number of x columns written")

    sub.add_parser("fringe", parents=[common, grid, law, ratio], help="grating-3 scan at one ratio")

    v = sub.add_parser("visibility", parents=[common, grid, law, ratio], help="visibility vs d_p / lambda_i")
    v.add_argument("--mode", choices=("numerical", "analytic", "both"), default="numerical")

    k = sub.add_parser("check", parents=[common], help="oracle suites (all acceptance checks with --full)")
    k.add_argument("--full", action="store_true")
    return p


def _setup(args):
    return load_config(args.config) if args.config else fig1_setup()


def _grid(args, setup):
    n, w = getattr(args, "grid_n", None), getattr(args, "grid_width", None)
    if n is None and w is None:
        return default_grid(setup)
    base = default_grid(setup)
    n = n or base.n
    w = w or n * base.dx
    return Grid1D(w, n)


def _ratios(args, default):
    if getattr(args, "ratio", None) is not None:
        return [args.ratio]
    if getattr(args, "ratios", None) is not None:
        a, b, n = args.ratios
        return list(np.linspace(a, b, n))
    return list(default)


def _distribution(args, setup):
    if args.distribution == "table" and args.table is None:
        raise UsageError("--distribution table needs --table <file>")
    return make_distribution(args.distribution, setup.k_i, N=args.N, dkx_over_ki=args.dkx_over_ki, table=args.table)


def _law_params(args) -> dict:
    out = {"distribution": args.distribution, "nodes": args.nodes, "scan_samples": args.scan_samples}
    if args.distribution == "gauss":
        out["N"] = args.N
    if args.distribution == "point":
        out["dkx_over_ki"] = args.dkx_over_ki
    if args.distribution == "table":
        out["table"] = Path(args.table).read_text()
    return out


def cmd_derive(args, out=None):
    out = out or sys.stdout
    setup = _setup(args)
    dq = derive(setup)
    w = out.write
    w(f"de Broglie wavelength   lambda   = {dq.de_broglie_wavelength:.6e} m\n")
    w(f"photon wavelength       lambda_i = {dq.photon_wavelength:.6e} m\n")
    w(f"Talbot length           L_T      = {dq.talbot_length * 1e3:.4f} mm\n")
    w(f"d_p per unit y'12                = {dq.path_separation_coefficient:.6e}\n")
    w(f"near-field bound        10 L_T   = {dq.near_field_bound * 1e3:.4f} mm\n")
    for r in _ratios(args, [0.3, 2.0]):
        yp = dp_ratio_to_y12prime(r, setup)
        w(f"d_p/lambda_i = {r:g}: y'12 = {yp * 1e3:.4f} mm ({classify_region(yp, setup).value.replace('_', ' ')})\n")
    return 0


def _manifest(args, setup, command, parameters):
    return RunManifest(command, setup.to_config(), parameters)


def _finish(man, args, paths, timer):
    man.outputs = [str(p) for p in paths]
    man.wall_time_s = round(timer.elapsed, 3)
    mp = man.write(args.out)
    for p in paths + [mp]:
        print(p)


def cmd_carpet(args):
    setup = _setup(args)
    grid = _grid(args, setup)
    if args.y_steps < 2:
        raise UsageError("--y-steps must be at least 2")
    ratio = args.ratio if args.ratio is not None else 0.3
    if args.ratios is not None:
        raise UsageError("carpet takes a single --ratio (event plane)")
    yp = dp_ratio_to_y12prime(ratio, setup)
    lt = derive(setup).talbot_length
    y0, y1 = args.y_range if args.y_range else (0.0, max(3 * yp, 3 * lt))
    if y1 <= y0:
        raise UsageError("--y-range needs start < stop")
    if y1 > setup.y12 + setup.y23:
        raise UsageError(f"--y-range must end at or before grating 3 ({setup.y12 + setup.y23:g} m)")
    dkx = args.dkx_over_ki * setup.k_i
    half = args.x_window if args.x_window else setup.n * setup.d
    params = {"grid": [grid.width, grid.n], "ratio": ratio, "dkx_over_ki": args.dkx_over_ki,
              "y_range": [y0, y1], "y_steps": args.y_steps, "x_window": half, "columns": args.columns}
    man = _manifest(args, setup, "carpet", params)
    with Timer() as t:
        ys = np.linspace(y0, y1, args.y_steps)
        dens = density_carpet(setup, grid, ys, dkx, yp)
        x = grid.x
        cols = np.flatnonzero(np.abs(x) <= half)
        stride = max(1, math.ceil(cols.size / args.columns))
        cols = cols[::stride]
        frame = dens[:, cols]
        top = frame.max()
        norm = frame / top if top > 0 else frame
        paths = [write_matrix_csv(args.out / "carpet.csv", x[cols], ys, norm, man.comment),
                 write_pgm(args.out / "carpet.pgm", norm[::-1], man.comment)]
        if not args.no_figures:
            from .plotting import plot_carpet
            paths.append(plot_carpet(args.out / "carpet.png", x[cols], ys, frame,
                                     f"dkx = {args.dkx_over_ki:g} k_i at y' = {yp * 1e3:.3f} mm"))
    _finish(man, args, paths, t)
    return 0


def cmd_fringe(args):
    setup = _setup(args)
    grid = _grid(args, setup)
    rs = _ratios(args, [0.3])
    if len(rs) != 1:
        raise UsageError("fringe takes a single --ratio")
    ratio = rs[0]
    dist = _distribution(args, setup)
    params = {"grid": [grid.width, grid.n], "ratio": ratio, **_law_params(args)}
    man = _manifest(args, setup, "fringe", params)
    with Timer() as t:
        eng = Interferometer(setup, grid)
        yp = dp_ratio_to_y12prime(ratio, setup)
        if yp >= setup.y12:
            raise UsageError(f"ratio {ratio:g} puts the event beyond grating 2")
        sc = eng.scan(dist, yp, args.scan_samples, args.nodes)
        off = eng.baseline(args.scan_samples)
        v, phi_rel = signed_visibility(sc.c1 / off.c1, dist.symmetry_center, dp_from_y12prime(yp, setup))
        footer = [f"mean={sc.mean!r}", f"amplitude={sc.amplitude!r}", f"phase_rad={sc.phase!r}",
                  f"residual={sc.residual!r}", f"A_off={off.amplitude!r}", f"phase_off_rad={off.phase!r}",
                  f"phase_rel_rad={phi_rel!r}", f"V_rel={v!r}", f"dp_over_lambda_i={ratio!r}"]
        paths = [write_csv(args.out / "fringe.csv", ["dx3_m", "T"], zip(sc.shifts, sc.T), man.comment, footer)]
        if not args.no_figures:
            from .plotting import plot_fringe
            paths.append(plot_fringe(args.out / "fringe.png", sc.shifts, sc.T, sc, setup.d))
    _finish(man, args, paths, t)
    return 0


def _analytic_point(kind, ratio, setup, args):
    dp = ratio * 2 * math.pi / setup.k_i
    if kind == "point":
        return 1.0, analytic.wrap_phase(dp * args.dkx_over_ki * setup.k_i)
    v, phi = analytic.analytic_curve(kind, [ratio], setup.k_i, args.N)
    return float(v[0]), float(phi[0])


def cmd_visibility(args):
    setup = _setup(args)
    rs = _ratios(args, np.linspace(0, 2, 20))
    if any(r < 0 for r in rs):
        raise UsageError("ratios must be non-negative")
    if args.mode != "numerical" and args.distribution == "table":
        raise UsageError("a tabulated distribution has no closed form; use --mode numerical")
    dist = _distribution(args, setup)
    Nval = args.N if args.distribution == "gauss" else ""
    params = {"ratios": [float(r) for r in rs], "mode": args.mode, **_law_params(args)}
    grid = None
    if args.mode != "analytic":
        grid = _grid(args, setup)
        params["grid"] = [grid.width, grid.n]
    man = _manifest(args, setup, "visibility", params)
    with Timer() as t:
        ana = [_analytic_point(args.distribution, r, setup, args) for r in rs] if args.mode != "numerical" else None
        num = None
        if args.mode != "analytic":
            eng = Interferometer(setup, grid)
            num = [eng.visibility(dist, r, args.scan_samples, args.nodes) for r in rs]
        path = args.out / "visibility.csv"
        if args.mode == "analytic":
            rows = [(r, v, p, args.distribution, Nval) for r, (v, p) in zip(rs, ana)]
            write_csv(path, ["dp_over_lambda_i", "V", "phi_rad", "distribution", "N"], rows, man.comment)
        else:
            header = ["dp_over_lambda_i", "V_rel", "abs_V", "phi_rad", "residual", "A_on", "A_off"]
            rows = [[p.ratio, p.V_rel, p.abs_V, p.phi, p.residual, p.A_on, p.A_off] for p in num]
            if args.mode == "both":
                header += ["V_analytic", "phi_analytic_rad", "dV"]
                for row, (v, ph) in zip(rows, ana):
                    row += [v, ph, row[1] - v]
            write_csv(path, header, rows, man.comment,
                      footer=[f"distribution={args.distribution}", f"N={Nval}"])
        paths = [path]
        if not args.no_figures:
            from .plotting import plot_visibility
            paths.append(plot_visibility(args.out / "visibility.png", rs,
                                         None if num is None else [p.V_rel for p in num],
                                         None if ana is None else [a[0] for a in ana],
                                         args.distribution + (f", N = {args.N:g}" if Nval != "" else "")))
    _finish(man, args, paths, t)
    return 0


def cmd_check(args):
    from . import acceptance
    numbers = sorted(acceptance.CRITERIA) if args.full else acceptance.FAST
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WrapAroundWarning)
        results = acceptance.run(numbers)
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else 0


COMMANDS = {"derive": cmd_derive, "carpet": cmd_carpet, "fringe": cmd_fringe,
            "visibility": cmd_visibility, "check": cmd_check}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if hasattr(args, "out"):
        args.out.mkdir(parents=True, exist_ok=True)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, UsageError, InvalidParameterError, WrapAroundError, OSError, ValueError) as exc:
        print(f"mzscatter {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
