"""``sspdc`` command line: condition curves, solving, spectra and HOM fits.

Exit codes: 0 ok, 2 usage, 3 domain, 4 no solution, 5 fit did not converge.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

import numpy as np

from . import hom, phasematch, qstate
from .dispersion import DispersionFileError, DomainError, load_crystal
from .spdc_spectrum import SpectrumConfig, peak_positions, simulate_spectrum, write_spectrum_csv

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_NO_SOLUTION, EXIT_NO_CONVERGENCE = 0, 2, 3, 4, 5


class UsageError(Exception):
    pass


def _pair(text: str) -> tuple[float, float]:
    try:
        a, b = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'min,max', got {text!r}")
    if not a < b:
        raise argparse.ArgumentTypeError("range must be increasing")
    return a, b


def _triple(text: str) -> tuple[float, float, float]:
    try:
        a, b, c = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'min,max,step', got {text!r}")
    return a, b, c


def _g(v: float) -> str:
    return f"{v:.9g}"


def _write_text(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


# -- subcommands -------------------------------------------------------------


def cmd_condition_curve(args) -> int:
    model = load_crystal(args.crystal)
    lo, hi = args.range or model.wavelength_range
    temps = args.temp or [None]
    if temps == [None]:
        raise UsageError("at least one --temp is required")
    curves = [phasematch.condition_curve(model, T, (lo, hi), args.step) for T in temps]
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["x_um"] + [f"F_T{_g(T)}" for T in temps])
        for k, x in enumerate(curves[0].x):
            w.writerow([_g(x)] + [_g(c.values[k]) for c in curves])
    finally:
        if args.out:
            out.close()
    return EXIT_OK


def _emit_solutions(args, sols) -> None:
    phasematch.write_solutions_csv(sys.stdout, sols)
    if args.out:
        phasematch.write_solutions_csv(args.out, sols)


def cmd_solve(args) -> int:
    modes = [args.inv_lambda_c is not None, args.period is not None and args.pump is None,
             args.pump is not None]
    if sum(modes) != 1:
        raise UsageError("choose exactly one of --inv-lambda-c, --period or --pump")
    model = load_crystal(args.crystal)

    if args.inv_lambda_c is not None:
        if args.temp is None:
            raise UsageError("--inv-lambda-c needs --temp")
        sols = phasematch.solve_simultaneous(model, args.temp, args.inv_lambda_c)
    elif args.pump is None:
        t_range = args.temp_range or model.temperature_range
        curve = phasematch.tuning_curve_fixed_period(model, args.period, t_range, args.temp_step)
        sols = curve.solutions()
        for q in phasematch.find_degenerate_temperatures(model, args.period, t_range):
            print(f"# degenerate T_c={_g(q.temperature)} lambda_um={_g(q.lambda_s)}",
                  file=sys.stderr)
    else:
        if args.period_range is None:
            raise UsageError("--pump needs --period-range")
        lo, hi = args.period_range
        periods = lo + args.period_step * np.arange(int(np.floor((hi - lo) / args.period_step + 1e-9)) + 1)
        t_range = args.temp_range or model.temperature_range
        sols = phasematch.tuning_curve_fixed_pump(model, args.pump, periods, t_range).solutions()

    if not sols:
        print("no simultaneous solution for the given constraints", file=sys.stderr)
        return EXIT_NO_SOLUTION
    _emit_solutions(args, sols)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    model = load_crystal(args.crystal)
    cfg = SpectrumConfig(args.pump, args.pump_fwhm, args.period, args.temp, args.length,
                         args.grid, type0_floor=args.type0_floor)
    spec = simulate_spectrum(cfg, model)
    if args.out:
        write_spectrum_csv(args.out, spec)
    for lam, ch in peak_positions(spec, args.min_prominence):
        print(f"peak channel={ch} lambda_um={_g(lam)}")
    return EXIT_OK


def cmd_hom(args) -> int:
    if args.simulate == args.fit:
        raise UsageError("choose exactly one of --simulate or --fit")
    if args.simulate:
        params = hom.HomParams(args.visibility, args.beat, args.phase, args.coherence)
        step = args.step if args.step is not None else float(hom.stage_to_delay(args.stage_step_nm * 1e-3))
        fringe = hom.synthesize(params, tuple(args.range), step, args.far_counts, args.seed,
                                args.integration_time)
        if args.out:
            hom.write_fringe_csv(args.out, fringe)
        else:
            hom.write_fringe_csv(sys.stdout, fringe)
        return EXIT_OK

    if not args.input:
        raise UsageError("--fit needs --in")
    fringe = hom.read_fringe_csv(args.input, args.axis, args.far_counts)
    result = hom.fit(fringe)
    report = hom.format_fit_report(result)
    sys.stdout.write(report)
    if args.out:
        _write_text(args.out, report)

    p = None
    if args.p is not None:
        p = args.p
    elif args.singles is not None:
        p = qstate.balance_from_counts(*args.singles).p
    if p is not None:
        rho = qstate.density_matrix(p, result.params.visibility, result.params.phase_rad)
        dreport = qstate.format_density_report(rho)
        sys.stdout.write(dreport)
        dest = args.density_out or (f"{args.out}.rho.txt" if args.out else None)
        if dest:
            _write_text(dest, dreport)
    return EXIT_OK if result.converged else EXIT_NO_CONVERGENCE


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sspdc", description=__doc__.splitlines()[0])
    ap.add_argument("--verbose", action="store_true", help="log solver diagnostics")
    sub = ap.add_subparsers(dest="command", required=True)

    def crystal(p):
        p.add_argument("--crystal", default="ppslt",
                       help="coefficient file or bundled name (ppslt, ppln)")

    p = sub.add_parser("condition-curve", help="write F_T(x) samples")
    crystal(p)
    p.add_argument("--temp", type=float, action="append", help="degC; repeatable")
    p.add_argument("--range", type=_pair, help="x range in um, 'min,max'")
    p.add_argument("--step", type=float, default=1e-3, help="um")
    p.add_argument("--out")
    p.set_defaults(func=cmd_condition_curve)

    p = sub.add_parser("solve", help="simultaneous phase-matching solutions")
    crystal(p)
    p.add_argument("--temp", type=float, help="degC, with --inv-lambda-c")
    p.add_argument("--inv-lambda-c", type=float, help="condition level, 1/um")
    p.add_argument("--period", type=float, help="poling period in um (temperature sweep)")
    p.add_argument("--temp-range", type=_pair, help="degC 'min,max'")
    p.add_argument("--temp-step", type=float, default=0.5)
    p.add_argument("--pump", type=float, help="pump wavelength in um (period sweep)")
    p.add_argument("--period-range", type=_pair, help="um 'min,max'")
    p.add_argument("--period-step", type=float, default=0.1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("spectrum", help="simulate an s-SPDC spectrum")
    crystal(p)
    p.add_argument("--pump", type=float, required=True, help="um")
    p.add_argument("--pump-fwhm", type=float, default=0.001, help="um; 0 for a single line")
    p.add_argument("--period", type=float, required=True, help="um")
    p.add_argument("--temp", type=float, required=True, help="degC")
    p.add_argument("--length", type=float, default=11.0, help="crystal length in mm")
    p.add_argument("--grid", type=_triple, required=True, help="um 'min,max,step'")
    p.add_argument("--type0-floor", type=float, default=0.0,
                   help="constant added to the H channel before normalization")
    p.add_argument("--min-prominence", type=float, default=0.05)
    p.add_argument("--out")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("hom", help="simulate or fit an interferogram")
    p.add_argument("--simulate", action="store_true")
    p.add_argument("--fit", action="store_true")
    p.add_argument("--visibility", type=float, default=0.82)
    p.add_argument("--beat", type=float, default=13.5, help="THz")
    p.add_argument("--phase", type=float, default=0.205, help="rad")
    p.add_argument("--coherence", type=float, default=0.69, help="ps")
    p.add_argument("--range", type=_pair, default=(-1.0, 1.0), help="delay ps 'min,max'")
    p.add_argument("--step", type=float, help="delay step in ps")
    p.add_argument("--stage-step-nm", type=float, default=50.0,
                   help="stage step in nm (retro-reflected, used when --step is absent)")
    p.add_argument("--far-counts", type=float, help="C_F; simulate default 175")
    p.add_argument("--integration-time", type=float, help="s, metadata only")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--in", dest="input")
    p.add_argument("--axis", choices=("delay", "stage"), default="delay",
                   help="first CSV column: delay in ps or stage displacement in um")
    p.add_argument("--p", type=float, help="balance parameter for the density matrix")
    p.add_argument("--singles", type=_pair_any, help="singles 's1,s2' to estimate p")
    p.add_argument("--out")
    p.add_argument("--density-out")
    p.set_defaults(func=cmd_hom)
    return ap


def _pair_any(text: str) -> tuple[float, float]:
    try:
        a, b = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'a,b', got {text!r}")
    return a, b


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "command", None) == "hom" and args.simulate and args.far_counts is None:
        args.far_counts = 175.0
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))  # exits with 2
    except DispersionFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
