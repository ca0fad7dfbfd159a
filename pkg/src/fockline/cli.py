"""Command-line front-end: ``fockline {ideal,sweep,decompose,rates,fluctuate}``."""

from __future__ import annotations

import argparse
import math
import sys
from typing import Sequence

from .channels import db_to_reflectivity
from .experiments import (
    SWEEP_COLUMNS,
    FluctuationSpec,
    LossPoint,
    SweepSpec,
    emit_table,
    fluctuation_mc,
    format_table,
    run_sweep,
)
from .fock import InvariantViolation
from .measures import log_negativity, log_negativity_pure_closed, qfi_pure
from .protocol import (
    PRINTED_HEADLINE_RATE_HZ,
    SIGNAL_SPLIT,
    efficiency,
    success_probability,
    success_rate,
    symmetric_decomposition,
    vacuum_probability,
)

EXIT_OK, EXIT_USAGE, EXIT_INVARIANT = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _db(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed dB value {text!r}") from None
    if not (math.isfinite(value) and value >= 0):
        raise argparse.ArgumentTypeError(f"malformed dB value {text!r}: must be finite and >= 0")
    return value


def _reflectivity(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed reflectivity {text!r}") from None
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"reflectivity {text!r} outside [0, 1]")
    return value


def _point(text: str) -> LossPoint:
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(f"grid point {text!r} must be r_a2,r_b2,r_s,r_d")
    return LossPoint(*(_reflectivity(p) for p in parts))


def _positive(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed number {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"{text!r} must be positive")
    return value


def _write(text: str, path: str | None, rows=None, columns=SWEEP_COLUMNS) -> None:
    if path:
        emit_table(rows, path, columns)
    else:
        sys.stdout.write(text)


def _cmd_ideal(args) -> int:
    rows = [{"k": k, "e_n": log_negativity_pure_closed(args.S, k), "qfi": qfi_pure(args.S, k)} for k in range(args.S + 1)]
    columns = ("k", "e_n", "qfi")
    _write(format_table(rows, columns), args.out, rows, columns)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    if args.point:
        grid = tuple(args.point)
    else:
        grid = tuple(LossPoint.from_db(db, args.r_s, args.r_d) for db in (args.db or [0.0]))
    k_set = tuple(range(args.sigma + 1)) if args.k is None else tuple(args.k)
    spec = SweepSpec(g=args.g, sigma=args.sigma, k_set=k_set, grid=grid, mode=args.mode, output_path=args.out)
    rows = run_sweep(spec)
    _write(format_table(rows), args.out, rows)
    return EXIT_OK


def _cmd_decompose(args) -> int:
    r = args.r if args.r is not None else db_to_reflectivity(args.db or 0.0)
    decomposition = symmetric_decomposition(args.g, r, args.sigma, args.k, args.s_max)
    total = sum(term.chi for term in decomposition.terms)
    rows = []
    for term in decomposition.terms:
        rho = term.rho_int
        rows.append(
            {
                "S": term.S,
                "chi": term.chi,
                "chi_fraction": term.chi / total if total > 0 else 0.0,
                "e_n_int": log_negativity(rho.normalized(), SIGNAL_SPLIT),
            }
        )
    columns = ("S", "chi", "chi_fraction", "e_n_int")
    _write(format_table(rows, columns), args.out, rows, columns)
    return EXIT_OK


def _cmd_rates(args) -> int:
    r_a = db_to_reflectivity(args.db)
    r_b = db_to_reflectivity(args.db if args.db_b is None else args.db_b)
    lines = []
    for S in args.S:
        p = efficiency(args.g, S)
        lines.append(f"efficiency_S{S}: {p:.12g}")
        lines.append(f"rate_S{S}_hz: {p * args.frep:.12g}")
        lines.append(f"rate_S{S}_per_minute: {60 * p * args.frep:.12g}")
    p_vac = vacuum_probability(args.g, r_a, r_b)
    p_success = success_probability(args.g, r_a, r_b)
    rate = success_rate(args.g, r_a, r_b, args.frep)
    lines.append(f"vacuum_probability: {p_vac:.12g}")
    lines.append(f"p_success: {p_success:.12g}")
    lines.append(f"success_rate_hz: {rate:.12g}")
    lines.append(
        f"note: a headline rate of {PRINTED_HEADLINE_RATE_HZ:g} Hz is sometimes quoted for these inputs;"
        f" p_success times the repetition rate gives {rate:.3g} Hz"
    )
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def _cmd_fluctuate(args) -> int:
    k_set = (0, 1, 2) if args.k is None else tuple(args.k)
    spec = FluctuationSpec(
        mean_attenuation_db=args.mean_db,
        spread_db=args.spread_db,
        samples=args.samples,
        t_b2_db=args.tb2_db,
        seed=args.seed,
        g=args.g,
        sigma=args.sigma,
        k_set=k_set,
        both=args.both,
    )
    summaries = fluctuation_mc(spec)
    rows = [
        {"k": s.k, "mean": s.mean, "min": s.min, "max": s.max, "no_fluctuation": s.reference, "gap": s.gap}
        for s in summaries
    ]
    columns = ("k", "mean", "min", "max", "no_fluctuation", "gap")
    _write(format_table(rows, columns), args.out, rows, columns)
    if args.samples_out:
        sample_rows = [{"k": s.k, "sample": i, "e_n": v} for s in summaries for i, v in enumerate(s.values)]
        emit_table(sample_rows, args.samples_out, ("k", "sample", "e_n"))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fockline", description="Multiphoton entanglement swapping with a generalized Bell measurement.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ideal", help="lossless E_N and QFI per readout k")
    p.add_argument("--S", type=int, default=4, help="total detected photons (default 4)")
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.set_defaults(func=_cmd_ideal)

    p = sub.add_parser("sweep", help="E_N and click probability over a loss grid")
    p.add_argument("--g", type=_positive, default=0.1, help="parametric gain (default 0.1)")
    p.add_argument("--sigma", type=int, default=4, help="detected photon total (default 4)")
    p.add_argument("--k", type=int, nargs="*", help="readouts k (default 0..sigma)")
    grid = p.add_mutually_exclusive_group()
    grid.add_argument("--db", type=_db, nargs="+", help="symmetric idler attenuations in dB")
    grid.add_argument("--point", type=_point, nargs="+", help="explicit points r_a2,r_b2,r_s,r_d")
    p.add_argument("--r-s", type=_reflectivity, default=0.0, help="signal reflectivity for --db grids")
    p.add_argument("--r-d", type=_reflectivity, default=0.0, help="detector reflectivity for --db grids")
    p.add_argument("--mode", choices=("full_sim", "closed_form"), default="full_sim")
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("decompose", help="chi weights and E_N of the blocks of the symmetric-loss state")
    p.add_argument("--g", type=_positive, default=0.1)
    loss = p.add_mutually_exclusive_group()
    loss.add_argument("--r", type=_reflectivity, help="symmetric idler reflectivity")
    loss.add_argument("--db", type=_db, help="symmetric idler attenuation in dB")
    p.add_argument("--sigma", type=int, default=2)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--s-max", type=int, help="largest block S (default: enough for 1 - 1e-10 of the weight)")
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("rates", help="ideal efficiency, vacuum probability and success rate")
    p.add_argument("--g", type=_positive, default=0.1)
    p.add_argument("--db", type=_db, default=80.0, help="idler attenuation on Alice's side in dB")
    p.add_argument("--db-b", type=_db, help="idler attenuation on Bob's side (default: same as --db)")
    p.add_argument("--frep", type=_positive, default=80e6, help="pump repetition rate in Hz")
    p.add_argument("--S", type=int, nargs="+", default=[2, 4], help="photon numbers for the efficiency lines")
    p.set_defaults(func=_cmd_rates)

    p = sub.add_parser("fluctuate", help="Monte Carlo over normally distributed idler attenuation")
    p.add_argument("--g", type=_positive, default=0.1)
    p.add_argument("--sigma", type=int, default=4)
    p.add_argument("--k", type=int, nargs="*", help="readouts k (default 0 1 2)")
    p.add_argument("--mean-db", type=_db, default=80.0)
    p.add_argument("--spread-db", type=_db, default=1.0, help="standard deviation in dB")
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tb2-db", type=_db, help="Bob's fixed attenuation in dB (default: the mean)")
    p.add_argument("--both", action="store_true", help="draw Bob's attenuation independently as well")
    p.add_argument("--out", help="write the summary CSV here instead of stdout")
    p.add_argument("--samples-out", help="also write per-sample E_N values here")
    p.set_defaults(func=_cmd_fluctuate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except InvariantViolation as exc:
        print(f"fockline: invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ValueError, OSError) as exc:
        print(f"fockline: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
