"""Command line entry point: radii, campaign, decode, gen."""

from __future__ import annotations

import argparse
import logging
import sys

from .harness import (
    CampaignConfig,
    ConfigError,
    InstanceFormatError,
    format_instance,
    format_radius_table,
    generate_instance,
    load_config,
    parse_instance,
    run_campaign,
)
from .keyeq import reconstruct_fraction
from .plswe import GenerationError, algorithm1
from .srfr import DecodingFailure, decode_srfr, radius_bk

EXIT_OK = 0
EXIT_EXCEEDED = 2
EXIT_DECODE_FAILURE = 3
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _fmt_poly(p) -> str:
    return " ".join(map(str, p.coeffs)) if p.coeffs else "0"


def cmd_radii(args) -> int:
    print(format_radius_table(load_config(args.config)))
    return EXIT_OK


def cmd_campaign(args) -> int:
    config = load_config(args.config)
    result = run_campaign(config, csv_path=args.out, workers=args.workers)
    if args.out is None:
        sys.stdout.write(result.to_csv())
    else:
        for row in result.rows:
            print(f"eps={row['eps']}: {row['recovered']} recovered, {row['wrong']} wrong, "
                  f"{row['empty']} empty, {row['exceeded_detected']} exceeded; "
                  f"failure rate {row['empirical_failure_rate']} (bound {row['theoretical_bound']})")
    return EXIT_OK


def cmd_decode(args) -> int:
    with open(args.instance) as fh:
        inst = parse_instance(fh.read())
    if inst.oblivious:
        out = algorithm1(inst.obs, inst.params)
        if out.exceeded:
            print("exceeded: |E| is above both oblivious radii")
            return EXIT_EXCEEDED
        print(f"stage {out.stage}")
        for i, phi in enumerate(out.solution.phis, 1):
            print(f"phi_{i}: {_fmt_poly(phi)}")
        print(f"psi: {_fmt_poly(out.solution.psi)}")
        if out.solution.psi.is_zero():
            return EXIT_DECODE_FAILURE
        rv = reconstruct_fraction(out.solution)
    else:
        try:
            rv = decode_srfr(inst.obs, inst.params)
        except DecodingFailure as exc:
            print(f"decode failure: {exc}", file=sys.stderr)
            return EXIT_DECODE_FAILURE
    for i, fi in enumerate(rv.f, 1):
        print(f"f_{i}: {_fmt_poly(fi)}")
    print(f"g: {_fmt_poly(rv.g)}")
    return EXIT_OK


def cmd_gen(args) -> int:
    mode = "adversarial" if args.variant else args.mode
    try:
        config = CampaignConfig(
            q=args.q, l=args.l, n=args.n, d_f=args.d_f, d_g=args.d_g,
            error_counts=(args.eps,), trials=1, seed=args.seed, mode=mode,
            deg_f=args.deg_f, deg_g=args.deg_g, deg_A=args.deg_A, deg_b=args.deg_b,
            d_A=args.d_A if args.d_A is not None else args.deg_A,
            d_b=args.d_b if args.d_b is not None else args.deg_b,
        )
    except ConfigError as exc:
        raise UsageError(str(exc)) from None
    obs, params, rv, E = generate_instance(config, args.eps, variant=args.variant)
    text = format_instance(obs, params)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.show_truth:
        print(f"# E: {' '.join(map(str, sorted(E)))}", file=sys.stderr)
        for i, fi in enumerate(rv.f, 1):
            print(f"# f_{i}: {_fmt_poly(fi)}", file=sys.stderr)
        print(f"# g: {_fmt_poly(rv.g)}", file=sys.stderr)
        print(f"# eps_bk: {radius_bk(config.n, config.d_f, config.d_g)}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ratrecover", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("radii", help="print every decoding radius for a config")
    r.add_argument("config")
    r.set_defaults(func=cmd_radii)

    c = sub.add_parser("campaign", help="run a Monte Carlo campaign")
    c.add_argument("config")
    c.add_argument("-o", "--out", help="CSV output path (default: stdout)")
    c.add_argument("-j", "--workers", type=int, default=1)
    c.set_defaults(func=cmd_campaign)

    d = sub.add_parser("decode", help="decode one instance file")
    d.add_argument("instance")
    d.set_defaults(func=cmd_decode)

    g = sub.add_parser("gen", help="emit a random or adversarial instance file")
    g.add_argument("--mode", choices=("srfr", "plswe"), default="srfr")
    g.add_argument("--variant", choices=("N1", "N2"), help="emit the maximal-rank instance instead")
    g.add_argument("--q", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--l", type=int, default=1)
    g.add_argument("--d-f", dest="d_f", type=int, required=True)
    g.add_argument("--d-g", dest="d_g", type=int, required=True)
    g.add_argument("--deg-f", dest="deg_f", type=int)
    g.add_argument("--deg-g", dest="deg_g", type=int)
    g.add_argument("--deg-A", dest="deg_A", type=int, default=0)
    g.add_argument("--deg-b", dest="deg_b", type=int, default=0)
    g.add_argument("--d-A", dest="d_A", type=int)
    g.add_argument("--d-b", dest="d_b", type=int)
    g.add_argument("--eps", type=int, required=True, help="error bound; exactly eps positions are corrupted")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output")
    g.add_argument("--show-truth", action="store_true", help="print E, f and g to stderr")
    g.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, InstanceFormatError, UsageError, FileNotFoundError) as exc:
        print(f"ratrecover: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GenerationError as exc:
        print(f"ratrecover: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
