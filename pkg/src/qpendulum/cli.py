"""Command-line front end: ``qpendulum spectrum | figure | selftest``."""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .figures import FIGURES, build_figure, spectrum_dataset, to_csv, to_json
from .mathieu import ConvergenceError, mathieu_spectrum, spectrum
from .model import NOMINAL, Parity, PendulumConfig, load_config
from .selftest import CHECKS, run

EXIT_FLAGS = 2
EXIT_CONVERGENCE = 3

_PHYSICAL = ("hbar", "mass", "length", "v0")


class _Parser(argparse.ArgumentParser):
    # argparse already exits with 2; keep the message on stderr and the code explicit
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_FLAGS, f"{self.prog}: error: {message}\n")


def _add_common(p):
    g = p.add_argument_group("configuration")
    for name in _PHYSICAL:
        g.add_argument(f"--{name}", type=float, default=None)
    g.add_argument("--q", type=float, default=None, help="Mathieu parameter (excludes the physical flags)")
    g.add_argument("--config", help="key=value file with hbar, mass, length, v0")
    p.add_argument("--tol", type=float, default=1e-10, help="absolute tolerance on a")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qpendulum", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("spectrum", help="characteristic values and energies")
    _add_common(sp)
    sp.add_argument("--count", type=int, default=40)
    sp.add_argument("--parity", choices=[p.value for p in Parity])
    sp.add_argument("--frame", choices=("physical", "mathieu"), default="physical")

    fp = sub.add_parser("figure", help="dataset behind one figure")
    fp.add_argument("figure_id", choices=sorted(FIGURES))
    _add_common(fp)
    fp.add_argument("--count", type=int, default=None)
    fp.add_argument("--order", type=int, default=None)
    fp.add_argument("--q-max", type=float, default=None)
    fp.add_argument("--q-points", type=int, default=None)

    tp = sub.add_parser("selftest", help="perturbation-engine benchmarks")
    tp.add_argument("--benchmark", choices=["all", *CHECKS], default="all")
    return parser


def resolve_config(args) -> PendulumConfig | None:
    """Config from flags; None when only ``--q`` is given."""
    physical = {k: getattr(args, k) for k in _PHYSICAL if getattr(args, k) is not None}
    if args.q is not None and (physical or args.config):
        raise ValueError("--q cannot be combined with --hbar/--mass/--length/--v0/--config")
    if args.q is not None:
        if args.q < 0:
            raise ValueError("--q must be non-negative")
        return None
    base = load_config(args.config) if args.config else NOMINAL
    fields = base.as_dict()
    fields.update(physical)
    return PendulumConfig(**{k: fields[k] for k in _PHYSICAL})


def _emit(dataset, args):
    text = to_json(dataset) if args.format == "json" else to_csv(dataset)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_spectrum(args):
    if args.count < 1:
        raise ValueError("--count must be positive")
    cfg = resolve_config(args)
    if cfg is None:
        # Mathieu frame only: energies on the default scale E = a/4
        table = mathieu_spectrum(args.q, args.count, tol=args.tol)
    else:
        table = spectrum(cfg, args.count, args.tol)
    _emit(spectrum_dataset(table, args.frame, args.parity), args)
    return 0


def _cmd_figure(args):
    cfg = resolve_config(args)
    if cfg is None:
        cfg = PendulumConfig.from_q(args.q) if args.q > 0 else None
        if cfg is None:
            raise ValueError("figures need q > 0")
    options = dict(count=args.count, order=args.order, tol=args.tol, q_max=args.q_max, q_points=args.q_points)
    _emit(build_figure(args.figure_id, cfg, **options), args)
    return 0


def _cmd_selftest(args):
    results = run([args.benchmark])
    ok = all(r["passed"] for r in results)
    json.dump({"passed": ok, "checks": results}, sys.stdout, indent=1, default=float)
    sys.stdout.write("\n")
    return 0 if ok else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"spectrum": _cmd_spectrum, "figure": _cmd_figure, "selftest": _cmd_selftest}[args.command]
    try:
        return handler(args)
    except ConvergenceError as exc:
        print(f"qpendulum: solver did not converge: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except ValueError as exc:
        print(f"qpendulum: {exc}", file=sys.stderr)
        return EXIT_FLAGS


if __name__ == "__main__":
    sys.exit(main())
