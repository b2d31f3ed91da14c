"""Command-line entry point: ``gaussym run|verify|plot``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .errors import GaussymError
from .experiments import ExperimentConfig, ExperimentKind, load_config, run
from .plotting import PlotStyle, emit_plot

log = logging.getLogger("gaussym")


def _report(rep):
    for f in rep.files:
        log.info("wrote %s", f)
    for name, value in rep.values.items():
        print(f"{name}: {value}")
    if rep.failures:
        print(f"{len(rep.failures)} check(s) failed; see {rep.output_dir / 'failures.json'}",
              file=sys.stderr)
        for c in rep.failures[:20]:
            print(f"  FAIL {c.name}: residual {c.residual:.3e} > {c.tolerance:.3e}",
                  file=sys.stderr)
        return 1
    print(f"all {len(rep.checks)} checks passed")
    return 0


def _cmd_run(args):
    cfg = load_config(args.config)
    if args.output_dir is not None:
        cfg = ExperimentConfig(cfg.kind, cfg.parameters, Path(args.output_dir))
    return _report(run(cfg))


def _cmd_verify(args):
    doc = {"kind": ExperimentKind.VERIFY_SUITE.value,
           "parameters": {"seed": args.seed, "n_states": args.n_states}}
    if args.output_dir is not None:
        doc["output_dir"] = args.output_dir
    return _report(run(ExperimentConfig.from_mapping(doc)))


def _cmd_plot(args):
    out = emit_plot(args.csv, args.style, out=args.out)
    print(out)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gaussym", description="Gaussian entanglement asymmetry experiments")
    parser.add_argument("-v", "--verbose", action="store_true", help="log written files")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run an experiment described by a YAML config")
    p.add_argument("config", type=Path)
    p.add_argument("-o", "--output-dir", default=None, help="override the config's output_dir")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("verify", help="run the oracle and property suite")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n-states", type=int, default=100, help="random states per subsystem size")
    p.add_argument("-o", "--output-dir", default=None)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("plot", help="render a CSV table to SVG")
    p.add_argument("csv", type=Path)
    p.add_argument("--style", choices=[s.value for s in PlotStyle], default="lines")
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=_cmd_plot)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s")
    try:
        return args.func(args)
    except GaussymError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
