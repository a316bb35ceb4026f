"""Command line entry point: ``dressedopto {simulate,tune,analytic}``."""
from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import analytic, scenarios
from .dressed import tune_resonance
from .errors import IntegrationUnstable, InvalidArgument, NotFound, NumericalError
from .hamiltonian import SystemParams

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNCONVERGED = 3


def _parse_override(text: str):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    key, value = text.split("=", 1)
    return key.strip(), value.strip()


def _parse_scan(text: str):
    try:
        lo, hi, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi:step, got {text!r}") from None
    return lo, hi, step


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dressedopto", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a preset or configured scenario")
    sim.add_argument("--preset", choices=sorted(scenarios.PRESETS))
    sim.add_argument("--config", help="key = value file applied on top of the preset")
    sim.add_argument("--output", help="CSV path (default: $%s/<name>.csv)" % scenarios.OUTPUT_DIR_ENV)
    sim.add_argument("--override", action="append", type=_parse_override, default=[],
                     metavar="KEY=VALUE", help="set a config key; repeatable")
    sim.add_argument("--epsilon", type=float)
    sim.add_argument("--t-max-kappa-units", type=float)
    sim.add_argument("--no-converge-check", action="store_true")

    tune = sub.add_parser("tune", help="print the resonance-tuned omega1")
    tune.add_argument("--epsilon", type=float, required=True)
    tune.add_argument("--scan", type=_parse_scan, default=(0.49, 0.52, 1e-3), metavar="LO:HI:STEP")
    tune.add_argument("--omega2", type=float, default=1.0)
    tune.add_argument("--omega-wall", type=float, default=1.0)

    an = sub.add_parser("analytic", help="emit a closed-form quadrature series as CSV")
    an.add_argument("--formula", choices=sorted(analytic.FORMULAS), required=True)
    an.add_argument("--t-max", type=float, required=True)
    an.add_argument("--dt", type=float, default=0.05)
    an.add_argument("--epsilon", type=float, default=0.05)
    an.add_argument("--amplitude", type=float, default=1.0, help="coherent amplitude of mode 1")
    an.add_argument("--omega1", type=float, default=0.5)
    an.add_argument("--omega2", type=float, default=1.0)
    an.add_argument("--omega-wall", type=float, default=1.0)
    an.add_argument("--output", help="CSV path (default: stdout)")
    return p


def _simulate(args) -> int:
    base = scenarios.preset(args.preset) if args.preset else None
    if args.config:
        # a preset named inside the file applies only when --preset is absent
        config = scenarios.load_config(args.config, base)
    else:
        config = base or scenarios.ScenarioConfig()
    flags = dict(args.override)
    if args.epsilon is not None:
        flags["epsilon"] = args.epsilon
    if args.t_max_kappa_units is not None:
        flags["t_max_kappa_units"] = args.t_max_kappa_units
    if args.no_converge_check:
        flags["converge_check"] = "false"
    if args.output:
        flags["output_path"] = args.output
    config = scenarios.apply_overrides(config, flags)
    if not config.output_path:
        config = scenarios.apply_overrides(
            config, {"output_path": scenarios.default_output_path(config.name)})

    result = scenarios.run(config)
    print(f"scenario {config.name}: omega1 = {result.omega1:.6g}, t_f = {result.t_f:.6g}"
          f" (kappa_ref t_f = {config.kappa_ref * result.t_f:.4g})")
    for key, value in result.steady.items():
        print(f"  {key:8s} {value: .10g}")
    if result.n_dropped:
        print(f"  dropped {result.n_dropped} degenerate transition pairs")
    if result.convergence is not None:
        rep = result.convergence
        print(f"  convergence gate at cutoffs {rep.cutoffs}, M = {rep.dressed_M}: "
              f"max drift {rep.max_drift:.3%}")
    for w in result.warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(f"wrote {config.output_path}")
    return EXIT_OK if result.converged else EXIT_UNCONVERGED


def _tune(args) -> int:
    lo, hi, step = args.scan
    params = SystemParams(epsilon=args.epsilon, omega2=args.omega2, Omega=args.omega_wall)
    print(f"{tune_resonance(params, lo, hi, step):.6f}")
    return EXIT_OK


def _analytic(args) -> int:
    p = analytic.AppendixParams(omega1=args.omega1, omega2=args.omega2, Omega=args.omega_wall,
                                epsilon=args.epsilon, F=args.amplitude)
    if not args.t_max > 0 or not args.dt > 0:
        raise InvalidArgument("--t-max and --dt must be > 0")
    t = args.dt * np.arange(int(round(args.t_max / args.dt)) + 1)
    x = analytic.FORMULAS[args.formula](t, p)
    text = "t,value\n" + "".join(f"{a:.17g},{b:.17g}\n" for a, b in zip(t, x))
    if args.output:
        with open(args.output, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"simulate": _simulate, "tune": _tune, "analytic": _analytic}[args.command]
    try:
        return handler(args)
    except (InvalidArgument, NotFound, NumericalError, OSError) as e:
        kind = "integration unstable" if isinstance(e, IntegrationUnstable) else "error"
        print(f"{kind}: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
