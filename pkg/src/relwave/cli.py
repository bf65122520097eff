"""Command-line front end.

Subcommands::

    relwave evolve CONFIG [--out DIR] [--format csv|json] [--threads N]
    relwave critical --family {psi1,psi2,psi3} (--tau T | --beta B)
    relwave convergence --equation dirac_linear [--mu0 M] [--steps H ...]
    relwave selftest
    relwave config-reference

Exit codes: 0 success, 2 configuration error, 3 selftest failure.
"""

import argparse
import json
import sys
import warnings
from pathlib import Path

from relwave import io
from relwave.config import ConfigError, load_config, reference_page

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SELFTEST = 3


def _json_out(doc, out):
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out:
        path = Path(out)
        if path.suffix != ".json":
            path.mkdir(parents=True, exist_ok=True)
            path = path / "report.json"
        path.write_text(text)
    else:
        sys.stdout.write(text)


def cmd_evolve(args):
    from relwave.scenario import run_scenario

    config_path = args.config_opt or args.config
    if config_path is None:
        raise ConfigError("config: pass a path (positional or --config)")
    if args.threads < 0:
        raise ConfigError("--threads: must be >= 0 (0 = one per CPU)")
    configs = load_config(config_path)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for cfg in configs:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            result = run_scenario(cfg, threads=args.threads)
        result.notes.extend(str(w.message) for w in caught)
        target = out / cfg.name if len(configs) > 1 else out
        target.mkdir(parents=True, exist_ok=True)
        doc = io.diagnostics_document(cfg, result)
        if cfg.outputs.snapshots:
            if args.format == "csv":
                names = []
                for i, (tau, field) in enumerate(result.snapshots):
                    name = io.snapshot_filename(cfg.name, i, tau)
                    io.write_snapshot_csv(target / name, field)
                    names.append(name)
                doc["snapshot_files"] = names
            else:
                records = [{"tau": tau, **io.snapshot_records(field)}
                           for tau, field in result.snapshots]
                (target / f"{cfg.name}_snapshots.json").write_text(
                    json.dumps({"schema_version": io.SCHEMA_VERSION, "snapshots": records}) + "\n")
        if cfg.outputs.diagnostics:
            io.write_diagnostics_json(target / f"{cfg.name}_diagnostics.json", doc)
        print(f"{cfg.name}: {len(result.snapshots)} snapshot(s) -> {target}")
    return EXIT_OK


def cmd_critical(args):
    from relwave.scenario import run_critical_search

    if args.family in ("psi3", "psi3_analytic"):
        if args.beta is None:
            raise ConfigError("--beta: required for the psi3 family")
    elif args.tau is None:
        raise ConfigError(f"--tau: required for the {args.family} family")
    _json_out(run_critical_search(args.family, tau=args.tau, beta=args.beta), args.out)
    return EXIT_OK


def cmd_convergence(args):
    from relwave.scenario import convergence_study, global_convergence_study

    if args.equation != "dirac_linear":
        raise ConfigError("--equation: only dirac_linear uses a split-step scheme")
    steps = tuple(args.steps)
    if len(steps) < 2 or any(h <= 0 for h in steps):
        raise ConfigError("--steps: need at least two positive step sizes")
    doc = {"local": convergence_study(args.mu0, steps=steps, beta=args.beta)}
    if args.total_tau:
        doc["global"] = global_convergence_study(args.mu0, total_tau=args.total_tau,
                                                 steps=steps, beta=args.beta)
    _json_out(doc, args.out)
    return EXIT_OK


def cmd_selftest(args):
    from relwave.acceptance import run_all

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        results = run_all()
    failed = [r for r in results if not r.passed]
    total = sum(r.seconds for r in results)
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed in {total:.1f}s")
    return EXIT_SELFTEST if failed else EXIT_OK


def cmd_reference(args):
    sys.stdout.write(reference_page())
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="relwave",
        description="Spectral evolution of relativistic heat, Salpeter, Dirac and "
                    "Klein-Gordon equations in 1+1 dimensions.",
        epilog="Config keys and defaults: `relwave config-reference`.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="run a scenario config",
                       description="Run every scenario in a YAML config. Defaults: grid "
                                   "4096 points over 80 Compton units, packet.normalize true, "
                                   "split.step_tau 0.01, peak threshold 1e-3.")
    p.add_argument("config", nargs="?", help="YAML scenario file")
    p.add_argument("--config", dest="config_opt", metavar="PATH", help="YAML scenario file")
    p.add_argument("--out", default="relwave_out", metavar="DIR",
                   help="output directory (default: %(default)s)")
    p.add_argument("--format", choices=("csv", "json"), default="csv",
                   help="snapshot format (default: %(default)s)")
    p.add_argument("--threads", type=int, default=1, metavar="N",
                   help="workers for independent snapshots, 0 = auto (default: %(default)s)")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("critical", help="two-peak critical parameters")
    p.add_argument("--family", required=True, choices=("psi1", "psi2", "psi3", "psi3_analytic"))
    p.add_argument("--tau", type=float, help="time for the psi1/psi2 beta_c search")
    p.add_argument("--beta", type=float, help="localization for the psi3 tau_c")
    p.add_argument("--out", metavar="PATH", help="write JSON here instead of stdout")
    p.set_defaults(func=cmd_critical)

    p = sub.add_parser("convergence", help="Zassenhaus split-step order study")
    p.add_argument("--equation", default="dirac_linear")
    p.add_argument("--mu0", type=float, default=0.5, help="(default: %(default)s)")
    p.add_argument("--beta", type=float, default=1.0, help="(default: %(default)s)")
    p.add_argument("--steps", type=float, nargs="+", default=[0.02, 0.01, 0.005],
                   help="step sizes (default: %(default)s)")
    p.add_argument("--total-tau", type=float, default=0.0,
                   help="also run a global Richardson study to this time")
    p.add_argument("--out", metavar="PATH", help="write JSON here instead of stdout")
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("selftest", help="run the acceptance checks")
    p.set_defaults(func=cmd_selftest)

    p = sub.add_parser("config-reference", help="print the config key reference")
    p.set_defaults(func=cmd_reference)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
