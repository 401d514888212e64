"""Command-line front end: run scenarios, verify the acceptance criteria."""
from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from .errors import ConfigError, PilotwaveError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CRITERION = 3


def _examples_dir():
    return resources.files("pilotwave") / "examples"


def _bundled() -> dict[str, Path]:
    return {p.name[:-len(".yaml")]: Path(str(p))
            for p in sorted(_examples_dir().iterdir(), key=lambda p: p.name)
            if p.name.endswith(".yaml")}


def _resolve_scenario(arg: str) -> Path:
    path = Path(arg)
    if path.exists():
        return path
    bundled = _bundled()
    if arg in bundled:
        return bundled[arg]
    raise ConfigError(arg, "no such file and no bundled scenario by that name")


def _limit_threads(n: int | None):
    if n is None:
        return
    try:
        from threadpoolctl import threadpool_limits
        threadpool_limits(limits=n)
    except ImportError:
        import os
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = str(n)


def cmd_run(args) -> int:
    from .scenarios import ScenarioConfig, run_scenario
    path = _resolve_scenario(args.scenario)
    config = ScenarioConfig.from_file(path)
    manifest = run_scenario(config, args.out, seed=args.seed)
    print(f"{config.kind}/{config.name}: wrote {len(manifest.files)} files "
          f"to {Path(args.out) / config.name} in {manifest.wall_time_s:.1f} s")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .acceptance import format_report, verify_all
    results = verify_all()
    print(format_report(results))
    if args.report:
        payload = [{"cid": r.cid, "name": r.name, "passed": r.passed,
                    "tolerance": r.tolerance, "seconds": r.seconds,
                    "measured": r.measured} for r in results]
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "verify_report.json", "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True, default=float)
            fh.write("\n")
        print(f"detailed report: {out / 'verify_report.json'}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_CRITERION


def cmd_list(args) -> int:
    from .scenarios import ScenarioConfig
    for name, path in _bundled().items():
        cfg = ScenarioConfig.from_file(path)
        print(f"{name:<28} [{cfg.kind}]")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pilotwave",
        description="Pilot-wave beam-splitter laboratory")
    parser.add_argument("--out", default="out", metavar="DIR",
                        help="output directory (default: ./out)")
    parser.add_argument("--seed", type=int, default=None, metavar="N",
                        help="override the scenario RNG seed")
    parser.add_argument("--threads", type=int, default=None, metavar="N",
                        help="cap BLAS/OpenMP worker threads")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario file (or bundled name)")
    p_run.add_argument("scenario", help="path to a scenario YAML, or a bundled name")
    p_run.set_defaults(fn=cmd_run)

    p_verify = sub.add_parser("verify", help="execute the acceptance criteria")
    p_verify.add_argument("--report", action="store_true",
                          help="also write verify_report.json under --out")
    p_verify.set_defaults(fn=cmd_verify)

    p_list = sub.add_parser("list-scenarios", help="list bundled scenarios")
    p_list.set_defaults(fn=cmd_list)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _limit_threads(args.threads)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PilotwaveError as exc:
        print(f"run failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CRITERION


if __name__ == "__main__":
    sys.exit(main())
