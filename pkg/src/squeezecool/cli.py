"""Command-line client for the experiment service.

    squeezecool <single-sweep|continuum-sweep|oracle|validate>
                --config <path> --out <dir>
                [--backend gaussian|fock|both] [--jobs N] [--server URL]

The config file is YAML (JSON is accepted, being a YAML subset).  By default
the service runs in-process; pass --server to talk to a remote instance.
Exit codes: 0 success, 2 configuration/validation error, 3 validate-suite
failure, 1 anything else.  Errors are emitted as JSON on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import yaml

from .experiments import ExperimentResult, write_result

_COMMANDS = {
    "single-sweep": "single_sweep",
    "continuum-sweep": "continuum_sweep",
    "oracle": "oracle",
    "validate": "validate",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="squeezecool",
        description="Dissipative squeezing simulator: sweeps, oracle runs, validation",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd, kind in _COMMANDS.items():
        sp = sub.add_parser(cmd, help=f"run a {kind} experiment")
        sp.add_argument("--config", type=Path, required=True,
                        help="YAML config file (params block per experiment kind)")
        sp.add_argument("--out", type=Path, required=True, help="output directory")
        sp.add_argument("--backend", choices=["gaussian", "fock", "both"], default=None)
        sp.add_argument("--jobs", type=int, default=None,
                        help="parallel workers for sweep points")
        sp.add_argument("--server", default=None,
                        help="base URL of a running service (default: in-process)")
        sp.set_defaults(kind=kind)
    return parser


def _fail(code: int, **payload) -> int:
    print(json.dumps({"error": payload}, sort_keys=True), file=sys.stderr)
    return code


def _post(config: dict, server: str | None):
    if server:
        import httpx

        with httpx.Client(base_url=server, timeout=None) as client:
            return client.post("/experiments", json=config)
    from fastapi.testclient import TestClient

    from .service import app

    with TestClient(app) as client:
        return client.post("/experiments", json=config)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = yaml.safe_load(args.config.read_text()) or {}
    except (OSError, yaml.YAMLError) as exc:
        return _fail(2, stage="read_config", message=str(exc))
    if not isinstance(config, dict):
        return _fail(2, stage="read_config", message="config must be a mapping")
    file_kind = config.get("kind")
    if file_kind is not None and file_kind != args.kind:
        return _fail(2, stage="read_config",
                     message=f"config kind {file_kind!r} does not match subcommand {args.kind!r}")
    config["kind"] = args.kind
    if args.backend is not None:
        config["backend"] = args.backend
    if args.jobs is not None:
        config["jobs"] = args.jobs

    try:
        response = _post(config, args.server)
    except Exception as exc:  # connection errors etc.
        return _fail(1, stage="request", message=str(exc))
    if response.status_code != 200:
        try:
            detail = response.json()
        except Exception:
            detail = response.text
        return _fail(2, stage="run", status_code=response.status_code, detail=detail)

    result = ExperimentResult.model_validate(response.json())
    written = write_result(result, args.out)
    for path in written:
        print(path)
    if result.kind == "validate" and not result.manifest.get("all_passed", False):
        return _fail(3, stage="validate", message="invariant suite reported failures")
    return 0


if __name__ == "__main__":
    sys.exit(main())
