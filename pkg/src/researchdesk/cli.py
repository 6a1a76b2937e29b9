"""Command-line entry points: serve the API, check the pipeline wiring."""

from __future__ import annotations

import argparse
import sys

from .config import ServiceConfig, build_components
from .registry import validate_pipeline


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="researchdesk",
        description="Research assistant platform service and utilities",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP service (config via RESEARCHDESK_* env)")
    serve.add_argument("--host", default=None)
    serve.add_argument("--port", type=int, default=None)

    sub.add_parser(
        "check-pipeline",
        help="validate that every assistant's required inputs have an upstream producer",
    )

    args = parser.parse_args(argv)
    config = ServiceConfig.from_env()

    if args.command == "serve":
        import uvicorn

        from .api import create_app

        if args.host:
            config.host = args.host
        if args.port:
            config.port = args.port
        uvicorn.run(create_app(config), host=config.host, port=config.port)
        return 0

    if args.command == "check-pipeline":
        parts = build_components(config)
        report = validate_pipeline(parts.registry)
        if report.ok:
            print("pipeline ok: every required input role has an upstream producer")
            return 0
        for item in report.unsatisfiable:
            print(
                f"warning: assistant {item.assistant_id!r} requires role "
                f"{item.role!r} with no upstream producer (user must supply it)"
            )
        return 1

    return 2


if __name__ == "__main__":
    sys.exit(main())
