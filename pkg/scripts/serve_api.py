#!/usr/bin/env python3
"""Run the HTTP service, optionally also serving the web UI build.

Usage: python scripts/serve_api.py --store DIR [--host H] [--port P] [--webui DIST_DIR]
"""

import argparse
import os

import uvicorn

from ratlop.api import create_app
from ratlop.timeline import Store


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--store", default=os.environ.get("RATLOP_STORE"), help="store directory")
    parser.add_argument("--host", default=os.environ.get("RATLOP_HOST", "127.0.0.1"))
    parser.add_argument("--port", type=int, default=int(os.environ.get("RATLOP_PORT", "8000")))
    parser.add_argument("--webui", help="directory of web UI static files to serve at /")
    args = parser.parse_args()
    if not args.store:
        parser.error("no store configured: pass --store DIR or set RATLOP_STORE")

    app = create_app(Store(args.store))
    if args.webui:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=args.webui, html=True), name="webui")
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
