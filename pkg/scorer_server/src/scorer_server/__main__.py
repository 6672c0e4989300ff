"""Entry point: load the model and serve the scorer protocol."""

from __future__ import annotations

import argparse

import uvicorn

from .app import create_app
from .config import ServerConfig
from .model import MaskedLm


def parse_args(argv=None) -> ServerConfig:
    parser = argparse.ArgumentParser(prog="scorer-server", description=__doc__)
    parser.add_argument("--model", required=True, help="model identifier or local path")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument("--max-batch-size", type=int, default=8)
    parser.add_argument("--device", default="cpu")
    args = parser.parse_args(argv)
    return ServerConfig(
        model=args.model,
        host=args.host,
        port=args.port,
        max_batch_size=args.max_batch_size,
        device=args.device,
    )


def main(argv=None) -> None:
    config = parse_args(argv)
    model = MaskedLm(config.model, device=config.device)
    app = create_app(model, max_batch_size=config.max_batch_size)
    uvicorn.run(app, host=config.host, port=config.port)


if __name__ == "__main__":
    main()
