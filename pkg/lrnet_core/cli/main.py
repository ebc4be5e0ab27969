from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Sequence

from lrnet_core.cli.commands import cmd_eval, cmd_fetch, cmd_inspect, cmd_train
from lrnet_core.framework.errors import ConfigError, LRNetError
from lrnet_core.framework.log import setup_logging

log = logging.getLogger(__name__)

EXIT_FAILURE = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lrnet", description="Multi-kernel residual CNN for 28x28 grayscale classification.")
    parser.add_argument("--verbose", "-v", action="store_true", help="debug logging")
    parser.add_argument("--log-file", type=Path, default=None, help="also log to this rotating file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fetch", help="download and verify a dataset into the cache")
    p.add_argument("--dataset", required=True, help="mnist | fashion | oracle")
    p.add_argument("--cache", default=None, help="cache directory (default: $LRNET_CACHE or ~/.cache/lrnet)")
    p.add_argument("--url", action="append", metavar="ROLE=URL", help="override a download URL by role or filename")
    p.set_defaults(func=cmd_fetch)

    p = sub.add_parser("train", help="train with early stopping on validation loss")
    p.add_argument("--config", default=None, help="RunConfig JSON file")
    p.add_argument("--seed", type=int)
    p.add_argument("--dataset")
    p.add_argument("--max-epochs", type=int)
    p.add_argument("--patience", type=int)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--output-activation", choices=["softmax", "sigmoid"])
    p.add_argument("--metrics")
    p.add_argument("--checkpoint")
    p.add_argument("--train-limit", type=int, help="use only the first N training samples")
    p.add_argument("--cache", default=None)
    p.add_argument("--resume", default=None, help="continue from this checkpoint")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="accuracy and mean loss of a checkpoint on a split")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--dataset", default=None, help="defaults to the checkpoint's dataset")
    p.add_argument("--split", choices=["test", "val"], default="test")
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--cache", default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("inspect", help="layer table and parameter count")
    p.add_argument("--config", default=None)
    p.add_argument("--checkpoint", default=None)
    p.add_argument("--json", action="store_true", help="emit the report as JSON")
    p.set_defaults(func=cmd_inspect)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging("lrnet_core", level=logging.DEBUG if args.verbose else logging.INFO, log_file=args.log_file)

    func: Callable[[argparse.Namespace], int] = args.func
    try:
        return func(args)
    except ConfigError as e:
        log.error("%s", e)
        print(f"error: {e}\n(see `lrnet {args.command} --help`)", file=sys.stderr)
        return EXIT_USAGE
    except LRNetError as e:
        log.error("%s: %s", type(e).__name__, e)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
