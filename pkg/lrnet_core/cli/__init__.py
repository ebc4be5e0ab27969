from lrnet_core.cli.config import RunConfig, apply_overrides, load_config
from lrnet_core.cli.main import build_parser, main
from lrnet_core.cli.metrics import METRICS_HEADER, MetricsRow, MetricsWriter, read_metrics
from lrnet_core.cli.training import EvalResult, Trainer, TrainOutcome, evaluate, model_from_checkpoint

__all__ = [
    "EvalResult",
    "METRICS_HEADER",
    "MetricsRow",
    "MetricsWriter",
    "RunConfig",
    "TrainOutcome",
    "Trainer",
    "apply_overrides",
    "build_parser",
    "evaluate",
    "load_config",
    "main",
    "model_from_checkpoint",
    "read_metrics",
]
