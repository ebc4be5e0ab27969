from lrnet_core.framework.concurrency.models import ProducerFailure
from lrnet_core.framework.concurrency.prefetch import Prefetcher

__all__ = ["Prefetcher", "ProducerFailure"]
