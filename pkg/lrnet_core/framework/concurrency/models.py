from dataclasses import dataclass


@dataclass(frozen=True)
class ProducerFailure:
    """Carries an exception raised on the producer thread over to the consumer."""

    error: BaseException
