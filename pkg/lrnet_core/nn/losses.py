from __future__ import annotations

import numpy as np

from lrnet_core.autograd import Graph, Node
from lrnet_core.nn.enums import OutputActivation
from lrnet_core.tensor import Tensor


def softmax_cross_entropy(graph: Graph, logits: Node, labels: np.ndarray) -> Node:
    """Mean over the batch of -log softmax(logits)[label]; raises DataError for labels outside [0, K)."""
    return graph.record("softmax_xent", [logits], labels=labels)


def sigmoid_binary_cross_entropy(graph: Graph, logits: Node, labels: np.ndarray) -> Node:
    """Per-class sigmoid with binary cross-entropy against one-hot labels, summed over classes, mean over batch."""
    return graph.record("sigmoid_bce", [logits], labels=labels)


def loss_for(activation: OutputActivation):
    if activation is OutputActivation.SIGMOID:
        return sigmoid_binary_cross_entropy
    return softmax_cross_entropy


def predict(logits: Tensor) -> np.ndarray:
    """
    Class index per row; ties resolve to the lowest index.
    Both output activations are monotone, so the argmax of the logits is the argmax of the outputs.
    """
    return np.argmax(logits.data, axis=1)
