from enum import Enum


class LayerKind(str, Enum):
    CONV2D = "conv2d"
    DENSE = "dense"
    RELU = "relu"
    SIGMOID = "sigmoid"
    SOFTMAX = "softmax"
    MAXPOOL = "maxpool"
    CONCAT = "concat"
    RESIDUAL_ADD = "residual_add"
    FLATTEN = "flatten"

    @property
    def has_parameters(self) -> bool:
        return self in (LayerKind.CONV2D, LayerKind.DENSE)


class OptimizerKind(str, Enum):
    SGD = "sgd"
    ADAM = "adam"


class OutputActivation(str, Enum):
    SOFTMAX = "softmax"
    SIGMOID = "sigmoid"


class StopDecision(str, Enum):
    CONTINUE = "continue"
    STOP = "stop"
