from .early_stopping import DEFAULT_PATIENCE, EarlyStopState, early_stop_update
from .enums import LayerKind, OptimizerKind, OutputActivation, StopDecision
from .layers import LayerSpec, conv, dense, init_parameters, relu, residual_add
from .losses import loss_for, predict, sigmoid_binary_cross_entropy, softmax_cross_entropy
from .optim import OptimizerState, optimizer_step

__all__ = [
    "DEFAULT_PATIENCE",
    "EarlyStopState",
    "LayerKind",
    "LayerSpec",
    "OptimizerKind",
    "OptimizerState",
    "OutputActivation",
    "StopDecision",
    "conv",
    "dense",
    "early_stop_update",
    "init_parameters",
    "loss_for",
    "optimizer_step",
    "predict",
    "relu",
    "residual_add",
    "sigmoid_binary_cross_entropy",
    "softmax_cross_entropy",
]
