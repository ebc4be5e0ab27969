from .graph import Graph, Node
from .ops import OpDef, get_op, known_ops, register
from .parameter import Parameter, zero_grads

__all__ = ["Graph", "Node", "OpDef", "Parameter", "get_op", "known_ops", "register", "zero_grads"]
