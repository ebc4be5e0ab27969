import numpy as np
import pytest

from lrnet_core.autograd import Graph, Parameter, known_ops, zero_grads
from lrnet_core.framework.errors import ConfigError, DataError, GraphError, ShapeError
from lrnet_core.tensor import Precision, Tensor

from tests.gradcheck import check_inputs, weighted_sum

SEEDS = range(20)


def scalar(v: float) -> Tensor:
    return Tensor.from_array([v], Precision.FLOAT64)


class TestRecording:
    def test_add_scalars(self):
        g = Graph()
        out = g.record("add", [g.input(scalar(1)), g.input(scalar(2))])
        assert out.value.item() == 3

    def test_cross_graph_input(self):
        g1, g2 = Graph(), Graph()
        a = g1.input(scalar(1))
        b = g2.input(scalar(2))
        with pytest.raises(GraphError):
            g2.record("add", [a, b])

    def test_topological_order_is_insertion_order(self):
        g = Graph()
        x = g.input(scalar(1))
        y = g.record("scale", [x], factor=2.0)
        z = g.record("add", [y, x])
        w = g.record("mul", [z, y])
        assert [n.id for n in g.nodes] == [0, 1, 2, 3]
        assert w.inputs == (z.id, y.id)

    def test_unknown_op(self):
        g = Graph()
        with pytest.raises(ConfigError):
            g.record("conv3d", [g.input(scalar(1))])

    def test_arity_checked(self):
        g = Graph()
        with pytest.raises(GraphError):
            g.record("add", [g.input(scalar(1))])

    def test_parameter_bound_once(self):
        g = Graph()
        p = Parameter("w", scalar(1))
        assert g.parameter(p) is g.parameter(p)

    def test_registered_tags(self):
        expected = {"add", "mul", "scale", "matmul", "bias_add", "sum", "flatten", "relu", "sigmoid",
                    "conv2d", "maxpool2d", "concat", "softmax_xent", "sigmoid_bce", "softmax"}
        assert expected <= set(known_ops())


class TestBackward:
    def test_square_via_mul(self):
        g = Graph()
        x = Parameter("x", scalar(3))
        xn = g.parameter(x)
        grads = g.backward(g.record("mul", [xn, xn]))
        assert grads["x"].item() == 6

    def test_fan_out_sums_contributions(self):
        g = Graph()
        x = Parameter("x", scalar(2))
        xn = g.parameter(x)
        y = g.record("add", [g.record("scale", [xn], factor=3.0), g.record("mul", [xn, xn])])
        assert g.backward(y)["x"].item() == 3 + 2 * 2

    def test_unused_parameter_gets_zero(self):
        g = Graph()
        x, unused = Parameter("x", scalar(2)), Parameter("u", scalar(5))
        xn = g.parameter(x)
        g.parameter(unused)
        grads = g.backward(g.record("scale", [xn], factor=4.0))
        assert grads["u"].item() == 0

    def test_non_trainable_excluded(self):
        g = Graph()
        frozen = Parameter("f", scalar(2), trainable=False)
        grads = g.backward(g.record("scale", [g.parameter(frozen)], factor=2.0))
        assert "f" not in grads

    def test_constant_gets_node_gradient(self):
        g = Graph()
        c = g.constant(scalar(4))
        x = Parameter("x", scalar(3))
        g.backward(g.record("mul", [g.parameter(x), c]))
        assert c.grad.item() == 3

    def test_repeated_backward_is_identical(self, rng):
        g = Graph()
        w = Parameter("w", Tensor.from_array(rng.standard_normal((4, 3)), Precision.FLOAT64))
        x = g.input(Tensor.from_array(rng.standard_normal((5, 4)), Precision.FLOAT64))
        loss = g.record("softmax_xent", [g.record("matmul", [x, g.parameter(w)])], labels=np.array([0, 1, 2, 0, 1]))
        first = g.backward(loss)["w"]
        second = g.backward(loss)["w"]
        assert first.bit_equal(second)

    def test_gradients_accumulate_until_zeroed(self):
        x = Parameter("x", scalar(1))
        for _ in range(2):
            g = Graph()
            g.backward(g.record("scale", [g.parameter(x)], factor=2.0))
        assert x.grad.item() == 4
        zero_grads([x])
        assert x.grad.item() == 0

    def test_non_scalar_loss(self):
        g = Graph()
        x = Parameter("x", Tensor.ones((2,), Precision.FLOAT64))
        with pytest.raises(ShapeError):
            g.backward(g.record("scale", [g.parameter(x)], factor=1.0))

    def test_loss_from_other_graph(self):
        g1, g2 = Graph(), Graph()
        loss = g1.record("sum", [g1.input(scalar(1))])
        with pytest.raises(GraphError):
            g2.backward(loss)

    def test_no_record_graph_cannot_backward(self):
        g = Graph(record=False)
        loss = g.record("sum", [g.input(scalar(1))])
        assert loss.value.item() == 1
        assert g.nodes == ()
        with pytest.raises(GraphError):
            g.backward(loss)


class TestLabels:
    def test_out_of_range_label(self):
        g = Graph()
        logits = g.input(Tensor.zeros((2, 3)))
        with pytest.raises(DataError):
            g.record("softmax_xent", [logits], labels=np.array([0, 3]))

    def test_label_shape(self):
        g = Graph()
        with pytest.raises(ShapeError):
            g.record("softmax_xent", [g.input(Tensor.zeros((2, 3)))], labels=np.array([0]))

    def test_uniform_logits_give_log_k(self):
        g = Graph()
        loss = g.record("softmax_xent", [g.input(Tensor.zeros((4, 10), Precision.FLOAT64))], labels=np.arange(4))
        assert loss.value.item() == pytest.approx(np.log(10))


@pytest.mark.parametrize("seed", SEEDS)
class TestGradients:
    def test_add_mul(self, seed):
        rng = np.random.default_rng(seed)
        a, b, w = rng.standard_normal((3, 3, 4))
        result = check_inputs(
            lambda g, n: weighted_sum(g, g.record("mul", [g.record("add", [n[0], n[1]]), n[1]]), w), [a, b], rng=rng
        )
        assert result.ok, result

    def test_matmul_bias(self, seed):
        rng = np.random.default_rng(seed)
        x, wt, b = rng.standard_normal((4, 5)), rng.standard_normal((5, 3)), rng.standard_normal(3)
        r = rng.standard_normal((4, 3))
        result = check_inputs(
            lambda g, n: weighted_sum(g, g.record("bias_add", [g.record("matmul", [n[0], n[1]]), n[2]]), r),
            [x, wt, b],
            rng=rng,
        )
        assert result.ok, result

    def test_relu_sigmoid(self, seed):
        rng = np.random.default_rng(seed)
        x, r = rng.standard_normal((2, 3, 5))
        result = check_inputs(
            lambda g, n: weighted_sum(g, g.record("sigmoid", [g.record("relu", [n[0]])]), r), [x], rng=rng
        )
        assert result.ok, result

    def test_conv2d(self, seed):
        rng = np.random.default_rng(seed)
        ks = (1, 3, 5, 7)[seed % 4]
        x, k, b = rng.standard_normal((2, 7, 7, 2)), rng.standard_normal((ks, ks, 2, 3)), rng.standard_normal(3)
        r = rng.standard_normal((2, 7, 7, 3))
        result = check_inputs(
            lambda g, n: weighted_sum(g, g.record("conv2d", n), r), [x, k, b], rng=rng, max_entries=40
        )
        assert result.ok, result

    def test_maxpool_flatten(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.standard_normal((2, 5, 5, 3))
        r = rng.standard_normal((2, 12))
        result = check_inputs(
            lambda g, n: weighted_sum(g, g.record("flatten", [g.record("maxpool2d", n)]), r), [x], rng=rng
        )
        assert result.ok, result

    def test_concat(self, seed):
        rng = np.random.default_rng(seed)
        a, b = rng.standard_normal((2, 3, 3, 2)), rng.standard_normal((2, 3, 3, 4))
        r = rng.standard_normal((2, 3, 3, 6))
        result = check_inputs(lambda g, n: weighted_sum(g, g.record("concat", n), r), [a, b], rng=rng)
        assert result.ok, result

    def test_softmax_xent(self, seed):
        rng = np.random.default_rng(seed)
        labels = rng.integers(0, 10, size=6)
        result = check_inputs(
            lambda g, n: g.record("softmax_xent", n, labels=labels), [rng.standard_normal((6, 10))], rng=rng
        )
        assert result.ok, result

    def test_sigmoid_bce(self, seed):
        rng = np.random.default_rng(seed)
        labels = rng.integers(0, 10, size=6)
        result = check_inputs(
            lambda g, n: g.record("sigmoid_bce", n, labels=labels), [rng.standard_normal((6, 10))], rng=rng
        )
        assert result.ok, result

    def test_softmax(self, seed):
        rng = np.random.default_rng(seed)
        x, r = rng.standard_normal((2, 4, 10))
        result = check_inputs(lambda g, n: weighted_sum(g, g.record("softmax", n), r), [x], rng=rng)
        assert result.ok, result
