"""Network forward/backward passes, Adam, scheduling, and training."""
import numpy as np
import pytest
from numpy.testing import assert_allclose

from surrobench.activations import ACTIVATION_KINDS, Activation
from surrobench.nn_surrogate import (
    AdamState,
    MlpConfig,
    MlpWeights,
    PlateauSchedule,
    TrainConfig,
    adam_step,
    forward,
    forward_batch,
    init_weights,
    input_gradient,
    input_hessian,
    loss,
    minibatch_size,
    train,
    train_epochs,
    weight_gradient,
)

SMOOTH = ("silu", "sigmoid", "tanh")


def make_net(kind="tanh", n=3, seed=0):
    return init_weights(MlpConfig(n, Activation(kind)), seed)


def test_init_shapes_and_determinism():
    w = make_net("relu", n=4, seed=9)
    assert w.W1.shape == (16, 4) and w.b1.shape == (16,)
    assert w.W2.shape == (16, 16) and w.b2.shape == (16,)
    assert w.W3.shape == (1, 16) and w.b3 == 0.0
    assert np.all(w.b1 == 0.0) and np.all(w.b2 == 0.0)
    again = make_net("relu", n=4, seed=9)
    assert_allclose(again.W1, w.W1)
    assert not np.allclose(make_net("relu", n=4, seed=10).W1, w.W1)


def test_init_variance_families():
    # He-normal for rectifier kinds, Xavier-uniform for sigmoidal kinds
    n = 50
    he = init_weights(MlpConfig(n, Activation("relu")), 1)
    assert_allclose(np.std(he.W2), np.sqrt(2.0 / (4 * n)), rtol=0.1)
    xa = init_weights(MlpConfig(n, Activation("tanh")), 1)
    bound = np.sqrt(6.0 / (8 * n))
    assert np.max(np.abs(xa.W2)) <= bound
    assert np.max(np.abs(xa.W2)) > 0.9 * bound


def test_loss_is_sum_of_squared_residuals():
    w = make_net()
    X = np.eye(3)
    y = np.zeros(3)
    r = forward_batch(w, X) - y
    assert loss(w, X, y) == pytest.approx(float(np.sum(r * r)))


def test_forward_uses_normalization():
    w = make_net().with_normalization([1.0, 2.0, 3.0], 2.0)
    x = np.array([3.0, 2.0, 1.0])
    plain = make_net()
    assert forward(w, x) == pytest.approx(forward(plain, (x - w.base) / 2.0))


def test_weight_gradient_matches_fd():
    rng = np.random.default_rng(3)
    X = rng.standard_normal((8, 3))
    y = rng.standard_normal(8)
    h = 1e-6
    for kind in SMOOTH + ("elu",):
        w = make_net(kind, seed=5)
        grads = weight_gradient(w, X, y)
        # the reported loss is the sum; the gradient is of the batch mean
        for key in ("W1", "b1", "W2", "b2", "W3"):
            arr = getattr(w, key)
            idx = tuple(0 for _ in arr.shape)
            arr[idx] += h
            up = loss(w, X, y) / len(y)
            arr[idx] -= 2 * h
            dn = loss(w, X, y) / len(y)
            arr[idx] += h
            fd = (up - dn) / (2 * h)
            assert grads[key][idx] == pytest.approx(fd, rel=1e-4, abs=1e-8), (
                kind, key)
        w.b3 += h
        up = loss(w, X, y) / len(y)
        w.b3 -= 2 * h
        dn = loss(w, X, y) / len(y)
        fd = (up - dn) / (2 * h)
        assert grads["b3"] == pytest.approx(fd, rel=1e-4, abs=1e-8)


def test_input_gradient_matches_fd():
    rng = np.random.default_rng(7)
    for kind in SMOOTH:
        w = make_net(kind, seed=11).with_normalization([0.5, -0.5, 0.0], 3.0)
        for _ in range(3):
            x = rng.standard_normal(3)
            g = input_gradient(w, x)
            h = 1e-6
            for i in range(3):
                e = np.zeros(3)
                e[i] = h
                fd = (forward(w, x + e) - forward(w, x - e)) / (2 * h)
                assert g[i] == pytest.approx(fd, rel=1e-5, abs=1e-9)


def test_input_hessian_symmetric_and_matches_fd():
    w = make_net("tanh", seed=13)
    x = np.array([0.3, -0.2, 0.1])
    H = input_hessian(w, x)
    assert_allclose(H, H.T)
    h = 1e-4
    ref = np.empty((3, 3))
    for i in range(3):
        e = np.zeros(3)
        e[i] = h
        ref[:, i] = (input_gradient(w, x + e) - input_gradient(w, x - e)) / (2 * h)
    assert_allclose(H, 0.5 * (ref + ref.T), atol=1e-3, rtol=1e-3)


def test_adam_single_step_by_hand():
    w = make_net("tanh", seed=17)
    state = AdamState(w, beta1=0.9, beta2=0.999, eps=1e-8)
    g = {k: np.ones_like(v) for k, v in w.arrays().items()}
    g["b3"] = 2.0
    before = w.W1.copy()
    b3_before = w.b3
    adam_step(w, g, state, lr=0.1)
    # bias-corrected first step moves by lr * g / (|g| + eps)
    assert_allclose(w.W1, before - 0.1 * 1.0 / (1.0 + 1e-8))
    assert w.b3 == pytest.approx(b3_before - 0.1 * 2.0 / (2.0 + 1e-8))
    assert state.t == 1


def test_adam_is_scale_invariant_in_the_limit():
    w1 = make_net("tanh", seed=19)
    w2 = w1.copy()
    s1 = AdamState(w1)
    s2 = AdamState(w2)
    g = {k: np.full_like(v, 0.3) for k, v in w1.arrays().items()}
    g["b3"] = 0.3
    gs = {k: (v * 100.0 if k != "b3" else v * 100.0) for k, v in g.items()}
    adam_step(w1, g, s1, 0.01)
    adam_step(w2, gs, s2, 0.01)
    assert_allclose(w1.W1, w2.W1, atol=1e-8)


def test_plateau_schedule():
    s = PlateauSchedule(1.0, factor=0.8, patience=15)
    lrs = [s.update(5.0) for _ in range(40)]
    # the first update sets the best; drops follow every 15 stale epochs
    assert lrs[14] == 1.0
    assert lrs[15] == pytest.approx(0.8)
    assert lrs[29] == pytest.approx(0.8)
    assert lrs[30] == pytest.approx(0.64)


def test_plateau_improvement_resets_patience():
    s = PlateauSchedule(1.0, factor=0.5, patience=2)
    assert s.update(10.0) == 1.0
    assert s.update(10.0) == 1.0
    assert s.update(9.0) == 1.0  # strict improvement, counter resets
    assert s.update(9.0) == 1.0
    assert s.update(9.0) == 0.5


def test_plateau_validation():
    with pytest.raises(ValueError):
        PlateauSchedule(1.0, factor=1.5)
    with pytest.raises(ValueError):
        PlateauSchedule(1.0, patience=0)


def test_minibatch_rule():
    assert minibatch_size("SET38", 20) == 16
    assert minibatch_size("SET38", 40) == 32
    assert minibatch_size("SET38", 60) == 64
    with pytest.raises(ValueError):
        minibatch_size("SET38", 30)
    # SET53: nearest power of two to 5% of the size, ties round up
    assert minibatch_size("SET53", 500) == 32
    assert minibatch_size("SET53", 480) == 32  # tie between 16 and 32
    assert minibatch_size("SET53", 231) == 8
    assert minibatch_size("SET53", 20) == 2
    assert minibatch_size("SET53", 10000) == 64  # clamped
    with pytest.raises(ValueError):
        minibatch_size("SETX", 100)


def test_train_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(batch_size=1)
    with pytest.raises(ValueError):
        TrainConfig(batch_size=128)


def quad_data(n, count, seed):
    rng = np.random.default_rng(seed)
    X = rng.uniform(-1.0, 1.0, (count, n))
    y = np.sum(X**2, axis=1)
    return X, y


def test_train_reduces_loss_and_is_deterministic():
    Xtr, ytr = quad_data(2, 40, 23)
    Xte, yte = quad_data(2, 10, 29)
    cfg = MlpConfig(2, Activation("silu"))
    tcfg = TrainConfig(epochs=40, lr=1e-2, batch_size=8, seed=1)
    w, trace = train(cfg, (Xtr, ytr), (Xte, yte), tcfg)
    assert len(trace.train_loss) == 40
    assert trace.train_loss[-1] < trace.initial_train_loss
    w2, trace2 = train(cfg, (Xtr, ytr), (Xte, yte), tcfg)
    assert_allclose(w2.W1, w.W1)
    assert trace2.train_loss == trace.train_loss
    assert trace2.lr == trace.lr


def test_train_trace_csv(tmp_path):
    Xtr, ytr = quad_data(2, 20, 31)
    cfg = MlpConfig(2, Activation("tanh"))
    tcfg = TrainConfig(epochs=3, batch_size=4, seed=0)
    _, trace = train(cfg, (Xtr, ytr), (Xtr, ytr), tcfg)
    path = tmp_path / "trace.csv"
    trace.to_csv(path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "epoch,train_loss,test_loss,lr"
    assert len(lines) == 5  # header + epoch 0 + three epochs
    first = lines[1].split(",")
    assert first[0] == "0" and first[3] == ""  # no lr before training
    assert float(first[1]) == trace.initial_train_loss


def test_train_epochs_warm_start_continues():
    Xtr, ytr = quad_data(2, 30, 37)
    w = make_net("silu", n=2, seed=3).with_normalization(Xtr[0], 2.0)
    state = AdamState(w)
    rng = np.random.default_rng(41)
    before = loss(w, Xtr, ytr)
    train_epochs(w, state, Xtr, ytr, 30, 1e-2, 8, rng)
    mid = loss(w, Xtr, ytr)
    train_epochs(w, state, Xtr, ytr, 30, 1e-2, 8, rng)
    assert mid < before
    assert loss(w, Xtr, ytr) < mid
    assert state.t == 2 * 30 * 4  # 30 epochs x ceil(30/8) batches, twice


def test_train_rejects_degenerate_spread():
    X = np.zeros((5, 2))
    with pytest.raises(ValueError):
        train(MlpConfig(2, Activation("tanh")), (X, np.zeros(5)),
              (X, np.zeros(5)), TrainConfig(epochs=1, batch_size=2))


def test_weights_dict_round_trip():
    w = make_net("elu", seed=43).with_normalization([1.0, 0.0, -1.0], 2.5)
    back = MlpWeights.from_dict(w.to_dict())
    x = np.array([0.1, 0.2, 0.3])
    assert forward(back, x) == forward(w, x)
    assert back.activation.kind == "elu"
    assert back.delta == 2.5


def test_all_activation_kinds_train():
    Xtr, ytr = quad_data(2, 20, 47)
    for kind in ACTIVATION_KINDS:
        cfg = MlpConfig(2, Activation(kind))
        tcfg = TrainConfig(epochs=2, batch_size=4, seed=0)
        _, trace = train(cfg, (Xtr, ytr), (Xtr, ytr), tcfg)
        assert np.all(np.isfinite(trace.train_loss)), kind
