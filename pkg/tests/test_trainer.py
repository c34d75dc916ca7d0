"""Tests for experiment configs, the training loop, and lambda1 sweeps."""

import numpy as np
import pytest

from evidkit.datasets import make_toy4
from evidkit.evidence import Activation
from evidkit.network import dense_specs, init_network
from evidkit.trainer import (
    ConfigError,
    DataConfig,
    ExperimentConfig,
    OptConfig,
    derive_sweep_seed,
    epoch_csv_header,
    evaluate,
    run_experiment,
    save_epoch_csv,
    sweep,
)


def tiny_cfg(**over):
    base = dict(
        name="tiny",
        train_data=DataConfig(kind="toy4", d=2, seed=0),
        hidden_dims=[4],
        loss="ev_mse",
        activation="relu",
        epochs=3,
        batch_size=2,
        seed=1,
    )
    base.update(over)
    return ExperimentConfig(**base)


def blob_data(**over):
    base = dict(kind="blobs", d=2, k=2, n_per_class=6, stddev=0.5, radius=6.0)
    base.update(over)
    return DataConfig(**base)


# --- config validation -------------------------------------------------------


def test_config_error_messages_name_the_field():
    cases = [
        (dict(loss="nope"), "loss: unknown loss kind"),
        (dict(activation="nope"), "activation: unknown activation"),
        (dict(inc_reg="nope"), "inc_reg: unknown regularizer"),
        (dict(lambda1=-1.0), "lambda1: must be >= 0"),
        (dict(use_correct_reg=True, activation="relu"), "use_correct_reg: requires activation=exp"),
        (dict(loss="softmax_ce", inc_reg="edl_kl"), "softmax baseline takes no evidential"),
        (dict(epochs=0), "epochs: must be >= 1"),
        (dict(batch_size=0), "batch_size: must be >= 1"),
        (dict(eval_every=0), "eval_every: must be >= 1"),
        (dict(hidden_dims=[]), "hidden_dims"),
        (dict(zero_ev_taus=[-0.1]), "zero_ev_taus"),
    ]
    for over, match in cases:
        with pytest.raises(ConfigError, match=match):
            tiny_cfg(**over).validate()


def test_data_config_validation_messages():
    with pytest.raises(ConfigError, match="train_data.kind"):
        tiny_cfg(train_data=DataConfig(kind="wat")).validate()
    with pytest.raises(ConfigError, match="train_data.stddev"):
        tiny_cfg(train_data=blob_data(stddev=0.0)).validate()
    with pytest.raises(ConfigError, match="test_data.path: required"):
        tiny_cfg(test_data=DataConfig(kind="csv")).validate()
    with pytest.raises(ConfigError, match="dataset file not found"):
        tiny_cfg(test_data=DataConfig(kind="csv", path="/no/such.csv")).validate()
    with pytest.raises(ConfigError, match=r"ood_data.shift: expected 2 components"):
        tiny_cfg(ood_data=blob_data(shift=[1.0])).validate()
    with pytest.raises(ConfigError, match=r"train_data.means: expected shape \(2, 2\)"):
        tiny_cfg(train_data=blob_data(means=[[0.0, 0.0]])).validate()


def test_from_dict_rejects_unknown_fields_and_missing_required():
    with pytest.raises(ConfigError, match="'learning_rate': unknown field"):
        ExperimentConfig.from_dict(
            {"name": "x", "train_data": {"kind": "toy4"}, "learning_rate": 0.1}
        )
    with pytest.raises(ConfigError, match="optimizer.momentu: unknown field"):
        ExperimentConfig.from_dict(
            {"name": "x", "train_data": {"kind": "toy4"}, "optimizer": {"momentu": 0.9}}
        )
    with pytest.raises(ConfigError, match="train_data: required"):
        ExperimentConfig.from_dict({"name": "x"})
    with pytest.raises(ConfigError, match="name: required"):
        ExperimentConfig.from_dict({"train_data": {"kind": "toy4"}})
    with pytest.raises(ConfigError, match="expected a JSON object"):
        ExperimentConfig.from_dict([1, 2])


def test_config_dict_round_trip():
    cfg = tiny_cfg(
        test_data=blob_data(seed=4),
        optimizer=OptConfig(kind="adam_like", lr=0.01),
        lambda1=2.0,
        inc_reg="edl_kl",
    )
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg


# --- training loop -----------------------------------------------------------


def test_run_experiment_shapes_and_log_fields():
    cfg = tiny_cfg(epochs=4)
    result = run_experiment(cfg)
    assert len(result.logs) == 4
    assert [log.epoch for log in result.logs] == [0, 1, 2, 3]
    # no test set: records come from the train set and test_acc mirrors train
    assert len(result.records) == 4
    assert result.ood_records is None
    for log in result.logs:
        assert log.test_acc == log.train_acc
        assert 0.0 <= log.train_acc <= 1.0
        assert 0.0 <= log.mean_vacuity <= 1.0
        taus = sorted(log.zero_ev)
        counts = [log.zero_ev[t] for t in taus]
        assert all(0 <= c <= 4 for c in counts)
        assert counts == sorted(counts)  # cumulative in tau


def test_run_is_deterministic_bit_exact():
    cfg = dict(
        name="det",
        train_data=blob_data(seed=3),
        test_data=blob_data(seed=9),
        hidden_dims=[8],
        loss="ev_log",
        activation="exp",
        inc_reg="edl_kl",
        lambda1=1.0,
        epochs=3,
        batch_size=4,
        seed=5,
    )
    a = run_experiment(ExperimentConfig(**cfg))
    b = run_experiment(ExperimentConfig(**cfg))
    for wa, wb in zip(a.net.weights, b.net.weights):
        assert np.array_equal(wa, wb)
    assert [log.train_loss for log in a.logs] == [log.train_loss for log in b.logs]
    assert a.records == b.records


def test_seed_changes_the_run():
    a = run_experiment(tiny_cfg(seed=1, epochs=2))
    b = run_experiment(tiny_cfg(seed=2, epochs=2))
    assert any(
        not np.array_equal(wa, wb) for wa, wb in zip(a.net.weights, b.net.weights)
    )


def test_divergence_aborts_with_epoch_and_batch():
    cfg = tiny_cfg(
        optimizer=OptConfig(kind="sgd_momentum", lr=1e160),
        epochs=5,
        batch_size=2,
    )
    with np.errstate(over="ignore"):  # the overflow is the point
        with pytest.raises(
            RuntimeError, match=r"non-finite (logits|loss) at epoch \d+, batch \d+"
        ):
            run_experiment(cfg)


def test_eval_every_reuses_stale_test_accuracy():
    cfg = tiny_cfg(test_data=blob_data(k=4, seed=8), epochs=3, eval_every=100)
    result = run_experiment(cfg)
    # epoch 0 evaluates, epoch 1 reuses, the final epoch re-evaluates
    assert result.logs[1].test_acc == result.logs[0].test_acc


def test_baseline_records_carry_max_softmax():
    records = run_experiment(tiny_cfg(loss="softmax_ce", epochs=2)).records
    assert all(r.max_softmax is not None for r in records)
    assert all(0.25 <= r.max_softmax <= 1.0 for r in records)
    records = run_experiment(tiny_cfg(epochs=2)).records
    assert all(r.max_softmax is None for r in records)


def test_ood_records_are_flagged():
    cfg = tiny_cfg(
        train_data=blob_data(seed=3),
        ood_data=blob_data(seed=4, shift=[30.0, 30.0]),
        epochs=2,
    )
    result = run_experiment(cfg)
    assert result.ood_records is not None
    assert all(r.is_ood for r in result.ood_records)
    assert all(not r.is_ood for r in result.records)


def test_evaluate_rejects_class_mismatch():
    net = init_network(dense_specs(2, [4], 3), seed=0)
    ds = make_toy4(2, 0)  # 4 classes
    with pytest.raises(ValueError, match="3 logits but dataset has 4 classes"):
        evaluate(net, ds, Activation.RELU)


# --- epoch CSV ----------------------------------------------------------------


def test_epoch_csv_header_exact():
    assert (
        epoch_csv_header((0.01, 0.1, 1.0))
        == "epoch,train_loss,train_acc,test_acc,zero_ev_0.01,zero_ev_0.1,zero_ev_1.0,mean_vacuity"
    )
    assert epoch_csv_header((0.0,)) == (
        "epoch,train_loss,train_acc,test_acc,zero_ev_0.0,mean_vacuity"
    )


def test_save_epoch_csv(tmp_path):
    result = run_experiment(tiny_cfg(epochs=3))
    path = tmp_path / "epochs.csv"
    taus = tiny_cfg().zero_ev_taus
    save_epoch_csv(result.logs, taus, path)
    lines = path.read_text().splitlines()
    assert len(lines) == 4
    assert lines[0] == epoch_csv_header(taus)
    first = lines[1].split(",")
    assert first[0] == "0"
    assert float(first[1]) == result.logs[0].train_loss  # 17g round-trips


# --- sweeps ---------------------------------------------------------------------


def test_derive_sweep_seed_is_stable_and_distinct():
    a = derive_sweep_seed(42, 0)
    b = derive_sweep_seed(42, 1)
    assert a == derive_sweep_seed(42, 0)
    assert a != b
    assert derive_sweep_seed(43, 0) != a


def test_sweep_rows_follow_grid_order_and_seeds():
    base = tiny_cfg(epochs=2)
    rows = sweep(base, [0.0, 1.0, 0.5])
    assert [r.lambda1 for r in rows] == [0.0, 1.0, 0.5]
    assert [r.seed for r in rows] == [derive_sweep_seed(base.seed, i) for i in range(3)]
    for r in rows:
        assert 0.0 <= r.final_train_acc <= 1.0
        assert r.census.n == 4
        assert 0.0 <= r.mean_test_vacuity <= 1.0


def test_sweep_workers_equivalent():
    base = tiny_cfg(epochs=2, inc_reg="adl_sum")
    assert sweep(base, [0.0, 2.0], workers=1) == sweep(base, [0.0, 2.0], workers=2)


def test_sweep_rejects_empty_grid():
    with pytest.raises(ConfigError, match="sweep grid"):
        sweep(tiny_cfg(), [])
