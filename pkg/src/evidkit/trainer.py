"""Experiment orchestration: declarative configs, a deterministic training
loop with per-epoch logging, held-out/OOD evaluation, and lambda1 sweeps.
"""

from __future__ import annotations

import dataclasses
import multiprocessing
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .datasets import BlobSpec, Dataset, circle_means, load_csv, make_blobs, make_ood_shift, make_toy4
from .evidence import Activation, evidence_state, is_zero_evidence, predict_class
from .losses import Loss, softmax
from .metrics import CensusBuckets, SampleRecord, evidence_census
from .network import (
    Network,
    OptKind,
    OptimizerState,
    backward,
    dense_specs,
    forward,
    init_network,
    step,
)
from .regularizers import IncReg, RegWeights, composite_loss

__all__ = [
    "ConfigError",
    "DataConfig",
    "OptConfig",
    "ExperimentConfig",
    "EpochLog",
    "RunResult",
    "SweepRow",
    "run_experiment",
    "evaluate",
    "sweep",
    "derive_sweep_seed",
    "epoch_csv_header",
    "save_epoch_csv",
]

DEFAULT_ZERO_EV_TAUS = (0.01, 0.1, 1.0)


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the field."""


@dataclass
class DataConfig:
    """Declarative dataset description: toy4, blobs, or a CSV file."""

    kind: str
    d: int = 2
    seed: int = 0
    k: int = 4
    n_per_class: int = 50
    stddev: float = 1.0
    radius: float = 6.0
    means: list | None = None  # explicit (K, D) means; otherwise circle placement
    shift: list | None = None  # translation marking the set out-of-distribution
    path: str | None = None  # CSV path for kind="csv"

    def validate(self, where: str) -> None:
        if self.kind not in ("toy4", "blobs", "csv"):
            raise ConfigError(f"{where}.kind: expected toy4, blobs, or csv, got {self.kind!r}")
        if self.kind == "csv":
            if not self.path:
                raise ConfigError(f"{where}.path: required for kind=csv")
            if not Path(self.path).exists():
                raise ConfigError(f"{where}.path: dataset file not found: {self.path}")
            return
        if self.d < 2:
            raise ConfigError(f"{where}.d: must be >= 2")
        if self.kind == "blobs":
            if self.k < 2:
                raise ConfigError(f"{where}.k: must be >= 2")
            if self.n_per_class < 1:
                raise ConfigError(f"{where}.n_per_class: must be >= 1")
            if self.stddev <= 0:
                raise ConfigError(f"{where}.stddev: must be > 0")
            if self.means is not None:
                m = np.asarray(self.means, dtype=float)
                if m.shape != (self.k, self.d):
                    raise ConfigError(f"{where}.means: expected shape ({self.k}, {self.d})")
        if self.shift is not None:
            s = np.asarray(self.shift, dtype=float)
            if s.shape != (self.d,):
                raise ConfigError(f"{where}.shift: expected {self.d} components")

    def blob_spec(self) -> BlobSpec:
        means = (
            np.asarray(self.means, dtype=float)
            if self.means is not None
            else circle_means(self.k, self.d, self.radius)
        )
        return BlobSpec(
            k=self.k, means=means, stddev=self.stddev, n_per_class=self.n_per_class, seed=self.seed
        )

    def build(self) -> Dataset:
        if self.kind == "toy4":
            return make_toy4(self.d, self.seed)
        if self.kind == "blobs":
            spec = self.blob_spec()
            if self.shift is not None:
                return make_ood_shift(spec, np.asarray(self.shift, dtype=float))
            return make_blobs(spec)
        return load_csv(self.path)


@dataclass
class OptConfig:
    kind: str = "sgd_momentum"
    lr: float = 0.1
    momentum: float = 0.9
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def validate(self, where: str = "optimizer") -> None:
        try:
            OptKind(self.kind)
        except ValueError:
            raise ConfigError(f"{where}.kind: unknown optimizer {self.kind!r}") from None
        if self.lr <= 0:
            raise ConfigError(f"{where}.lr: must be > 0")

    def build(self) -> OptimizerState:
        return OptimizerState(
            kind=OptKind(self.kind),
            lr=self.lr,
            momentum=self.momentum,
            beta1=self.beta1,
            beta2=self.beta2,
            eps=self.eps,
        )


@dataclass
class ExperimentConfig:
    name: str
    train_data: DataConfig
    test_data: DataConfig | None = None
    ood_data: DataConfig | None = None
    hidden_dims: list = field(default_factory=lambda: [16])
    loss: str = "ev_mse"
    activation: str = "exp"
    inc_reg: str = "none"
    lambda1: float = 0.0
    use_correct_reg: bool = False
    optimizer: OptConfig = field(default_factory=OptConfig)
    epochs: int = 100
    batch_size: int = 32
    seed: int = 0
    eval_every: int = 1
    zero_ev_taus: list = field(default_factory=lambda: list(DEFAULT_ZERO_EV_TAUS))

    def validate(self) -> None:
        try:
            loss = Loss(self.loss)
        except ValueError:
            raise ConfigError(f"loss: unknown loss kind {self.loss!r}") from None
        try:
            Activation(self.activation)
        except ValueError:
            raise ConfigError(f"activation: unknown activation {self.activation!r}") from None
        try:
            IncReg(self.inc_reg)
        except ValueError:
            raise ConfigError(f"inc_reg: unknown regularizer {self.inc_reg!r}") from None
        if self.lambda1 < 0:
            raise ConfigError("lambda1: must be >= 0")
        if self.use_correct_reg and Activation(self.activation) != Activation.EXP:
            raise ConfigError("use_correct_reg: requires activation=exp")
        if loss == Loss.SOFTMAX_CE and (
            IncReg(self.inc_reg) != IncReg.NONE or self.use_correct_reg
        ):
            raise ConfigError("inc_reg: the softmax baseline takes no evidential regularizers")
        if self.epochs < 1:
            raise ConfigError("epochs: must be >= 1")
        if self.batch_size < 1:
            raise ConfigError("batch_size: must be >= 1")
        if self.eval_every < 1:
            raise ConfigError("eval_every: must be >= 1")
        if not self.hidden_dims or any(int(h) < 1 for h in self.hidden_dims):
            raise ConfigError("hidden_dims: need at least one positive width")
        if any(t < 0 for t in self.zero_ev_taus):
            raise ConfigError("zero_ev_taus: thresholds must be >= 0")
        self.train_data.validate("train_data")
        if self.test_data is not None:
            self.test_data.validate("test_data")
        if self.ood_data is not None:
            self.ood_data.validate("ood_data")
        self.optimizer.validate()

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @staticmethod
    def from_dict(doc: dict) -> "ExperimentConfig":
        if not isinstance(doc, dict):
            raise ConfigError("config: expected a JSON object")
        doc = dict(doc)

        def sub(cls, key, value, where):
            if value is None:
                return None
            if not isinstance(value, dict):
                raise ConfigError(f"{where}: expected an object")
            known = {f.name for f in dataclasses.fields(cls)}
            extra = set(value) - known
            if extra:
                raise ConfigError(f"{where}.{sorted(extra)[0]}: unknown field")
            return cls(**value)

        known = {f.name for f in dataclasses.fields(ExperimentConfig)}
        extra = set(doc) - known
        if extra:
            raise ConfigError(f"config field {sorted(extra)[0]!r}: unknown field")
        if "train_data" not in doc:
            raise ConfigError("train_data: required")
        if "name" not in doc:
            raise ConfigError("name: required")
        doc["train_data"] = sub(DataConfig, "train_data", doc["train_data"], "train_data")
        doc["test_data"] = sub(DataConfig, "test_data", doc.get("test_data"), "test_data")
        doc["ood_data"] = sub(DataConfig, "ood_data", doc.get("ood_data"), "ood_data")
        if "optimizer" in doc:
            doc["optimizer"] = sub(OptConfig, "optimizer", doc["optimizer"], "optimizer")
        return ExperimentConfig(**doc)


@dataclass
class EpochLog:
    epoch: int
    train_loss: float
    train_acc: float
    test_acc: float
    zero_ev: dict  # tau -> count over the training set
    mean_vacuity: float


@dataclass
class RunResult:
    config: ExperimentConfig
    logs: list
    net: Network
    records: list  # final evaluation on the test set (train set if no test set)
    ood_records: list | None = None

    @property
    def final_train_acc(self) -> float:
        return self.logs[-1].train_acc

    @property
    def final_test_acc(self) -> float:
        return self.logs[-1].test_acc


def _predict_rows(logits: np.ndarray, act: Activation, baseline: bool) -> np.ndarray:
    if baseline:
        return logits.argmax(axis=1)
    preds = np.empty(logits.shape[0], dtype=int)
    for i, row in enumerate(logits):
        preds[i] = predict_class(evidence_state(act, row))
    return preds


def evaluate(net: Network, ds: Dataset, act: Activation, baseline: bool = False) -> list:
    """One SampleRecord per sample; never mutates the network."""
    if net.out_dim != ds.k:
        raise ValueError(f"network emits {net.out_dim} logits but dataset has {ds.k} classes")
    logits, _ = forward(net, ds.features)
    records = []
    for row, label in zip(logits, ds.labels):
        state = evidence_state(act, row)
        pred = int(row.argmax()) if baseline else predict_class(state)
        records.append(
            SampleRecord(
                predicted=pred,
                actual=int(label),
                vacuity=state.vacuity,
                mean_evidence=float(state.evidence.sum()) / state.k,
                max_softmax=float(softmax(row).max()) if baseline else None,
                is_ood=ds.ood,
            )
        )
    return records


def _train_stats(
    net: Network, ds: Dataset, act: Activation, baseline: bool, taus
) -> tuple[float, dict, float]:
    logits, _ = forward(net, ds.features)
    preds = _predict_rows(logits, act, baseline)
    acc = float((preds == ds.labels).mean())
    counts = {float(t): 0 for t in taus}
    vac = 0.0
    for row in logits:
        state = evidence_state(act, row)
        vac += state.vacuity
        for t in taus:
            if is_zero_evidence(state, t):
                counts[float(t)] += 1
    return acc, counts, vac / ds.n


def run_experiment(cfg: ExperimentConfig) -> RunResult:
    """Train per the config; deterministic for a fixed seed."""
    cfg.validate()
    train = cfg.train_data.build()
    test = cfg.test_data.build() if cfg.test_data is not None else None
    ood = cfg.ood_data.build() if cfg.ood_data is not None else None

    loss_kind = Loss(cfg.loss)
    act = Activation(cfg.activation)
    inc = IncReg(cfg.inc_reg)
    baseline = loss_kind == Loss.SOFTMAX_CE
    specs = dense_specs(train.d, [int(h) for h in cfg.hidden_dims], train.k)
    net_seed, shuffle_seed = (
        int(s.generate_state(1)[0]) for s in np.random.SeedSequence(cfg.seed).spawn(2)
    )
    net = init_network(specs, net_seed)
    opt = cfg.optimizer.build()
    shuffle_rng = np.random.default_rng(shuffle_seed)

    x, labels = train.features, train.labels
    n = train.n
    logs = []
    test_acc = float("nan")
    for epoch in range(cfg.epochs):
        weights = RegWeights(
            lambda1=cfg.lambda1, use_correct_reg=cfg.use_correct_reg, epoch_index=epoch
        )
        perm = shuffle_rng.permutation(n)
        loss_sum = 0.0
        for start in range(0, n, cfg.batch_size):
            rows = perm[start : start + cfg.batch_size]
            logits, cache = forward(net, x[rows])
            if not np.all(np.isfinite(logits)):
                raise RuntimeError(
                    f"non-finite logits at epoch {epoch}, batch {start // cfg.batch_size}"
                )
            g = np.zeros((len(rows), train.k))
            batch_loss = 0.0
            for j, r in enumerate(rows):
                lg = composite_loss(loss_kind, inc, act, weights, logits[j], int(labels[r]))
                batch_loss += lg.loss
                g[j] = lg.grad
            if not np.isfinite(batch_loss):
                raise RuntimeError(
                    f"non-finite loss at epoch {epoch}, batch {start // cfg.batch_size}"
                )
            loss_sum += batch_loss
            step(net, opt, backward(net, cache, g / len(rows)))
        train_acc, zero_ev, mean_vac = _train_stats(net, train, act, baseline, cfg.zero_ev_taus)
        if test is not None and (epoch % cfg.eval_every == 0 or epoch == cfg.epochs - 1):
            preds = _predict_rows(forward(net, test.features)[0], act, baseline)
            test_acc = float((preds == test.labels).mean())
        logs.append(
            EpochLog(
                epoch=epoch,
                train_loss=loss_sum / n,
                train_acc=train_acc,
                test_acc=train_acc if test is None else test_acc,
                zero_ev=zero_ev,
                mean_vacuity=mean_vac,
            )
        )
    records = evaluate(net, test if test is not None else train, act, baseline)
    ood_records = evaluate(net, ood, act, baseline) if ood is not None else None
    return RunResult(config=cfg, logs=logs, net=net, records=records, ood_records=ood_records)


def epoch_csv_header(taus) -> str:
    zero_cols = ",".join(f"zero_ev_{repr(float(t))}" for t in taus)
    return f"epoch,train_loss,train_acc,test_acc,{zero_cols},mean_vacuity"


def save_epoch_csv(logs, taus, path) -> None:
    lines = [epoch_csv_header(taus)]
    for log in logs:
        zero = ",".join(str(log.zero_ev[float(t)]) for t in taus)
        lines.append(
            f"{log.epoch},{log.train_loss:.17g},{log.train_acc:.17g},"
            f"{log.test_acc:.17g},{zero},{log.mean_vacuity:.17g}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


@dataclass
class SweepRow:
    lambda1: float
    seed: int
    final_train_acc: float
    final_test_acc: float
    census: CensusBuckets
    mean_test_vacuity: float


def derive_sweep_seed(base_seed: int, index: int) -> int:
    """Stable per-grid-point seed, independent of worker scheduling."""
    return int(np.random.SeedSequence([int(base_seed), int(index)]).generate_state(1)[0])


def _sweep_point(args: tuple) -> SweepRow:
    base_doc, lam, index = args
    cfg = ExperimentConfig.from_dict(base_doc)
    cfg.lambda1 = float(lam)
    cfg.seed = derive_sweep_seed(base_doc["seed"], index)
    cfg.name = f"{cfg.name}-lam{lam:g}"
    result = run_experiment(cfg)
    vac = [r.vacuity for r in result.records]
    return SweepRow(
        lambda1=float(lam),
        seed=cfg.seed,
        final_train_acc=result.final_train_acc,
        final_test_acc=result.final_test_acc,
        census=evidence_census(result.records),
        mean_test_vacuity=sum(vac) / len(vac),
    )


def sweep(base: ExperimentConfig, grid, workers: int = 1) -> list:
    """Run one experiment per lambda1 grid point; rows come back in grid order."""
    grid = [float(g) for g in grid]
    if not grid:
        raise ConfigError("sweep grid: must be nonempty")
    base.validate()
    args = [(base.to_dict(), lam, i) for i, lam in enumerate(grid)]
    if workers <= 1:
        return [_sweep_point(a) for a in args]
    with multiprocessing.get_context("fork").Pool(workers) as pool:
        return pool.map(_sweep_point, args)
