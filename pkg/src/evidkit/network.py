"""Small dense network with manual forward/backward and first-order optimizers.

Hidden layers use ReLU; the final layer is identity so the network emits
raw logits. The evidential activation is applied downstream by the
evidence head.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

__all__ = [
    "LayerSpec",
    "Network",
    "ForwardCache",
    "OptKind",
    "OptimizerState",
    "init_network",
    "forward",
    "backward",
    "step",
    "dense_specs",
    "save_checkpoint",
    "load_checkpoint",
]

CHECKPOINT_FORMAT = "evidkit-network"
CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class LayerSpec:
    in_dim: int
    out_dim: int
    hidden: bool  # True: ReLU follows the affine map; the final layer must be False


@dataclass
class Network:
    specs: list[LayerSpec]
    weights: list[np.ndarray]  # each (out_dim, in_dim)
    biases: list[np.ndarray]  # each (out_dim,)
    seed: int
    param_version: int = 0

    @property
    def in_dim(self) -> int:
        return self.specs[0].in_dim

    @property
    def out_dim(self) -> int:
        return self.specs[-1].out_dim

    def param_count(self) -> int:
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))


@dataclass
class ForwardCache:
    inputs: list[np.ndarray]  # input to each layer, (N, in_dim)
    pres: list[np.ndarray]  # pre-activation of each layer, (N, out_dim)
    param_version: int


def _validate_specs(specs: list[LayerSpec]) -> None:
    if not specs:
        raise ValueError("need at least one layer")
    for i, spec in enumerate(specs):
        if spec.in_dim < 1 or spec.out_dim < 1:
            raise ValueError(f"layer {i}: dimensions must be >= 1")
        if i + 1 < len(specs) and spec.out_dim != specs[i + 1].in_dim:
            raise ValueError(
                f"layer {i} out_dim {spec.out_dim} does not chain into "
                f"layer {i + 1} in_dim {specs[i + 1].in_dim}"
            )
    if specs[-1].hidden:
        raise ValueError("final layer must be identity (logits are pre-activation)")


def dense_specs(in_dim: int, hidden_dims: list[int], out_dim: int) -> list[LayerSpec]:
    """ReLU hidden stack followed by an identity output layer."""
    dims = [in_dim] + list(hidden_dims) + [out_dim]
    specs = []
    for i in range(len(dims) - 1):
        specs.append(LayerSpec(dims[i], dims[i + 1], hidden=i < len(dims) - 2))
    _validate_specs(specs)
    return specs


def init_network(specs: list[LayerSpec], seed: int) -> Network:
    """Scaled-uniform fan-in init, uniform(+-sqrt(6/fan_in)); biases zero."""
    _validate_specs(specs)
    rng = np.random.default_rng(seed)
    weights = []
    biases = []
    for spec in specs:
        limit = np.sqrt(6.0 / spec.in_dim)
        weights.append(rng.uniform(-limit, limit, (spec.out_dim, spec.in_dim)))
        biases.append(np.zeros(spec.out_dim))
    return Network(specs=list(specs), weights=weights, biases=biases, seed=int(seed))


def forward(net: Network, x) -> tuple[np.ndarray, ForwardCache]:
    """Logits for a batch (N, D) or single sample (D,), plus the backward cache."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    h = np.atleast_2d(x)
    if h.shape[1] != net.in_dim:
        raise ValueError(f"input dim {h.shape[1]} does not match network in_dim {net.in_dim}")
    inputs = []
    pres = []
    for spec, w, b in zip(net.specs, net.weights, net.biases):
        inputs.append(h)
        pre = h @ w.T + b
        pres.append(pre)
        h = np.maximum(pre, 0.0) if spec.hidden else pre
    cache = ForwardCache(inputs=inputs, pres=pres, param_version=net.param_version)
    return (h[0] if single else h), cache


def backward(net: Network, cache: ForwardCache, d_logits) -> list[tuple[np.ndarray, np.ndarray]]:
    """Parameter gradients from d loss / d logits, summed over the batch.

    Pass per-sample gradient rows divided by the batch size to get the
    gradient of the batch-mean loss.
    """
    if cache.param_version != net.param_version:
        raise ValueError("stale cache: network parameters changed since forward")
    if len(cache.inputs) != len(net.specs):
        raise ValueError("cache does not match this network")
    d = np.atleast_2d(np.asarray(d_logits, dtype=float))
    if d.shape != cache.pres[-1].shape:
        raise ValueError(
            f"d_logits shape {d.shape} does not match forward logits shape "
            f"{cache.pres[-1].shape}"
        )
    grads = [None] * len(net.specs)
    for i in reversed(range(len(net.specs))):
        if net.specs[i].hidden:
            d = d * (cache.pres[i] > 0.0)
        grads[i] = (d.T @ cache.inputs[i], d.sum(axis=0))
        if i > 0:
            d = d @ net.weights[i]
    return grads


class OptKind(str, Enum):
    SGD_MOMENTUM = "sgd_momentum"
    ADAM_LIKE = "adam_like"


@dataclass
class OptimizerState:
    kind: OptKind
    lr: float
    momentum: float = 0.9
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    slot1: list[np.ndarray] = field(default_factory=list)  # velocity / first moment
    slot2: list[np.ndarray] = field(default_factory=list)  # second moment (adam)

    def __post_init__(self) -> None:
        self.kind = OptKind(self.kind)
        if self.lr <= 0:
            raise ValueError("learning rate must be > 0")


def _check_grads(net: Network, grads) -> None:
    if len(grads) != len(net.specs):
        raise ValueError(f"expected {len(net.specs)} gradient pairs, got {len(grads)}")
    for i, (dw, db) in enumerate(grads):
        if dw.shape != net.weights[i].shape or db.shape != net.biases[i].shape:
            raise ValueError(f"gradient shape mismatch at layer {i}")
        if not np.all(np.isfinite(dw)):
            raise ValueError(f"non-finite gradient for layer {i} weights")
        if not np.all(np.isfinite(db)):
            raise ValueError(f"non-finite gradient for layer {i} biases")


def step(net: Network, opt: OptimizerState, grads) -> None:
    """Apply one optimizer update in place."""
    _check_grads(net, grads)
    params = list(net.weights) + list(net.biases)
    flat_grads = [g[0] for g in grads] + [g[1] for g in grads]
    if not opt.slot1:
        opt.slot1 = [np.zeros_like(p) for p in params]
        if opt.kind == OptKind.ADAM_LIKE:
            opt.slot2 = [np.zeros_like(p) for p in params]
    if opt.kind == OptKind.SGD_MOMENTUM:
        for p, g, v in zip(params, flat_grads, opt.slot1):
            v *= opt.momentum
            v += g
            p -= opt.lr * v
    else:
        opt.t += 1
        c1 = 1.0 - opt.beta1**opt.t
        c2 = 1.0 - opt.beta2**opt.t
        for p, g, m, v in zip(params, flat_grads, opt.slot1, opt.slot2):
            m *= opt.beta1
            m += (1.0 - opt.beta1) * g
            v *= opt.beta2
            v += (1.0 - opt.beta2) * g * g
            p -= opt.lr * (m / c1) / (np.sqrt(v / c2) + opt.eps)
    net.param_version += 1


def save_checkpoint(net: Network, path) -> None:
    """Versioned JSON checkpoint: layer specs, seed, row-major parameters."""
    doc = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "seed": net.seed,
        "layers": [
            {
                "in_dim": spec.in_dim,
                "out_dim": spec.out_dim,
                "hidden": spec.hidden,
                "weights": w.reshape(-1).tolist(),
                "biases": b.tolist(),
            }
            for spec, w, b in zip(net.specs, net.weights, net.biases)
        ],
    }
    Path(path).write_text(json.dumps(doc, indent=1))


def load_checkpoint(path) -> Network:
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != CHECKPOINT_FORMAT:
        raise ValueError(f"not a network checkpoint: {path}")
    if doc.get("version") != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version: {doc.get('version')}")
    specs = []
    weights = []
    biases = []
    for i, layer in enumerate(doc["layers"]):
        spec = LayerSpec(int(layer["in_dim"]), int(layer["out_dim"]), bool(layer["hidden"]))
        w = np.asarray(layer["weights"], dtype=float)
        if w.size != spec.out_dim * spec.in_dim:
            raise ValueError(f"layer {i}: weight count does not match dimensions")
        specs.append(spec)
        weights.append(w.reshape(spec.out_dim, spec.in_dim))
        biases.append(np.asarray(layer["biases"], dtype=float))
    _validate_specs(specs)
    return Network(specs=specs, weights=weights, biases=biases, seed=int(doc["seed"]))
