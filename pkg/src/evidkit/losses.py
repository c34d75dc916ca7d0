"""Evidential losses and the softmax baseline, with analytic logit gradients.

All gradients are composed as (dL/d alpha_k) * (d e_k / d o_k) and are
validated against central finite differences by the gradcheck module.
"""

from __future__ import annotations

from enum import Enum
from typing import NamedTuple

import numpy as np

from .evidence import Activation, EvidenceState, evidence_dact, evidence_state
from .special import digamma, trigamma

__all__ = [
    "Loss",
    "LossGrad",
    "one_hot",
    "softmax",
    "loss_ev_mse",
    "loss_ev_ce",
    "loss_ev_log",
    "loss_softmax_ce",
    "grad_logits",
]


class Loss(str, Enum):
    EV_MSE = "ev_mse"
    EV_CE = "ev_ce"
    EV_LOG = "ev_log"
    SOFTMAX_CE = "softmax_ce"


EVIDENTIAL_LOSSES = (Loss.EV_MSE, Loss.EV_CE, Loss.EV_LOG)


class LossGrad(NamedTuple):
    """Scalar loss plus d loss / d logits."""

    loss: float
    grad: np.ndarray


def one_hot(gt: int, k: int) -> np.ndarray:
    if not 0 <= gt < k:
        raise ValueError(f"label {gt} out of range for {k} classes")
    y = np.zeros(k)
    y[gt] = 1.0
    return y


def _check_gt(state_k: int, gt: int) -> int:
    gt = int(gt)
    if not 0 <= gt < state_k:
        raise ValueError(f"label {gt} out of range for {state_k} classes")
    return gt


def loss_ev_mse(state: EvidenceState, gt: int) -> float:
    """Sum-of-squares Bayes risk, sum_j (y_j - a_j/S)^2 + a_j(S-a_j)/(S^2(S+1)).

    Bounded in [0, 2] for any valid state.
    """
    gt = _check_gt(state.k, gt)
    a, s = state.alpha, state.strength
    y = one_hot(gt, state.k)
    return float(((y - a / s) ** 2).sum() + (a * (s - a)).sum() / (s * s * (s + 1.0)))


def loss_ev_ce(state: EvidenceState, gt: int) -> float:
    """Cross-entropy Bayes risk, psi(S) - psi(alpha_gt)."""
    gt = _check_gt(state.k, gt)
    return digamma(state.strength) - digamma(float(state.alpha[gt]))


def loss_ev_log(state: EvidenceState, gt: int) -> float:
    """Type II maximum likelihood loss, log S - log alpha_gt."""
    gt = _check_gt(state.k, gt)
    return float(np.log(state.strength) - np.log(state.alpha[gt]))


def softmax(o) -> np.ndarray:
    """Softmax with max-shift for numerical stability."""
    o = np.asarray(o, dtype=float)
    z = np.exp(o - o.max())
    return z / z.sum()


def loss_softmax_ce(o, gt: int) -> LossGrad:
    """Standard cross-entropy on logits; grad_k = softmax_k - y_k in [-1, 1]."""
    o = np.asarray(o, dtype=float)
    gt = _check_gt(o.shape[0], gt)
    m = float(o.max())
    loss = m + float(np.log(np.exp(o - m).sum())) - float(o[gt])
    grad = softmax(o)
    grad[gt] -= 1.0
    return LossGrad(loss, grad)


def _dalpha_ev_mse(state: EvidenceState, gt: int) -> np.ndarray:
    a, s = state.alpha, state.strength
    y = one_hot(gt, state.k)
    # pair_sum = sum over unordered pairs i < j of a_i a_j
    pair_sum = (s * s - float(a @ a)) / 2.0
    return (
        2.0 * a[gt] / s**2
        - 2.0 * y / s
        - 2.0 * (s - a) / (s * (s + 1.0))
        + 2.0 * (2.0 * s + 1.0) * pair_sum / (s * s + s) ** 2
    )


def _dalpha_ev_ce(state: EvidenceState, gt: int) -> np.ndarray:
    y = one_hot(gt, state.k)
    return trigamma(state.strength) - y * trigamma(float(state.alpha[gt]))


def _dalpha_ev_log(state: EvidenceState, gt: int) -> np.ndarray:
    y = one_hot(gt, state.k)
    return 1.0 / state.strength - y / state.alpha


_DALPHA = {
    Loss.EV_MSE: _dalpha_ev_mse,
    Loss.EV_CE: _dalpha_ev_ce,
    Loss.EV_LOG: _dalpha_ev_log,
}

_LOSS_VALUE = {
    Loss.EV_MSE: loss_ev_mse,
    Loss.EV_CE: loss_ev_ce,
    Loss.EV_LOG: loss_ev_log,
}


def grad_logits(kind: Loss, act: Activation, o, gt: int) -> LossGrad:
    """Loss value and analytic d loss / d o for one sample."""
    o = np.asarray(o, dtype=float)
    gt = _check_gt(o.shape[0], gt)
    if kind == Loss.SOFTMAX_CE:
        return loss_softmax_ce(o, gt)
    state = evidence_state(act, o)
    dact = evidence_dact(state)
    value = _LOSS_VALUE[kind](state, gt)
    grad = _DALPHA[kind](state, gt) * dact
    return LossGrad(value, grad)
