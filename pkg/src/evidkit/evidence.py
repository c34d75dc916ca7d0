"""Evidence head: logits -> (evidence, alpha, strength, vacuity, beliefs).

The non-negative activation replaces the softmax layer. Every gradient
formula downstream is composed against the activation derivative exposed
here.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "LOGIT_CLAMP",
    "Activation",
    "EvidenceState",
    "activation_apply",
    "activation_grad",
    "evidence_state",
    "evidence_dact",
    "predict_class",
    "is_zero_evidence",
]

# Logits are clamped to at most this value before exponentiation inside
# evidence_state, keeping evidence <= ~1e13 and never producing inf/nan.
# Gradient checks skip coordinates at or above the clamp.
LOGIT_CLAMP = 30.0

# Default mean-evidence thresholds for the zero-evidence predicate: tau = 0
# is the exact stall condition under ReLU, the rest are census buckets.
ZERO_EVIDENCE_TAUS = (0.0, 0.01, 0.1, 1.0)


class Activation(str, Enum):
    RELU = "relu"
    SOFTPLUS = "softplus"
    EXP = "exp"


@dataclass(frozen=True)
class EvidenceState:
    """Per-sample Dirichlet bundle derived from one logit vector.

    The state remembers the activation kind and the raw logits it was
    built from, so downstream terms can recover d e_k / d o_k without the
    caller re-threading them (see evidence_dact).
    """

    evidence: np.ndarray  # e_k >= 0
    alpha: np.ndarray  # e_k + 1
    strength: float  # S = K + sum e
    vacuity: float  # K / S
    beliefs: np.ndarray  # e_k / S
    kind: Activation
    logits: np.ndarray  # raw (unclamped) logits o

    @property
    def k(self) -> int:
        return self.evidence.shape[0]


def _sigmoid(o: np.ndarray) -> np.ndarray:
    out = np.empty_like(o)
    pos = o >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-o[pos]))
    ex = np.exp(o[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def activation_apply(kind: Activation, o) -> np.ndarray:
    """Map logits to evidence: ReLU, SoftPlus, or exp, elementwise."""
    o = np.asarray(o, dtype=float)
    if kind == Activation.RELU:
        return np.maximum(o, 0.0)
    if kind == Activation.SOFTPLUS:
        return np.logaddexp(0.0, o)
    if kind == Activation.EXP:
        return np.exp(o)
    raise ValueError(f"unknown activation kind: {kind!r}")


def activation_grad(kind: Activation, o):
    """Derivative of the activation at o (scalar or array, elementwise).

    ReLU uses the case split d/do = 1 if o > 0 else 0, so the derivative
    at exactly 0 is 0.
    """
    arr = np.asarray(o, dtype=float)
    if kind == Activation.RELU:
        out = (arr > 0.0).astype(float)
    elif kind == Activation.SOFTPLUS:
        out = _sigmoid(np.atleast_1d(arr))
        out = out.reshape(arr.shape)
    elif kind == Activation.EXP:
        out = np.exp(arr)
    else:
        raise ValueError(f"unknown activation kind: {kind!r}")
    if np.isscalar(o) or arr.ndim == 0:
        return float(out)
    return out


def evidence_state(kind: Activation, o) -> EvidenceState:
    """Build the EvidenceState for one logit vector.

    Under EXP the logits are clamped to LOGIT_CLAMP before exponentiation
    so the state is always finite.
    """
    o = np.array(o, dtype=float)  # private copy: the state keeps it
    if o.ndim != 1:
        raise ValueError(f"expected a 1-d logit vector, got shape {o.shape}")
    if o.shape[0] < 2:
        raise ValueError("need at least 2 classes")
    if not np.all(np.isfinite(o)):
        raise ValueError("logits must be finite")
    if kind == Activation.EXP:
        e = np.exp(np.minimum(o, LOGIT_CLAMP))
    else:
        e = activation_apply(kind, o)
    k = o.shape[0]
    strength = k + float(e.sum())
    alpha = e + 1.0
    beliefs = e / strength
    for arr in (e, alpha, beliefs, o):
        arr.flags.writeable = False
    return EvidenceState(
        evidence=e,
        alpha=alpha,
        strength=strength,
        vacuity=k / strength,
        beliefs=beliefs,
        kind=Activation(kind),
        logits=o,
    )


def evidence_dact(state: EvidenceState) -> np.ndarray:
    """d e_k / d o_k at the state's own logits, elementwise.

    Under EXP this is the clamped evidence itself: past the clamp the
    forward map is flat, but training keeps the pre-clamp slope as a
    subgradient so saturated coordinates still receive signal. Gradient
    checks skip coordinates at the clamp for exactly this reason.
    """
    if state.kind == Activation.EXP:
        return state.evidence
    return np.asarray(activation_grad(state.kind, state.logits), dtype=float)


def predict_class(state: EvidenceState) -> int:
    """Class with the greatest evidence; ties go to the lowest index."""
    return int(np.argmax(state.evidence))


def is_zero_evidence(state: EvidenceState, tau: float) -> bool:
    """True iff the mean evidence (sum e_k)/K is at most tau."""
    if tau < 0:
        raise ValueError("tau must be >= 0")
    return float(state.evidence.sum()) / state.k <= tau
