"""AdamW with decoupled weight decay, EMA shadow weights, LR scheduling."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .tensor import NonFiniteError, Parameter


class AdamWState:
    """Per-parameter first/second moments plus shared hyperparameters."""

    def __init__(self, params: list[Parameter], lr: float = 1e-4, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8, weight_decay: float = 1e-2):
        self.step = 0
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.weight_decay = weight_decay
        self.m = {id(p): np.zeros_like(p.value) for p in params}
        self.v = {id(p): np.zeros_like(p.value) for p in params}


def adamw_step(params: list[Parameter], state: AdamWState, lr: float | None = None):
    """One decoupled-weight-decay Adam update; grads are left for the caller to zero."""
    lr = state.lr if lr is None else lr
    for p in params:
        if not np.all(np.isfinite(p.grad)):
            raise NonFiniteError(f"non-finite gradient in parameter {p.name!r}; step aborted")
    state.step += 1
    b1, b2 = state.beta1, state.beta2
    bc1 = 1.0 - b1 ** state.step
    bc2 = 1.0 - b2 ** state.step
    for p in params:
        m = state.m[id(p)]
        v = state.v[id(p)]
        m *= b1
        m += (1.0 - b1) * p.grad
        v *= b2
        v += (1.0 - b2) * p.grad * p.grad
        if state.weight_decay:
            p.value *= 1.0 - lr * state.weight_decay
        p.value -= lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)


class EMAState:
    """Exponential moving average of parameter values (shadow weights)."""

    def __init__(self, momentum: float = 0.9999):
        if not 0.0 <= momentum < 1.0:
            raise ValueError(f"EMA momentum must be in [0, 1), got {momentum}")
        self.momentum = momentum
        self.shadow: dict[str, np.ndarray] = {}


def ema_update(params: list[Parameter], state: EMAState):
    """shadow = momentum * shadow + (1 - momentum) * value; first call copies."""
    mom = state.momentum
    for p in params:
        prev = state.shadow.get(p.name)
        if prev is None:
            state.shadow[p.name] = p.value.copy()
        else:
            state.shadow[p.name] = mom * prev + (1.0 - mom) * p.value


@dataclass
class LRSchedule:
    """Linear warmup then reduce-on-plateau, clamped to [min_lr, base_lr]."""

    base_lr: float = 1e-4
    min_lr: float = 1e-6
    warmup_steps: int = 100
    plateau_patience: int = 5
    plateau_factor: float = 0.5
    _factor: float = field(default=1.0, repr=False)
    _best: float = field(default=np.inf, repr=False)
    _stale: int = field(default=0, repr=False)

    def __post_init__(self):
        if not 0.0 < self.plateau_factor < 1.0:
            raise ValueError("plateau_factor must lie in (0, 1)")


def schedule_lr(sched: LRSchedule, step: int, plateau_signal: float | None = None) -> float:
    """Emit the LR for `step`; lower `plateau_signal` values count as improvement."""
    if step < 0:
        raise ValueError("step must be non-negative")
    if plateau_signal is not None:
        if plateau_signal < sched._best:
            sched._best = plateau_signal
            sched._stale = 0
        else:
            sched._stale += 1
            if sched._stale >= sched.plateau_patience:
                sched._factor *= sched.plateau_factor
                sched._stale = 0
    if step < sched.warmup_steps:
        lr = sched.base_lr * (step + 1) / sched.warmup_steps
    else:
        lr = sched.base_lr * sched._factor
    return float(min(sched.base_lr, max(sched.min_lr, lr)))
