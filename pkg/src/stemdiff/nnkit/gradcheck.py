"""Central finite-difference verification of recorded backward passes."""

from __future__ import annotations

from typing import Callable

import numpy as np

from .tensor import Parameter, Tensor, backward


def numeric_gradient(f: Callable[[], float], array: np.ndarray, eps: float = 1e-6) -> np.ndarray:
    """Central differences of scalar f() with respect to `array`, in place."""
    g = np.zeros_like(array, dtype=np.float64)
    flat = array.reshape(-1)
    gf = g.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + eps
        hi = f()
        flat[i] = orig - eps
        lo = f()
        flat[i] = orig
        gf[i] = (hi - lo) / (2.0 * eps)
    return g


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    denom = max(np.abs(analytic).max(initial=0.0), np.abs(numeric).max(initial=0.0), 1.0)
    return float(np.abs(analytic - numeric).max(initial=0.0) / denom)


def check_gradients(build: Callable[[], Tensor], wrt: list[Parameter | Tensor],
                    eps: float = 1e-6) -> float:
    """Compare recorded gradients of build() against finite differences.

    `build` must re-run the forward pass from the current leaf values each
    call. Returns the worst relative error across all checked leaves.
    """
    for leaf in wrt:
        if isinstance(leaf, Parameter):
            leaf.zero_grad()
        else:
            leaf.grad = None
    loss = build()
    backward(loss)
    worst = 0.0
    for leaf in wrt:
        if isinstance(leaf, Parameter):
            analytic = leaf.grad.copy()
            array = leaf.value
        else:
            analytic = np.zeros_like(leaf.data) if leaf.grad is None else leaf.grad.copy()
            array = leaf.data
        numeric = numeric_gradient(lambda: float(build().data), array, eps=eps)
        worst = max(worst, relative_error(analytic, numeric))
    return worst
