"""Tape-based reverse-mode autodiff over a fixed op vocabulary.

The graph is built eagerly: every op returns a `Tensor` node holding the
forward value plus a backward closure. `backward(loss)` walks the recorded
graph once; a second walk without re-running the forward raises
`StaleGraphError`. Trainable leaves are `Parameter`s whose `.grad` buffers
the ops accumulate into directly.
"""

from __future__ import annotations

from typing import Callable, Iterable

import numpy as np


class NNKitError(Exception):
    """Base class for compute-kit failures."""


class ShapeError(NNKitError):
    """Operand shapes are incompatible; message reports both shapes."""


class StaleGraphError(NNKitError):
    """backward() called twice on the same recorded graph."""


class NonFiniteError(NNKitError):
    """A gradient or loss stopped being finite."""


_grad_enabled = True


class no_grad:
    """Context manager: skip tape recording inside the block."""

    def __enter__(self):
        global _grad_enabled
        self._prev = _grad_enabled
        _grad_enabled = False
        return self

    def __exit__(self, *exc):
        global _grad_enabled
        _grad_enabled = self._prev
        return False


def grad_enabled() -> bool:
    return _grad_enabled


class Tensor:
    """A node in the recorded computation: dense row-major float array."""

    __slots__ = ("data", "grad", "_parents", "_backward", "_consumed")

    def __init__(self, data, parents: tuple = (), backward: Callable | None = None):
        self.data = np.asarray(data)
        if self.data.dtype not in (np.float32, np.float64):
            self.data = self.data.astype(np.float64)
        self.grad: np.ndarray | None = None
        if _grad_enabled:
            self._parents = parents
            self._backward = backward
        else:
            self._parents = ()
            self._backward = None
        self._consumed = False

    @property
    def shape(self) -> tuple:
        return self.data.shape

    @property
    def dtype(self):
        return self.data.dtype

    def item(self) -> float:
        return float(self.data)

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, dtype={self.data.dtype})"


class Parameter:
    """Trainable leaf: value plus persistent gradient buffer."""

    __slots__ = ("value", "grad", "name")

    def __init__(self, value, name: str = ""):
        self.value = np.asarray(value)
        if self.value.dtype not in (np.float32, np.float64):
            self.value = self.value.astype(np.float64)
        self.grad = np.zeros_like(self.value)
        self.name = name

    @property
    def shape(self) -> tuple:
        return self.value.shape

    def zero_grad(self):
        self.grad[...] = 0.0

    def __repr__(self):
        return f"Parameter({self.name!r}, shape={self.value.shape})"


def accumulate(node: Tensor, g: np.ndarray):
    """Add an incoming gradient to a node, materializing the buffer lazily."""
    if node.grad is None:
        node.grad = np.zeros_like(node.data)
    node.grad += g


def backward(loss: Tensor):
    """Propagate d(loss)/d(node) through the recorded graph.

    Every reachable `Parameter.grad` ends up holding the accumulated
    gradient; unreachable parameters keep whatever they held (zeros if the
    caller zeroed them). Reusing a consumed graph raises StaleGraphError.
    """
    if loss.data.size != 1:
        raise ShapeError(f"backward expects a scalar loss, got shape {loss.data.shape}")
    if loss._consumed:
        raise StaleGraphError("backward() called twice without re-running the forward pass")
    loss._consumed = True

    topo: list[Tensor] = []
    seen: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(loss, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            topo.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if id(parent) not in seen:
                stack.append((parent, False))

    loss.grad = np.ones_like(loss.data)
    for node in reversed(topo):
        if node._backward is not None and node.grad is not None:
            node._backward(node.grad)


def unbroadcast(g: np.ndarray, shape: tuple) -> np.ndarray:
    """Reduce a broadcasted gradient back to the original operand shape."""
    if g.shape == shape:
        return g
    extra = g.ndim - len(shape)
    if extra > 0:
        g = g.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and g.shape[i] != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g.reshape(shape)


def as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(np.asarray(x))


def require_finite(arrays: Iterable[np.ndarray], what: str):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise NonFiniteError(f"non-finite values in {what}")
