"""Fixed op vocabulary with hand-derived backward passes.

Every op validates shapes, computes the forward value with numpy, and
records a closure that pushes gradients to its tensor parents and straight
into any `Parameter.grad` it closed over.
"""

from __future__ import annotations

import numpy as np

from .tensor import Parameter, ShapeError, Tensor, accumulate, as_tensor, grad_enabled, unbroadcast


def _node(data, parents, backward) -> Tensor:
    if grad_enabled():
        return Tensor(data, parents=parents, backward=backward)
    return Tensor(data)


# ---------------------------------------------------------------------------
# dense / conv layers


def linear(x: Tensor, w: Parameter, b: Parameter | None = None) -> Tensor:
    """y = x @ w + b with contraction over the last axis of x."""
    x = as_tensor(x)
    if x.data.shape[-1] != w.value.shape[0]:
        raise ShapeError(f"linear: x {x.data.shape} incompatible with w {w.value.shape}")
    y = x.data @ w.value
    if b is not None:
        if b.value.shape != (w.value.shape[1],):
            raise ShapeError(f"linear: b {b.value.shape} incompatible with w {w.value.shape}")
        y = y + b.value

    def bw(g):
        accumulate(x, g @ w.value.T)
        xf = x.data.reshape(-1, x.data.shape[-1])
        gf = g.reshape(-1, g.shape[-1])
        w.grad += xf.T @ gf
        if b is not None:
            b.grad += gf.sum(axis=0)

    return _node(y, (x,), bw)


def conv1d(x: Tensor, w: Parameter, b: Parameter | None = None, stride: int = 1, padding: int = 0) -> Tensor:
    """1-D convolution: x (B, C_in, L), w (C_out, C_in, K) -> (B, C_out, L_out)."""
    x = as_tensor(x)
    if x.data.ndim != 3 or w.value.ndim != 3 or x.data.shape[1] != w.value.shape[1]:
        raise ShapeError(f"conv1d: x {x.data.shape} incompatible with w {w.value.shape}")
    bsz, cin, length = x.data.shape
    cout, _, k = w.value.shape
    xp = x.data if padding == 0 else np.pad(x.data, ((0, 0), (0, 0), (padding, padding)))
    lp = xp.shape[2]
    lout = (lp - k) // stride + 1
    if lout < 1:
        raise ShapeError(f"conv1d: input length {length} too short for kernel {k} stride {stride}")

    s0, s1, s2 = xp.strides
    cols = np.lib.stride_tricks.as_strided(
        xp, shape=(bsz, cin, lout, k), strides=(s0, s1, s2 * stride, s2), writeable=False
    )
    # (B, L_out, C_in*K) @ (C_in*K, C_out)
    cols2 = np.ascontiguousarray(cols.transpose(0, 2, 1, 3)).reshape(bsz, lout, cin * k)
    wm = w.value.reshape(cout, cin * k).T
    y = (cols2 @ wm).transpose(0, 2, 1)
    if b is not None:
        y = y + b.value[None, :, None]

    def bw(g):
        gf = g.transpose(0, 2, 1)  # (B, L_out, C_out)
        w.grad += (
            gf.reshape(-1, cout).T @ cols2.reshape(-1, cin * k)
        ).reshape(cout, cin, k)
        if b is not None:
            b.grad += g.sum(axis=(0, 2))
        dcols = (gf @ wm.T).reshape(bsz, lout, cin, k).transpose(0, 2, 1, 3)
        dxp = np.zeros_like(xp)
        for j in range(k):
            dxp[:, :, j : j + lout * stride : stride] += dcols[:, :, :, j]
        accumulate(x, dxp[:, :, padding : padding + length] if padding else dxp)

    return _node(y, (x,), bw)


# ---------------------------------------------------------------------------
# activations and normalization


def silu(x: Tensor) -> Tensor:
    x = as_tensor(x)
    sig = 1.0 / (1.0 + np.exp(-x.data))
    y = x.data * sig

    def bw(g):
        accumulate(x, g * sig * (1.0 + x.data * (1.0 - sig)))

    return _node(y, (x,), bw)


def tanh(x: Tensor) -> Tensor:
    x = as_tensor(x)
    y = np.tanh(x.data)

    def bw(g):
        accumulate(x, g * (1.0 - y * y))

    return _node(y, (x,), bw)


def group_norm(x: Tensor, gamma: Parameter, beta: Parameter, groups: int, eps: float = 1e-5) -> Tensor:
    """Per-group normalization over (channels/groups, spatial) of x (B, C, L)."""
    x = as_tensor(x)
    bsz, c, length = x.data.shape
    if c % groups != 0:
        raise ShapeError(f"group_norm: {c} channels not divisible by {groups} groups")
    xg = x.data.reshape(bsz, groups, c // groups, length)
    mu = xg.mean(axis=(2, 3), keepdims=True)
    var = xg.var(axis=(2, 3), keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = (xg - mu) * inv
    y = xhat.reshape(bsz, c, length) * gamma.value[None, :, None] + beta.value[None, :, None]

    def bw(g):
        gamma.grad += (g * xhat.reshape(bsz, c, length)).sum(axis=(0, 2))
        beta.grad += g.sum(axis=(0, 2))
        gh = (g * gamma.value[None, :, None]).reshape(bsz, groups, c // groups, length)
        dot = (gh * xhat).mean(axis=(2, 3), keepdims=True)
        mean_g = gh.mean(axis=(2, 3), keepdims=True)
        dx = inv * (gh - mean_g - xhat * dot)
        accumulate(x, dx.reshape(bsz, c, length))

    return _node(y, (x,), bw)


class FilmProjection:
    """Two zero-initialized linear maps producing per-channel scale and shift."""

    def __init__(self, embed_dim: int, channels: int, name: str = "film", dtype=np.float32):
        z = np.zeros((embed_dim, channels), dtype=dtype)
        self.w_scale = Parameter(z.copy(), f"{name}.w_scale")
        self.b_scale = Parameter(np.zeros(channels, dtype=dtype), f"{name}.b_scale")
        self.w_shift = Parameter(z.copy(), f"{name}.w_shift")
        self.b_shift = Parameter(np.zeros(channels, dtype=dtype), f"{name}.b_shift")

    def parameters(self):
        return [self.w_scale, self.b_scale, self.w_shift, self.b_shift]


def film(h: Tensor, embedding: Tensor, proj: FilmProjection) -> Tensor:
    """Feature-wise modulation h * (1 + scale) + shift; zero proj is identity."""
    h = as_tensor(h)
    embedding = as_tensor(embedding)
    if embedding.data.ndim != 2 or embedding.data.shape[0] != h.data.shape[0]:
        raise ShapeError(
            f"film: embedding {embedding.data.shape} does not match batch of h {h.data.shape}"
        )
    scale = linear(embedding, proj.w_scale, proj.b_scale)
    shift = linear(embedding, proj.w_shift, proj.b_shift)
    if h.data.ndim == 3:
        scale = reshape(scale, (*scale.data.shape, 1))
        shift = reshape(shift, (*shift.data.shape, 1))
    elif h.data.ndim != 2:
        raise ShapeError(f"film: h must be 2-D or 3-D, got {h.data.shape}")
    return add(mul(h, add_const(scale, 1.0)), shift)


# ---------------------------------------------------------------------------
# pointwise arithmetic


def add(a: Tensor, b: Tensor) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    y = a.data + b.data

    def bw(g):
        accumulate(a, unbroadcast(g, a.data.shape))
        accumulate(b, unbroadcast(g, b.data.shape))

    return _node(y, (a, b), bw)


def mul(a: Tensor, b: Tensor) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    y = a.data * b.data

    def bw(g):
        accumulate(a, unbroadcast(g * b.data, a.data.shape))
        accumulate(b, unbroadcast(g * a.data, b.data.shape))

    return _node(y, (a, b), bw)


def scale(x: Tensor, c: float) -> Tensor:
    x = as_tensor(x)

    def bw(g):
        accumulate(x, g * c)

    return _node(x.data * c, (x,), bw)


def add_const(x: Tensor, c: float) -> Tensor:
    x = as_tensor(x)

    def bw(g):
        accumulate(x, g)

    return _node(x.data + c, (x,), bw)


def tsum(x: Tensor) -> Tensor:
    x = as_tensor(x)

    def bw(g):
        accumulate(x, np.broadcast_to(g, x.data.shape).astype(x.data.dtype))

    return _node(np.asarray(x.data.sum(), dtype=x.data.dtype), (x,), bw)


def mean(x: Tensor) -> Tensor:
    return scale(tsum(x), 1.0 / as_tensor(x).data.size)


def mse(a: Tensor, b: Tensor) -> Tensor:
    """Mean squared error between same-shape tensors."""
    a, b = as_tensor(a), as_tensor(b)
    if a.data.shape != b.data.shape:
        raise ShapeError(f"mse: shapes {a.data.shape} vs {b.data.shape}")
    diff = a.data - b.data
    n = diff.size

    def bw(g):
        gg = g * 2.0 / n
        accumulate(a, gg * diff)
        accumulate(b, -gg * diff)

    return _node(np.asarray((diff * diff).mean(), dtype=a.data.dtype), (a, b), bw)


# ---------------------------------------------------------------------------
# structural ops


def concat(parts: list[Tensor], axis: int) -> Tensor:
    parts = [as_tensor(p) for p in parts]
    y = np.concatenate([p.data for p in parts], axis=axis)
    sizes = [p.data.shape[axis] for p in parts]
    offsets = np.cumsum([0] + sizes)

    def bw(g):
        for p, lo, hi in zip(parts, offsets[:-1], offsets[1:]):
            idx = [slice(None)] * g.ndim
            idx[axis] = slice(lo, hi)
            accumulate(p, g[tuple(idx)])

    return _node(y, tuple(parts), bw)


def reshape(x: Tensor, shape: tuple) -> Tensor:
    x = as_tensor(x)

    def bw(g):
        accumulate(x, g.reshape(x.data.shape))

    return _node(x.data.reshape(shape), (x,), bw)


def swapaxes(x: Tensor, a: int, b: int) -> Tensor:
    x = as_tensor(x)

    def bw(g):
        accumulate(x, np.swapaxes(g, a, b))

    return _node(np.ascontiguousarray(np.swapaxes(x.data, a, b)), (x,), bw)


def repeat_upsample(x: Tensor, factor: int) -> Tensor:
    """Nearest-neighbor upsample along the last axis; backward pools the repeats."""
    x = as_tensor(x)
    y = np.repeat(x.data, factor, axis=-1)

    def bw(g):
        accumulate(x, g.reshape(*x.data.shape, factor).sum(axis=-1))

    return _node(y, (x,), bw)


def detach(x: Tensor) -> Tensor:
    return Tensor(as_tensor(x).data)


# ---------------------------------------------------------------------------
# non-recorded helpers


def sinusoidal_embedding(values: np.ndarray, dim: int, max_period: float = 1e4) -> np.ndarray:
    """Classic sin/cos positional features of a scalar per batch item."""
    if dim % 2 != 0:
        raise ShapeError("sinusoidal embedding dim must be even")
    half = dim // 2
    freqs = np.exp(-np.log(max_period) * np.arange(half) / half)
    args = np.asarray(values, dtype=np.float64).reshape(-1, 1) * freqs[None, :]
    return np.concatenate([np.sin(args), np.cos(args)], axis=1)
