"""Minimal differentiable compute kit: tensors, layers, AdamW, EMA, gradcheck."""

from .checkpoint import CheckpointError, load_tensors, pack_hash, save_tensors, unpack_hash
from .gradcheck import check_gradients, numeric_gradient, relative_error
from .module import Module, kaiming_uniform
from .ops import (
    FilmProjection,
    add,
    add_const,
    concat,
    conv1d,
    detach,
    film,
    group_norm,
    linear,
    mean,
    mse,
    mul,
    repeat_upsample,
    reshape,
    scale,
    silu,
    sinusoidal_embedding,
    swapaxes,
    tanh,
    tsum,
)
from .optim import AdamWState, EMAState, LRSchedule, adamw_step, ema_update, schedule_lr
from .tensor import (
    NNKitError,
    NonFiniteError,
    Parameter,
    ShapeError,
    StaleGraphError,
    Tensor,
    backward,
    no_grad,
)

__all__ = [
    "AdamWState", "CheckpointError", "EMAState", "FilmProjection", "LRSchedule",
    "Module", "NNKitError", "NonFiniteError", "Parameter", "ShapeError",
    "StaleGraphError", "Tensor", "add", "add_const", "adamw_step", "backward",
    "check_gradients", "concat", "conv1d", "detach", "ema_update", "film",
    "group_norm", "kaiming_uniform", "linear", "load_tensors", "mean", "mse",
    "mul", "no_grad", "numeric_gradient", "pack_hash", "relative_error",
    "repeat_upsample", "reshape", "save_tensors", "scale", "schedule_lr",
    "silu", "sinusoidal_embedding", "swapaxes", "tanh", "tsum", "unpack_hash",
]
