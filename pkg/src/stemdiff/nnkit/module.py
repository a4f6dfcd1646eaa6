"""Minimal parameter-container base for model classes."""

from __future__ import annotations

import numpy as np

from .checkpoint import load_tensors, save_tensors
from .ops import FilmProjection
from .tensor import Parameter


class Module:
    """Collects Parameters from attributes, lists, and nested Modules."""

    def parameters(self) -> list[Parameter]:
        return [p for _, p in self.named_parameters()]

    def named_parameters(self) -> list[tuple[str, Parameter]]:
        out: list[tuple[str, Parameter]] = []
        seen: set[int] = set()

        def visit(obj, prefix):
            if isinstance(obj, Parameter):
                if id(obj) not in seen:
                    seen.add(id(obj))
                    out.append((prefix, obj))
            elif isinstance(obj, (Module, FilmProjection)):
                for k, v in vars(obj).items():
                    visit(v, f"{prefix}.{k}" if prefix else k)
            elif isinstance(obj, (list, tuple)):
                for i, v in enumerate(obj):
                    visit(v, f"{prefix}.{i}")

        visit(self, "")
        return out

    def state_dict(self) -> dict[str, np.ndarray]:
        return {name: p.value for name, p in self.named_parameters()}

    def load_state_dict(self, state: dict[str, np.ndarray]):
        for name, p in self.named_parameters():
            if name not in state:
                raise KeyError(f"missing parameter in state: {name}")
            arr = np.asarray(state[name], dtype=p.value.dtype)
            if arr.shape != p.value.shape:
                raise ValueError(f"shape mismatch for {name}: {arr.shape} vs {p.value.shape}")
            p.value[...] = arr

    def save(self, path, ema_shadow: dict[str, np.ndarray] | None = None,
             meta: dict[str, np.ndarray] | None = None):
        tensors = {k: v for k, v in self.state_dict().items()}
        if ema_shadow:
            tensors.update({f"ema/{k}": v for k, v in ema_shadow.items()})
        if meta:
            tensors.update({f"meta/{k}": v for k, v in meta.items()})
        save_tensors(path, tensors)

    def load(self, path, prefer_ema: bool = False) -> dict[str, np.ndarray]:
        """Load weights from a checkpoint; returns the raw tensor dict."""
        tensors = load_tensors(path)
        plain = {k: v for k, v in tensors.items() if "/" not in k}
        if prefer_ema:
            ema = {k[len("ema/"):]: v for k, v in tensors.items() if k.startswith("ema/")}
            if ema:
                plain = {**plain, **ema}
        self.load_state_dict(plain)
        return tensors


def kaiming_uniform(rng: np.random.Generator, shape: tuple, fan_in: int, dtype=np.float32) -> np.ndarray:
    bound = np.sqrt(6.0 / fan_in)
    return rng.uniform(-bound, bound, size=shape).astype(dtype)
