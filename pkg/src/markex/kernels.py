"""Backend selection for the colored-walk hot loop.

The compiled extension ``markex._walk`` is used when importable; otherwise the
pure-Python twin in ``markex._walk_py`` is used.  Both consume the same uniform
stream with the same floating-point operation order, so paths are
bit-identical across backends.  Set ``MARKEX_PURE_PYTHON=1`` to force the
fallback.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import _walk_py
from .errors import ModelError

try:
    if os.environ.get("MARKEX_PURE_PYTHON"):
        raise ImportError("pure Python backend forced")
    from . import _walk as _compiled
except ImportError:  # pragma: no cover - depends on build
    _compiled = None

BACKEND = "cython" if _compiled is not None else "python"


def get_kernel(backend: str | None = None):
    """Return the ``colored_walk`` implementation for ``backend`` (default: active one)."""
    backend = backend or BACKEND
    if backend == "cython":
        if _compiled is None:
            raise ImportError("compiled kernel markex._walk is not available")
        return _compiled.colored_walk
    if backend == "python":
        return _walk_py.colored_walk
    raise ValueError(f"unknown backend {backend!r}")


@dataclass
class WalkState:
    """Color and edge counts of a walk, indexed as in :class:`CompiledGraph`."""

    color_counts: np.ndarray
    edge_counts: np.ndarray

    @classmethod
    def empty(cls, compiled) -> "WalkState":
        return cls(
            np.zeros(compiled.n_colors, dtype=np.int64),
            np.zeros(len(compiled.edge_dst), dtype=np.int64),
        )

    def copy(self) -> "WalkState":
        return WalkState(self.color_counts.copy(), self.edge_counts.copy())


def run_colored_walk(
    compiled,
    x0: int,
    uniforms: np.ndarray,
    increment: float = 1.0,
    target: int = -1,
    state: WalkState | None = None,
    backend: str | None = None,
) -> tuple[np.ndarray, np.ndarray, WalkState]:
    """Run ``len(uniforms) // 2`` steps of the colored walk from vertex index ``x0``.

    Returns ``(path, trace, state)``: visited vertex indices after each step,
    the predictive probability of ``target`` evaluated before each step (zeros
    when ``target < 0``) and the final counts.  ``state`` is updated in place
    when supplied.
    """
    uniforms = np.ascontiguousarray(uniforms, dtype=np.float64)
    n = len(uniforms) // 2
    state = state or WalkState.empty(compiled)
    path = np.zeros(n, dtype=np.int64)
    trace = np.zeros(n, dtype=np.float64)
    done = get_kernel(backend)(
        compiled.vc_ptr, compiled.slot_color, compiled.slot_ptr, compiled.edge_dst,
        compiled.alpha, compiled.beta, int(x0), uniforms, float(increment), int(target),
        state.color_counts, state.edge_counts, path, trace,
    )
    if done < n:
        at = path[done - 1] if done else x0
        raise ModelError(f"walk reached vertex index {at} with no outgoing edges")
    return path, trace, state
