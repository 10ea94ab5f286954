"""Kernel backend dispatch.

The compiled extension is used when available; otherwise the pure-Python
fallback takes over with identical numerical behavior. Set
``SAMURAI_KERNELS=python`` or ``SAMURAI_KERNELS=compiled`` to force a
backend (``compiled`` raises if the extension is not built).
"""

import os

from samurai.kernels import _fallback

_forced = os.environ.get("SAMURAI_KERNELS", "").strip().lower()
if _forced not in ("", "python", "compiled"):
    raise ImportError(f"SAMURAI_KERNELS must be 'python' or 'compiled', got {_forced!r}")

_compiled = None
if _forced != "python":
    try:
        from samurai.kernels import _core as _compiled
    except ImportError:
        if _forced == "compiled":
            raise

if _compiled is not None:
    BACKEND = "compiled"
    _impl = _compiled
else:
    BACKEND = "python"
    _impl = _fallback

label_components = _impl.label_components
dot_f32 = _impl.dot_f32
score_matrix_f32 = _impl.score_matrix_f32

__all__ = ["BACKEND", "label_components", "dot_f32", "score_matrix_f32"]
