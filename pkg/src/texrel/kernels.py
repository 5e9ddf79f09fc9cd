"""Kernel selection: compiled extension if available, pure Python otherwise.

Set TEXREL_PURE_PY=1 to force the fallback.  Both implementations are
bit-for-bit interchangeable (enforced by the parity tests), so which one
is active never changes generated bytes, only speed.
"""
from __future__ import annotations

import os

from . import _pykernels

if os.environ.get("TEXREL_PURE_PY"):
    _impl = _pykernels
else:
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pykernels

IMPLEMENTATION = "compiled" if _impl is not _pykernels else "pure-python"

generate_example = _impl.generate_example
levenshtein = _impl.levenshtein
pairwise_levenshtein = _impl.pairwise_levenshtein
paint_scene = _impl.paint_scene
