"""Hot-loop kernels: occlusion sampling and the box rasterizer.

Two interchangeable implementations exist: a Cython extension
(`_core`) and a pure-Python twin (`pure`).  The compiled one is picked
when importable; set SARI_SIM_PURE=1 to force the fallback.  Both are
written with identical arithmetic (and the extension is compiled with
fp-contract off), so their outputs are bit-for-bit equal, which the
parity tests assert.
"""

from __future__ import annotations

import os

if os.environ.get("SARI_SIM_PURE"):
    from . import pure as _impl

    BACKEND = "pure"
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import pure as _impl

        BACKEND = "pure"

visible_sample_counts = _impl.visible_sample_counts
raster_boxes = _impl.raster_boxes

__all__ = ["visible_sample_counts", "raster_boxes", "BACKEND"]
