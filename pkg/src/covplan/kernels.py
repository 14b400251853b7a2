"""Kernel dispatch: compiled extension when available, pure Python otherwise.

Set ``COVPLAN_KERNELS=py`` or ``COVPLAN_KERNELS=c`` to force one
implementation (the benchmark and the equivalence tests import both
modules directly). The two implementations are bit-identical by
contract, so the choice never changes results, only speed.
"""

from __future__ import annotations

import os

_FORCE = os.environ.get("COVPLAN_KERNELS", "").strip().lower()

if _FORCE in ("py", "python"):
    from . import _kernels_py as _impl
elif _FORCE in ("c", "cython"):
    from . import _kernels_c as _impl  # type: ignore[no-redef]
elif _FORCE == "":
    try:
        from . import _kernels_c as _impl  # type: ignore[no-redef]
    except ImportError:
        from . import _kernels_py as _impl
else:
    raise RuntimeError(f"unrecognized COVPLAN_KERNELS value: {_FORCE!r}")

IMPLEMENTATION = _impl.IMPLEMENTATION
label_components = _impl.label_components
dijkstra_grid = _impl.dijkstra_grid
