"""Select the accumulation kernel backend at import time.

The compiled extension is preferred when importable; the numpy fallback is
used otherwise. KFLATS_BACKEND=python forces the fallback and
KFLATS_BACKEND=cython insists on the extension (raising if it is absent).
"""

from __future__ import annotations

import os

_requested = os.environ.get("KFLATS_BACKEND", "").strip().lower()

if _requested == "python":
    from . import _kernel_py as kernel

    BACKEND = "python"
elif _requested == "cython":
    from . import _kernel as kernel  # type: ignore[no-redef]

    BACKEND = "cython"
elif _requested:
    raise ValueError(f"unknown KFLATS_BACKEND value {_requested!r}")
else:
    try:
        from . import _kernel as kernel  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        from . import _kernel_py as kernel

        BACKEND = "python"
