"""Kernel backend selection: compiled extension with pure-Python fallback.

At import time the compiled Cython extension is preferred; when it is not
built the pure-Python kernels take over transparently.  The environment
variable ``SPHEREBOT_BACKEND`` forces a choice (``compiled`` or
``python``) and is useful for benchmarking the two paths against each
other.
"""

import os

from . import _kernels_py

_FORCED = os.environ.get("SPHEREBOT_BACKEND", "").strip().lower()

_compiled = None
if _FORCED != "python":
    try:
        from . import _kernels as _compiled  # type: ignore[attr-defined]
    except ImportError:
        _compiled = None

if _FORCED == "compiled" and _compiled is None:
    raise ImportError(
        "SPHEREBOT_BACKEND=compiled but the spherebot._kernels extension is "
        "not built; run `pip install -e . --no-build-isolation` or drop the "
        "override"
    )

kernels = _compiled if _compiled is not None else _kernels_py

BACKEND_NAME = "compiled" if kernels is not _kernels_py else "python"
COMPILED_AVAILABLE = _compiled is not None


def available_backends():
    """Mapping of backend name to kernel module, for benchmarks and tests."""
    out = {"python": _kernels_py}
    if _compiled is not None:
        out["compiled"] = _compiled
    return out
