"""Backend selection for the stepping kernel.

The compiled extension is preferred; the numpy twin is used when it is not
built or when ``DICKE_RESET_BACKEND=python`` is set before import.
"""

import os

from . import _kernels_py

_requested = os.environ.get("DICKE_RESET_BACKEND", "auto").lower()

if _requested == "python":
    Stepper = _kernels_py.Stepper
else:
    try:
        from ._kernels import Stepper
    except ImportError:
        if _requested == "cython":
            raise
        Stepper = _kernels_py.Stepper

BACKEND = "cython" if Stepper is not _kernels_py.Stepper else "python"

BACKENDS = {"python": _kernels_py.Stepper}
try:
    from ._kernels import Stepper as _CStepper
    BACKENDS["cython"] = _CStepper
except ImportError:
    pass


def get_stepper(backend=None):
    """Stepper class for ``backend`` ('cython' or 'python'); default is the import-time choice."""
    if backend is None:
        return Stepper
    try:
        return BACKENDS[backend]
    except KeyError:
        raise ValueError(f"backend {backend!r} not available; have {sorted(BACKENDS)}") from None
