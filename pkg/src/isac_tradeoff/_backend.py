"""Kernel backend selection.

The compiled Cython kernels are used when importable; otherwise the pure-Python
module with the same API is used. ``set_backend`` switches at runtime, which the
benchmark and the backend-parity tests rely on.
"""
from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

kernels = _ckernels if _ckernels is not None else _pykernels
name = "compiled" if _ckernels is not None else "python"


def available():
    return ["compiled", "python"] if _ckernels is not None else ["python"]


def set_backend(which):
    """Select ``"compiled"`` or ``"python"`` kernels; returns the previous name."""
    global kernels, name
    if which == "compiled":
        if _ckernels is None:
            raise ImportError("compiled kernels are not built")
        new = _ckernels
    elif which == "python":
        new = _pykernels
    else:
        raise ValueError(f"unknown backend {which!r}")
    previous = name
    kernels, name = new, which
    return previous
