"""Kernel backend selection: compiled extension when available, pure Python
otherwise. Both consume identical uniform streams, so outputs agree bitwise."""

try:
    from . import _kernels as _impl

    BACKEND = "compiled"
except ImportError:  # pragma: no cover - depends on build environment
    from . import _kernels_py as _impl

    BACKEND = "python"

run_chunk = _impl.run_chunk


def get_backend(name=None):
    """Return the run_chunk callable for a named backend (default: selected)."""
    if name in (None, BACKEND):
        return run_chunk
    if name == "python":
        from . import _kernels_py

        return _kernels_py.run_chunk
    if name == "compiled":
        from . import _kernels

        return _kernels.run_chunk
    raise ValueError(f"unknown kernel backend {name!r}")
