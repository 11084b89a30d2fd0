"""Backend selection for the hot collapse kernels.

The compiled extension is used when it imports; otherwise the pure-Python
reference is used. Set ``HYPERCOLLAPSE_BACKEND=python`` to force the fallback.
"""
import os

from . import _pykernels

LOWEST_INDEX = _pykernels.LOWEST_INDEX
UNIFORM_TOKEN = _pykernels.UNIFORM_TOKEN

_impl = _pykernels
BACKEND = "python"
if os.environ.get("HYPERCOLLAPSE_BACKEND", "").lower() != "python":
    try:
        from . import _ckernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels


def get_backend(name=None):
    """Return the kernel module called ``name`` (default: the active one)."""
    if name is None:
        return _impl
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _ckernels
        return _ckernels
    raise ValueError(f"unknown backend {name!r}")


def incidence(n, eptr, everts):
    return _impl.incidence(n, eptr, everts)


def collapse(n, eptr, everts, mode, uniforms):
    return _impl.collapse(n, eptr, everts, mode, uniforms)


def collapse_stream(n, eptr, everts, stops):
    return _impl.collapse_stream(n, eptr, everts, stops)


def resolve_subsets(n, offsets):
    return _impl.resolve_subsets(n, offsets)
