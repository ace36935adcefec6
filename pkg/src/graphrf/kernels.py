"""Kernel dispatch: compiled extension if present, pure Python otherwise.

The four hot operations (BFS ball assembly, subgraph induction, color
refinement, canonical search) exist twice: `_speedups` is a compiled
extension built at install time, `_pure` is plain Python with identical
semantics.  Import-time selection picks the extension when it importable;
setting the environment variable GRAPHRF_PURE=1 forces the fallback.
`get_impl` gives callers (the benchmark CLI) explicit control.
"""

import os


def _load_default():
    if os.environ.get("GRAPHRF_PURE", "") not in ("", "0"):
        from . import _pure
        return _pure
    try:
        from . import _speedups
        return _speedups
    except ImportError:
        from . import _pure
        return _pure


def get_impl(name="auto"):
    """Kernel module by name: 'auto', 'compiled' or 'python'."""
    if name == "auto":
        return _load_default()
    if name == "python":
        from . import _pure
        return _pure
    if name == "compiled":
        try:
            from . import _speedups
        except ImportError as e:
            raise ImportError(
                "compiled kernels requested but the extension is not "
                "built; reinstall with a C toolchain available") from e
        return _speedups
    raise ValueError(f"unknown implementation {name!r}")


def set_impl(name="auto"):
    """Swap the active kernels; call sites resolve through this module."""
    global _impl, IMPL_NAME, bfs_ball, induced_csr, wl_refine
    global canonical_search
    _impl = get_impl(name)
    IMPL_NAME = _impl.IMPL_NAME
    bfs_ball = _impl.bfs_ball
    induced_csr = _impl.induced_csr
    wl_refine = _impl.wl_refine
    canonical_search = _impl.canonical_search
    return _impl


set_impl("auto")
