"""Kernel backend selection.

Hot loops exist twice: once compiled with numba's ``@njit`` and once as the
plain-Python/numpy original.  The active backend is chosen by the
``ALIASKIT_BACKEND`` environment variable (``numba`` or ``numpy``) and can be
switched at runtime with :func:`set_backend`, which the benchmark harness uses
to compare both paths in one process.  Sequential kernels are single-source
(the same function object, compiled or not), so both backends produce
bit-identical tables.
"""

from __future__ import annotations

import os

BACKENDS = ("numba", "numpy")

try:
    from numba import njit as _numba_njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only on numba-free hosts
    _numba_njit = None
    HAVE_NUMBA = False


def _detect_default() -> str:
    choice = os.environ.get("ALIASKIT_BACKEND", "").strip().lower()
    if choice:
        if choice not in BACKENDS:
            raise ValueError(
                f"ALIASKIT_BACKEND={choice!r}: expected one of {BACKENDS}"
            )
        if choice == "numba" and not HAVE_NUMBA:
            raise ValueError("ALIASKIT_BACKEND=numba but numba is not importable")
        return choice
    return "numba" if HAVE_NUMBA else "numpy"


_active = _detect_default()


def active_backend() -> str:
    """Name of the backend currently used by kernel dispatch."""
    return _active


def set_backend(name: str) -> None:
    """Switch kernel dispatch to ``name`` ("numba" or "numpy") at runtime."""
    global _active
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}: expected one of {BACKENDS}")
    if name == "numba" and not HAVE_NUMBA:
        raise ValueError("numba backend requested but numba is not importable")
    _active = name


def using_numba() -> bool:
    return _active == "numba"


def compile_kernel(func, **jit_kwargs):
    """Return the numba-compiled twin of ``func`` (or None without numba).

    Kernels are compiled lazily on first call; ``cache=True`` persists the
    machine code across processes.  ``nogil=True`` lets section workers run
    compiled kernels in parallel threads.
    """
    if not HAVE_NUMBA:
        return None
    kwargs = {"cache": True, "nogil": True}
    kwargs.update(jit_kwargs)
    return _numba_njit(**kwargs)(func)
