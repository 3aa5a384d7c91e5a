"""Kernel backend selection.

The compiled extension is preferred when importable; the numpy fallback is
always available.  Set ``CZSCATTER_BACKEND=python`` to force the fallback (or
``cython`` to fail loudly if the extension is missing).
"""
from __future__ import annotations

import importlib
import os

_CHOICES = ("auto", "cython", "python")


def load_kernels(name: str | None = None):
    """Import and return a kernel module by backend name."""
    name = name or "auto"
    if name not in _CHOICES:
        raise ValueError(f"unknown backend {name!r}; expected one of {_CHOICES}")
    if name in ("auto", "cython"):
        try:
            return importlib.import_module("czscatter._kernels")
        except ImportError:
            if name == "cython":
                raise
    return importlib.import_module("czscatter._kernels_py")


kernels = load_kernels(os.environ.get("CZSCATTER_BACKEND") or "auto")


def backend_name() -> str:
    """Name of the kernel backend selected at import ('cython' or 'python')."""
    return kernels.BACKEND_NAME
