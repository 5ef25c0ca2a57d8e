"""Split-kernel backend selection.

The compiled extension is preferred when importable; the numpy kernel is the
fallback.  Both return bit-identical results, so the choice only affects
speed.  ``CROWDVERDICT_BACKEND=python|compiled`` overrides auto-selection.
"""

from __future__ import annotations

import os

from . import _split_py

try:
    from . import _speedups

    HAVE_COMPILED = True
except ImportError:  # extension not built on this platform
    _speedups = None
    HAVE_COMPILED = False

_KERNELS = {"python": _split_py.scan_best_split}
if HAVE_COMPILED:
    _KERNELS["compiled"] = _speedups.scan_best_split


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_KERNELS))


def default_backend() -> str:
    env = os.environ.get("CROWDVERDICT_BACKEND", "").strip().lower()
    if env in _KERNELS:
        return env
    if env and env != "auto":
        raise ValueError(
            f"CROWDVERDICT_BACKEND={env!r} is not available (choose from {available_backends()})"
        )
    return "compiled" if HAVE_COMPILED else "python"


def get_kernel(backend: str | None = None):
    name = backend if backend is not None else default_backend()
    try:
        return _KERNELS[name]
    except KeyError:
        raise ValueError(f"unknown backend {name!r} (choose from {available_backends()})")
